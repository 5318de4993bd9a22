#include "latpath/diagram_json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "latpath/errors.hpp"

namespace latpath {

namespace {

std::string escape_json(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

}  // namespace

void write_provenance_json(std::ostream& out, const Provenance& prov) {
    out << "{";
    bool first = true;
    for (const auto& [key, value] : prov.text) {
        if (!first) out << ",";
        first = false;
        out << "\"" << escape_json(key) << "\":\"" << escape_json(value) << "\"";
    }
    for (const auto& [key, value] : prov.numbers) {
        if (!first) out << ",";
        first = false;
        out << "\"" << escape_json(key) << "\":" << json_number(value);
    }
    out << "}";
}

std::string json_number(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_diagram_json(std::ostream& out, const PersistenceDiagram& diagram,
                        const Provenance* provenance) {
    out << "{\"dim\":" << diagram.dim;
    out << ",\"max_eps\":" << json_number(diagram.max_eps);
    out << ",\"dropped_infinite\":" << diagram.dropped_infinite;
    out << ",\"pairs\":[";
    for (std::size_t i = 0; i < diagram.pairs.size(); ++i) {
        if (i) out << ",";
        out << "[" << json_number(diagram.pairs[i].birth) << ","
            << json_number(diagram.pairs[i].death) << "]";
    }
    out << "]";
    if (provenance) {
        out << ",\"provenance\":";
        write_provenance_json(out, *provenance);
    }
    out << "}\n";
}

PersistenceDiagram read_diagram_json(std::istream& in,
                                     const std::string& source_name) {
    const std::string source = source_name.empty() ? "<diagram>" : source_name;
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(source + ": invalid JSON: " + e.what());
    }
    if (!j.is_object()) throw ParseError(source + ": expected a JSON object");

    PersistenceDiagram diagram;
    if (!j.contains("dim") || !j["dim"].is_number_integer()) {
        throw ParseError(source + ": missing integer field 'dim'");
    }
    diagram.dim = j["dim"].get<int>();
    if (diagram.dim != 0 && diagram.dim != 1) {
        throw DataError(source + ": dim must be 0 or 1");
    }

    if (!j.contains("max_eps")) {
        throw ParseError(source + ": missing field 'max_eps'");
    }
    if (j["max_eps"].is_null()) {
        diagram.max_eps = std::numeric_limits<double>::infinity();
    } else if (j["max_eps"].is_number()) {
        diagram.max_eps = j["max_eps"].get<double>();
    } else {
        throw ParseError(source + ": 'max_eps' must be a number or null");
    }

    if (!j.contains("dropped_infinite") ||
        !j["dropped_infinite"].is_number_unsigned()) {
        throw ParseError(source + ": missing nonnegative field 'dropped_infinite'");
    }
    diagram.dropped_infinite = j["dropped_infinite"].get<std::size_t>();

    if (!j.contains("pairs") || !j["pairs"].is_array()) {
        throw ParseError(source + ": missing array field 'pairs'");
    }
    for (const auto& item : j["pairs"]) {
        if (!item.is_array() || item.size() != 2 || !item[0].is_number() ||
            !item[1].is_number()) {
            throw ParseError(source + ": each pair must be [birth, death]");
        }
        PersistencePair p{item[0].get<double>(), item[1].get<double>()};
        if (!std::isfinite(p.birth) || !std::isfinite(p.death)) {
            throw DataError(source + ": births and deaths must be finite");
        }
        if (!(p.birth < p.death)) {
            throw DataError(source + ": pair with birth >= death");
        }
        if (diagram.dim == 0 && p.birth < 0.0) {
            throw DataError(source + ": degree-0 births must be nonnegative");
        }
        diagram.pairs.push_back(p);
    }
    std::sort(diagram.pairs.begin(), diagram.pairs.end(),
              [](const auto& a, const auto& b) {
                  if (a.birth != b.birth) return a.birth < b.birth;
                  return a.death < b.death;
              });
    return diagram;
}

PersistenceDiagram read_diagram_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open diagram file: " + path);
    return read_diagram_json(in, path);
}

void write_inference_json(std::ostream& out, const InferenceResult& result,
                          const Provenance* provenance) {
    out << "{\"q1\":" << result.q1 << ",\"q2\":" << result.q2;
    out << ",\"d_stat\":" << json_number(result.d_stat);
    out << ",\"d_scaled\":" << json_number(result.d_scaled);
    out << ",\"p_exact\":"
        << (result.p_exact ? json_number(*result.p_exact) : "null");
    out << ",\"p_asymptotic\":"
        << (result.p_asymptotic ? json_number(*result.p_asymptotic) : "null");
    out << ",\"p_permutation\":";
    if (result.p_permutation) {
        out << "{\"p\":" << json_number(result.p_permutation->p)
            << ",\"n_perm\":" << result.p_permutation->n_perm
            << ",\"seed\":" << result.p_permutation->seed << "}";
    } else {
        out << "null";
    }
    if (provenance) {
        out << ",\"provenance\":";
        write_provenance_json(out, *provenance);
    }
    out << "}\n";
}

}  // namespace latpath
