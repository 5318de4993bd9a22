#include "latpath/point_cloud.hpp"

#include <charconv>
#include <cmath>
#include <random>
#include <string>

#include "latpath/errors.hpp"

namespace latpath {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_coord(const std::string& line, std::size_t col, std::size_t width,
                   const char* what, std::size_t line_no,
                   const std::string& source) {
    const std::string field = trim(line.substr(col, width));
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last || field.empty() ||
        !std::isfinite(value)) {
        throw ParseError(source + ": line " + std::to_string(line_no) +
                         ": malformed " + what + " coordinate '" + field + "'");
    }
    return value;
}

}  // namespace

std::string AtomSelection::describe() const {
    switch (mode) {
        case Mode::AllAtoms:
            return "all";
        case Mode::CAlphaOnly:
            return "calpha";
        case Mode::Chain:
            return std::string("chain:") + chain;
    }
    return "all";
}

PointCloud parse_pdb(std::istream& in, const AtomSelection& sel,
                     std::string source_name) {
    const std::string source = source_name.empty() ? "<pdb>" : source_name;
    PointCloud cloud;
    cloud.source = source;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.rfind("ATOM  ", 0) != 0) continue;
        // record name 1-6, atom name 13-16, altLoc 17, resName 18-20,
        // chain 22, resSeq 23-26, x/y/z 31-38/39-46/47-54 (1-based)
        if (line.size() < 54) {
            throw ParseError(source + ": line " + std::to_string(line_no) +
                             ": ATOM record shorter than the coordinate block");
        }
        const char alt_loc = line[16];
        if (alt_loc != ' ' && alt_loc != 'A') continue;

        const std::string atom_name = trim(line.substr(12, 4));
        const char chain = line[21];
        switch (sel.mode) {
            case AtomSelection::Mode::AllAtoms:
                break;
            case AtomSelection::Mode::CAlphaOnly:
                if (atom_name != "CA") continue;
                break;
            case AtomSelection::Mode::Chain:
                if (chain != sel.chain) continue;
                break;
        }

        Point3 p;
        p.x = parse_coord(line, 30, 8, "x", line_no, source);
        p.y = parse_coord(line, 38, 8, "y", line_no, source);
        p.z = parse_coord(line, 46, 8, "z", line_no, source);
        cloud.points.push_back(p);

        AtomLabel label;
        label.atom = atom_name;
        label.residue = trim(line.substr(17, 3)) + " " + trim(line.substr(22, 4));
        label.chain = chain;
        cloud.labels.push_back(std::move(label));
    }

    if (cloud.points.empty()) {
        throw DataError(source + ": selection '" + sel.describe() +
                        "' matched no atoms");
    }
    return cloud;
}

PointCloud parse_xyz_csv(std::istream& in, std::string source_name) {
    const std::string source = source_name.empty() ? "<csv>" : source_name;
    PointCloud cloud;
    cloud.source = source;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;

        double coords[3];
        std::size_t begin = 0;
        for (int k = 0; k < 3; ++k) {
            auto end = line.find(',', begin);
            const bool last = (k == 2);
            if (!last && end == std::string::npos) {
                throw ParseError(source + ": line " + std::to_string(line_no) +
                                 ": expected three comma-separated values");
            }
            if (last && end != std::string::npos) {
                throw ParseError(source + ": line " + std::to_string(line_no) +
                                 ": expected exactly three values");
            }
            if (last) end = line.size();
            const std::string field = trim(line.substr(begin, end - begin));
            const char* first = field.data();
            const char* flast = field.data() + field.size();
            const auto res = std::from_chars(first, flast, coords[k]);
            if (res.ec != std::errc{} || res.ptr != flast || field.empty() ||
                !std::isfinite(coords[k])) {
                throw ParseError(source + ": line " + std::to_string(line_no) +
                                 ": malformed value '" + field + "'");
            }
            begin = end + 1;
        }
        cloud.points.push_back({coords[0], coords[1], coords[2]});
    }

    if (cloud.points.empty()) {
        throw DataError(source + ": no points");
    }
    return cloud;
}

PointCloud jittered(const PointCloud& cloud, double sigma, std::uint64_t seed) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw DataError("jitter magnitude must be positive and finite");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-sigma, sigma);
    PointCloud out = cloud;
    for (auto& p : out.points) {
        p.x += noise(rng);
        p.y += noise(rng);
        p.z += noise(rng);
    }
    return out;
}

}  // namespace latpath
