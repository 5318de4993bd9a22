#include "latpath/cli.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latpath/diagram_json.hpp"
#include "latpath/distance_matrix.hpp"
#include "latpath/errors.hpp"
#include "latpath/inference.hpp"
#include "latpath/lattice.hpp"
#include "latpath/persistence.hpp"
#include "latpath/point_cloud.hpp"
#include "latpath/svg.hpp"

namespace latpath::cli {

namespace {

namespace fs = std::filesystem;

constexpr std::uint64_t kJitterSeed = 20177;

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(
               clock::now().time_since_epoch())
        .count();
}

// Completed files only: write to a sibling temp path, then rename.
void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& emit) {
    const fs::path target(path);
    if (target.has_parent_path() && !target.parent_path().empty()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write to " + tmp.string());
        emit(out);
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw ResourceError("failed while writing " + tmp.string());
        }
    }
    fs::rename(tmp, target);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

enum class InputFormat { Auto, Pdb, Csv };

InputFormat sniff_format(const std::string& path) {
    const std::string ext = lower(fs::path(path).extension().string());
    if (ext == ".pdb" || ext == ".ent" || ext == ".pdb1") return InputFormat::Pdb;
    if (ext == ".csv" || ext == ".txt" || ext == ".xyz") return InputFormat::Csv;
    throw UsageError("cannot infer the input format of '" + path +
                     "'; pass --format pdb|csv");
}

AtomSelection parse_selection(const std::string& text) {
    if (text == "all") return AtomSelection::all();
    if (text == "calpha") return AtomSelection::calpha();
    if (text.rfind("chain:", 0) == 0 && text.size() == 7) {
        return AtomSelection::for_chain(text[6]);
    }
    throw UsageError("bad --select value '" + text +
                     "'; expected all, calpha, or chain:<id>");
}

std::size_t triangle_budget_from_env() {
    const char* env = std::getenv("LATPATH_SIMPLEX_BUDGET");
    if (!env || !*env) return kDefaultTriangleBudget;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (!end || *end != '\0' || v == 0) {
        throw UsageError("LATPATH_SIMPLEX_BUDGET must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

PointCloud load_cloud(const std::string& path, InputFormat format,
                      const AtomSelection& sel) {
    if (!fs::exists(path)) throw UsageError("input file not found: " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open input file: " + path);
    if (format == InputFormat::Auto) format = sniff_format(path);
    if (format == InputFormat::Pdb) return parse_pdb(in, sel, path);
    if (sel.mode != AtomSelection::Mode::AllAtoms) {
        throw UsageError("--select applies to PDB inputs only");
    }
    return parse_xyz_csv(in, path);
}

struct SequenceExtraction {
    std::vector<double> values;  // strictly increasing
    BoxAreaSequence bas;         // filled in h-prime mode
    bool h_prime = false;
    std::optional<double> aug_delta_used;
    double strict_delta_used = 0.0;
    bool h_sorted = false;
};

// Turns a diagram into the strictly increasing comparison sequence: either
// the strictified box areas of its lattice-path construction, or the raw
// sorted deaths.
SequenceExtraction extract_sequence(const PersistenceDiagram& diagram,
                                    bool use_h_prime,
                                    std::optional<double> aug_delta,
                                    std::optional<double> strict_delta,
                                    const std::string& name) {
    if (diagram.q() == 0) {
        throw DataError(name + ": diagram has no finite pairs");
    }
    SequenceExtraction out;
    out.h_prime = use_h_prime;

    if (use_h_prime) {
        PersistenceDiagram working = diagram;
        bool zero_births = diagram.dim == 0;
        for (const auto& p : diagram.pairs) zero_births &= (p.birth == 0.0);
        if (zero_births && diagram.q() > 0) {
            const double delta = aug_delta.value_or(default_augment_delta(diagram));
            working = augment_h0(diagram, delta);
            out.aug_delta_used = delta;
        }
        const BirthDeathProcess process = to_birth_death_process(working);
        out.bas = box_areas(to_weighted_lattice_path(process));
        apply_strictify(out.bas, strict_delta);
        out.values = out.bas.h_strict;
        out.strict_delta_used = out.bas.delta;
        out.h_sorted = out.bas.sorted_to_monotone;
    } else {
        out.values.reserve(diagram.q());
        for (const auto& p : diagram.pairs) out.values.push_back(p.death);
        std::sort(out.values.begin(), out.values.end());
        for (std::size_t i = 1; i < out.values.size(); ++i) {
            if (out.values[i] == out.values[i - 1]) {
                throw TieError(name + ": tied death value " +
                               std::to_string(out.values[i]) +
                               "; jitter the cloud before persisting");
            }
        }
    }
    return out;
}

StepFunction step_from_values(const std::vector<double>& values, double scale) {
    StepFunction f;
    f.breakpoints.reserve(values.size());
    for (double v : values) f.breakpoints.push_back(v / scale);
    return f;
}

// ---- persist ----

struct PersistArgs {
    std::string input;
    std::string output;
    int dim = 0;
    double max_eps = 0.0;
    bool has_max_eps = false;
    std::string select = "all";
    double jitter_sigma = 0.0;
    bool has_jitter = false;
    std::string format = "auto";
    bool single_precision = false;
};

int run_persist(const PersistArgs& args) {
    const double t0 = now_ms();

    InputFormat format = InputFormat::Auto;
    if (args.format == "pdb") {
        format = InputFormat::Pdb;
    } else if (args.format == "csv") {
        format = InputFormat::Csv;
    } else if (args.format != "auto") {
        throw UsageError("bad --format value '" + args.format + "'");
    }

    const AtomSelection sel = parse_selection(args.select);
    PointCloud cloud = load_cloud(args.input, format, sel);
    if (args.has_jitter) cloud = jittered(cloud, args.jitter_sigma, kJitterSeed);

    const DistanceMatrix dm = DistanceMatrix::compute(
        cloud, args.single_precision ? DistanceMatrix::Storage::Float32
                                     : DistanceMatrix::Storage::Float64);

    PersistenceDiagram diagram;
    if (args.dim == 0) {
        diagram = h0_persistence(dm);
    } else {
        const double ceiling =
            args.has_max_eps ? args.max_eps : enclosing_radius(dm);
        diagram = h1_persistence(dm, ceiling, triangle_budget_from_env());
    }

    Provenance prov;
    prov.text["source"] = args.input;
    prov.text["selection"] = sel.describe();
    prov.numbers["n_points"] = static_cast<double>(cloud.size());
    if (args.has_jitter) {
        prov.numbers["jitter_sigma"] = args.jitter_sigma;
        prov.numbers["jitter_seed"] = static_cast<double>(kJitterSeed);
    }
    if (args.single_precision) prov.text["storage"] = "float32";

    atomic_write(args.output, [&](std::ostream& out) {
        write_diagram_json(out, diagram, &prov);
    });

    std::cerr << "[latpath persist] n=" << cloud.size() << " dim=" << args.dim
              << " q=" << diagram.q()
              << " dropped_infinite=" << diagram.dropped_infinite
              << " max_eps=" << diagram.max_eps
              << " wall_ms=" << (now_ms() - t0) << "\n";
    return 0;
}

// ---- path ----

struct PathArgs {
    std::string diagram;
    std::string prefix;
    std::optional<double> delta;
    std::optional<double> aug_delta;
    bool svg = false;
};

int run_path(const PathArgs& args) {
    const PersistenceDiagram diagram = read_diagram_file(args.diagram);
    if (diagram.q() == 0) {
        throw DataError(args.diagram + ": diagram has no finite pairs");
    }

    PersistenceDiagram working = diagram;
    std::optional<double> aug_used;
    bool zero_births = diagram.dim == 0;
    for (const auto& p : diagram.pairs) zero_births &= (p.birth == 0.0);
    if (zero_births) {
        const double delta =
            args.aug_delta.value_or(default_augment_delta(diagram));
        working = augment_h0(diagram, delta);
        aug_used = delta;
    }

    const BirthDeathProcess process = to_birth_death_process(working);
    const WeightedLatticePath wlp = to_weighted_lattice_path(process);
    BoxAreaSequence bas = box_areas(wlp);
    apply_strictify(bas, args.delta);
    const StepFunction phi = step_function(bas);
    const double scale = bas.h_strict.back() > 0.0 ? bas.h_strict.back() : 1.0;

    atomic_write(args.prefix + ".path.csv", [&](std::ostream& out) {
        out << "q=" << wlp.q() << "\n";
        for (Step s : wlp.word.steps) {
            out << (s == Step::Right ? "R" : "U") << "\n";
        }
    });

    atomic_write(args.prefix + ".step.csv", [&](std::ostream& out) {
        out << "t,phi\n";
        for (std::size_t j = 0; j < phi.q(); ++j) {
            out << json_number(phi.breakpoints[j]) << "," << (j + 1) << "\n";
        }
    });

    atomic_write(args.prefix + ".meta.json", [&](std::ostream& out) {
        Provenance prov;
        prov.text["source"] = args.diagram;
        prov.text["h_sorted_to_monotone"] = bas.sorted_to_monotone ? "true" : "false";
        prov.numbers["q"] = static_cast<double>(wlp.q());
        prov.numbers["delta"] = bas.delta;
        prov.numbers["scale"] = scale;
        if (aug_used) prov.numbers["aug_delta"] = *aug_used;
        out << "{\"provenance\":";
        write_provenance_json(out, prov);
        out << "}\n";
    });

    if (args.svg) {
        atomic_write(args.prefix + ".svg",
                     [&](std::ostream& out) { write_step_svg(out, phi); });
    }

    std::cerr << "[latpath path] q=" << wlp.q() << " delta=" << bas.delta
              << " scale=" << scale << "\n";
    return 0;
}

// ---- compare ----

struct CompareArgs {
    std::string a, b;
    std::string output;
    std::string methods = "exact,asymptotic";
    std::string sequence = "h-prime";
    std::string series = "kolmogorov";
    std::uint64_t n_perm = 10000;
    std::uint64_t seed = 1;
    std::optional<double> delta;
    std::optional<double> aug_delta;
};

int run_compare(const CompareArgs& args) {
    bool want_exact = false, want_asym = false, want_perm = false;
    {
        std::stringstream ss(args.methods);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item == "exact") {
                want_exact = true;
            } else if (item == "asymptotic") {
                want_asym = true;
            } else if (item == "permutation") {
                want_perm = true;
            } else {
                throw UsageError("unknown method '" + item +
                                 "'; expected exact, asymptotic, permutation");
            }
        }
        if (!want_exact && !want_asym && !want_perm) {
            throw UsageError("--method selected nothing");
        }
    }

    TailSeries series = TailSeries::Kolmogorov;
    if (args.series == "legacy") {
        series = TailSeries::LegacyFirstTerm;
    } else if (args.series != "kolmogorov") {
        throw UsageError("bad --series value '" + args.series +
                         "'; expected kolmogorov or legacy");
    }

    bool h_prime;
    if (args.sequence == "h-prime") {
        h_prime = true;
    } else if (args.sequence == "deaths") {
        h_prime = false;
    } else {
        throw UsageError("bad --sequence value '" + args.sequence +
                         "'; expected h-prime or deaths");
    }

    const PersistenceDiagram da = read_diagram_file(args.a);
    const PersistenceDiagram db = read_diagram_file(args.b);
    const SequenceExtraction sa =
        extract_sequence(da, h_prime, args.aug_delta, args.delta, args.a);
    const SequenceExtraction sb =
        extract_sequence(db, h_prime, args.aug_delta, args.delta, args.b);

    const std::size_t q1 = sa.values.size();
    const std::size_t q2 = sb.values.size();
    double scale = std::max(sa.values.back(), sb.values.back());
    if (!(scale > 0.0)) scale = 1.0;

    const StepFunction f1 = step_from_values(sa.values, scale);
    const StepFunction f2 = step_from_values(sb.values, scale);

    InferenceResult result;
    result.q1 = q1;
    result.q2 = q2;
    result.d_stat = topo_distance(f1, f2);
    result.d_scaled = scaled_statistic(q1, q2, result.d_stat);

    if (want_exact) result.p_exact = exact_pvalue(q1, q2, result.d_stat);
    if (want_asym) {
        result.p_asymptotic = asymptotic_pvalue(q1, q2, result.d_stat, series);
    }
    if (want_perm) {
        result.p_permutation =
            permutation_pvalue(f1.breakpoints, f2.breakpoints, args.n_perm,
                               args.seed);
    }

    Provenance prov;
    prov.text["input_a"] = args.a;
    prov.text["input_b"] = args.b;
    prov.text["sequence"] = args.sequence;
    prov.text["series"] = args.series;
    prov.numbers["scale"] = scale;
    if (h_prime) {
        prov.numbers["delta_a"] = sa.strict_delta_used;
        prov.numbers["delta_b"] = sb.strict_delta_used;
        prov.text["h_sorted_a"] = sa.h_sorted ? "true" : "false";
        prov.text["h_sorted_b"] = sb.h_sorted ? "true" : "false";
        if (sa.aug_delta_used) prov.numbers["aug_delta_a"] = *sa.aug_delta_used;
        if (sb.aug_delta_used) prov.numbers["aug_delta_b"] = *sb.aug_delta_used;
    }

    atomic_write(args.output, [&](std::ostream& out) {
        write_inference_json(out, result, &prov);
    });

    std::cout << "q1=" << q1 << " q2=" << q2 << " D=" << result.d_stat
              << " d_scaled=" << result.d_scaled;
    if (result.p_exact) std::cout << " p_exact=" << *result.p_exact;
    if (result.p_asymptotic) {
        std::cout << " p_asymptotic=" << *result.p_asymptotic;
    }
    if (result.p_permutation) {
        std::cout << " p_permutation=" << result.p_permutation->p;
    }
    std::cout << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"persistence diagrams as lattice paths, with exact two-sample "
                 "inference"};
    app.require_subcommand(1);

    PersistArgs persist;
    CLI::App* cmd_persist =
        app.add_subcommand("persist", "point cloud -> persistence diagram JSON");
    cmd_persist->add_option("--input", persist.input, "point cloud file")
        ->required();
    cmd_persist->add_option("--dim", persist.dim, "homology degree (0 or 1)")
        ->required()
        ->check(CLI::IsMember({0, 1}));
    auto* eps_opt =
        cmd_persist->add_option("--max-eps", persist.max_eps,
                                "filtration ceiling (default: enclosing radius)");
    cmd_persist->add_option("--select", persist.select,
                            "all | calpha | chain:<id> (PDB only)");
    auto* jitter_opt = cmd_persist->add_option(
        "--jitter", persist.jitter_sigma, "uniform noise magnitude to break ties");
    cmd_persist->add_option("--format", persist.format, "auto | pdb | csv");
    cmd_persist->add_flag("--single-precision", persist.single_precision,
                          "store distances as 32-bit floats");
    cmd_persist->add_option("--output", persist.output, "diagram JSON path")
        ->required();

    PathArgs path;
    CLI::App* cmd_path = app.add_subcommand(
        "path", "diagram JSON -> lattice path, step function, optional SVG");
    cmd_path->add_option("--diagram", path.diagram, "diagram JSON path")
        ->required();
    double path_delta = 0.0, path_aug = 0.0;
    auto* path_delta_opt =
        cmd_path->add_option("--delta", path_delta, "strictify increment");
    auto* path_aug_opt = cmd_path->add_option(
        "--aug-delta", path_aug, "birth spacing for degree-0 diagrams");
    cmd_path->add_option("--output-prefix", path.prefix, "output path prefix")
        ->required();
    cmd_path->add_flag("--svg", path.svg, "emit the staircase SVG");

    CompareArgs compare;
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "two diagram JSONs -> distance and p-values");
    cmd_compare->add_option("--a", compare.a, "first diagram JSON")->required();
    cmd_compare->add_option("--b", compare.b, "second diagram JSON")->required();
    cmd_compare->add_option("--method", compare.methods,
                            "comma list of exact,asymptotic,permutation");
    cmd_compare->add_option("--n-perm", compare.n_perm, "permutation count");
    cmd_compare->add_option("--seed", compare.seed, "permutation seed");
    cmd_compare->add_option("--sequence", compare.sequence,
                            "h-prime | deaths: values the test compares");
    cmd_compare->add_option("--series", compare.series,
                            "kolmogorov | legacy tail series");
    double cmp_delta = 0.0, cmp_aug = 0.0;
    auto* cmp_delta_opt =
        cmd_compare->add_option("--delta", cmp_delta, "strictify increment");
    auto* cmp_aug_opt = cmd_compare->add_option(
        "--aug-delta", cmp_aug, "birth spacing for degree-0 diagrams");
    cmd_compare->add_option("--output", compare.output, "result JSON path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_persist->parsed()) {
            persist.has_max_eps = eps_opt->count() > 0;
            persist.has_jitter = jitter_opt->count() > 0;
            return run_persist(persist);
        }
        if (cmd_path->parsed()) {
            if (path_delta_opt->count() > 0) path.delta = path_delta;
            if (path_aug_opt->count() > 0) path.aug_delta = path_aug;
            return run_path(path);
        }
        if (cmd_compare->parsed()) {
            if (cmp_delta_opt->count() > 0) compare.delta = cmp_delta;
            if (cmp_aug_opt->count() > 0) compare.aug_delta = cmp_aug;
            return run_compare(compare);
        }
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("latpath");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace latpath::cli
