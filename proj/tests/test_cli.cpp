#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "latpath/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path dir;

    TempDir() {
        static std::atomic<int> counter{0};
        dir = fs::temp_directory_path() /
              ("latpath_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter++));
        fs::create_directories(dir);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }

    std::string file(const std::string& name) const { return (dir / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the CLI with cout/cerr captured so test output stays clean.
struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    auto* old_out = std::cout.rdbuf(out.rdbuf());
    auto* old_err = std::cerr.rdbuf(err.rdbuf());
    RunResult r;
    r.code = latpath::cli::run(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

const char* kSquareCsv = "0,0,0\n1,0,0\n1,1,0\n0,1,0\n";
const char* kCollinearCsv = "0,0,0\n1,0,0\n3,0,0\n";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("persist writes the unit-square degree-1 diagram") {
    TempDir tmp;
    write_file(tmp.file("square.csv"), kSquareCsv);
    auto r = run_cli({"persist", "--input", tmp.file("square.csv"), "--dim", "1",
                      "--max-eps", "2", "--output", tmp.file("d.json")});
    CHECK(r.code == 0);
    const std::string json = read_file(tmp.file("d.json"));
    CHECK(json.find("\"dim\":1") != std::string::npos);
    CHECK(json.find("[[1,1.4142135623730951]]") != std::string::npos);
    CHECK(json.find("\"dropped_infinite\":0") != std::string::npos);
    CHECK(json.find("\"max_eps\":2") != std::string::npos);
    CHECK(json.find("\"n_points\":4") != std::string::npos);
}

TEST_CASE("persist uses the enclosing radius when max-eps is omitted") {
    TempDir tmp;
    write_file(tmp.file("square.csv"), kSquareCsv);
    auto r = run_cli({"persist", "--input", tmp.file("square.csv"), "--dim", "1",
                      "--output", tmp.file("d.json")});
    CHECK(r.code == 0);
    const std::string json = read_file(tmp.file("d.json"));
    // enclosing radius of the square is sqrt(2); the cycle still dies there
    CHECK(json.find("[[1,1.4142135623730951]]") != std::string::npos);
    CHECK(json.find("\"max_eps\":1.4142135623730951") != std::string::npos);
}

TEST_CASE("persist degree 0 serializes an unbounded ceiling as null") {
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kCollinearCsv);
    auto r = run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "0",
                      "--output", tmp.file("d.json")});
    CHECK(r.code == 0);
    const std::string json = read_file(tmp.file("d.json"));
    CHECK(json.find("\"max_eps\":null") != std::string::npos);
    CHECK(json.find("[[0,1],[0,2]]") != std::string::npos);
    CHECK(json.find("\"dropped_infinite\":1") != std::string::npos);
}

TEST_CASE("persist output is byte identical across runs") {
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kSquareCsv);
    auto common = std::vector<std::string>{
        "persist", "--input", tmp.file("pts.csv"), "--dim", "1",
        "--jitter", "0.0001"};
    auto a = common;
    a.insert(a.end(), {"--output", tmp.file("a.json")});
    auto b = common;
    b.insert(b.end(), {"--output", tmp.file("b.json")});
    CHECK(run_cli(a).code == 0);
    CHECK(run_cli(b).code == 0);
    CHECK(read_file(tmp.file("a.json")) == read_file(tmp.file("b.json")));
}

TEST_CASE("persist exit codes distinguish usage, data, and resource errors") {
    TempDir tmp;
    // missing input file -> usage
    auto missing = run_cli({"persist", "--input", tmp.file("nope.csv"), "--dim",
                            "0", "--output", tmp.file("o.json")});
    CHECK(missing.code == 1);

    // malformed coordinates -> parse (2)
    write_file(tmp.file("bad.csv"), "0,0\n");
    auto bad = run_cli({"persist", "--input", tmp.file("bad.csv"), "--dim", "0",
                        "--output", tmp.file("o.json")});
    CHECK(bad.code == 2);

    // duplicate points -> data (2)
    write_file(tmp.file("dup.csv"), "0,0,0\n0,0,0\n");
    auto dup = run_cli({"persist", "--input", tmp.file("dup.csv"), "--dim", "0",
                        "--output", tmp.file("o.json")});
    CHECK(dup.code == 2);

    // unknown extension without --format -> usage
    write_file(tmp.file("pts.dat"), kSquareCsv);
    auto unknown = run_cli({"persist", "--input", tmp.file("pts.dat"), "--dim",
                            "0", "--output", tmp.file("o.json")});
    CHECK(unknown.code == 1);
    // ... but an explicit --format csv accepts it
    auto forced = run_cli({"persist", "--input", tmp.file("pts.dat"), "--dim",
                           "0", "--format", "csv", "--output", tmp.file("o.json")});
    CHECK(forced.code == 0);

    // --select on a CSV input -> usage
    write_file(tmp.file("pts.csv"), kSquareCsv);
    auto sel = run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "0",
                        "--select", "calpha", "--output", tmp.file("o.json")});
    CHECK(sel.code == 1);

    // simplex budget exceeded -> resource (3)
    ::setenv("LATPATH_SIMPLEX_BUDGET", "1", 1);
    auto budget = run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim",
                           "1", "--output", tmp.file("o.json")});
    ::unsetenv("LATPATH_SIMPLEX_BUDGET");
    CHECK(budget.code == 3);
}

TEST_CASE("bad flags and missing subcommands exit with usage errors") {
    CHECK(run_cli({}).code == 1);
    CHECK(run_cli({"persist"}).code == 1);             // missing required options
    CHECK(run_cli({"frobnicate"}).code == 1);          // unknown subcommand
    CHECK(run_cli({"--help"}).code == 0);
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kSquareCsv);
    auto dim2 = run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "2",
                         "--output", tmp.file("o.json")});
    CHECK(dim2.code == 1);
}

TEST_CASE("path emits word, step function, metadata, and svg") {
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kCollinearCsv);
    REQUIRE(run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "0",
                     "--output", tmp.file("d.json")})
                .code == 0);
    auto r = run_cli({"path", "--diagram", tmp.file("d.json"),
                      "--output-prefix", tmp.file("out"), "--svg"});
    CHECK(r.code == 0);

    const std::string word = read_file(tmp.file("out.path.csv"));
    CHECK(word == "q=2\nR\nR\nU\nU\n");

    const std::string step = read_file(tmp.file("out.step.csv"));
    CHECK(step.rfind("t,phi\n", 0) == 0);
    CHECK(step.find("0,1\n") != std::string::npos);  // first breakpoint at 0
    CHECK(step.find(",2\n") != std::string::npos);

    const std::string meta = read_file(tmp.file("out.meta.json"));
    CHECK(meta.find("\"provenance\":{") != std::string::npos);
    CHECK(meta.find("\"q\":2") != std::string::npos);
    CHECK(meta.find("\"aug_delta\":") != std::string::npos);
    CHECK(meta.find("\"h_sorted_to_monotone\":\"false\"") != std::string::npos);

    const std::string svg = read_file(tmp.file("out.svg"));
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("id=\"phi\"") != std::string::npos);
}

TEST_CASE("path rejects missing and malformed diagram files") {
    TempDir tmp;
    auto missing = run_cli({"path", "--diagram", tmp.file("nope.json"),
                            "--output-prefix", tmp.file("o")});
    CHECK(missing.code == 1);
    write_file(tmp.file("broken.json"), "{oops");
    auto broken = run_cli({"path", "--diagram", tmp.file("broken.json"),
                           "--output-prefix", tmp.file("o")});
    CHECK(broken.code == 2);
    write_file(tmp.file("bad.json"),
               "{\"dim\":1,\"max_eps\":2,\"dropped_infinite\":0,"
               "\"pairs\":[[3,1]]}");
    auto bad = run_cli({"path", "--diagram", tmp.file("bad.json"),
                        "--output-prefix", tmp.file("o")});
    CHECK(bad.code == 2);
}

TEST_CASE("compare of a diagram with itself is exactly null") {
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kSquareCsv);
    REQUIRE(run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "1",
                     "--output", tmp.file("d.json")})
                .code == 0);
    auto r = run_cli({"compare", "--a", tmp.file("d.json"), "--b",
                      tmp.file("d.json"), "--output", tmp.file("cmp.json")});
    CHECK(r.code == 0);
    CHECK(r.out.find("p_exact=1") != std::string::npos);
    const std::string json = read_file(tmp.file("cmp.json"));
    CHECK(json.find("\"d_stat\":0,") != std::string::npos);
    CHECK(json.find("\"p_exact\":1,") != std::string::npos);
    CHECK(json.find("\"q1\":1,\"q2\":1") != std::string::npos);
}

TEST_CASE("compare runs all three methods on death sequences") {
    TempDir tmp;
    write_file(tmp.file("a.csv"), kCollinearCsv);
    write_file(tmp.file("b.csv"), "0,0,0\n0.8,0,0\n2.9,0,0\n7,0,0\n");
    REQUIRE(run_cli({"persist", "--input", tmp.file("a.csv"), "--dim", "0",
                     "--output", tmp.file("a.json")})
                .code == 0);
    REQUIRE(run_cli({"persist", "--input", tmp.file("b.csv"), "--dim", "0",
                     "--output", tmp.file("b.json")})
                .code == 0);
    auto args = std::vector<std::string>{
        "compare", "--a", tmp.file("a.json"), "--b", tmp.file("b.json"),
        "--method", "exact,asymptotic,permutation", "--sequence", "deaths",
        "--n-perm", "500", "--seed", "42", "--output", tmp.file("c1.json")};
    auto r = run_cli(args);
    CHECK(r.code == 0);
    const std::string json = read_file(tmp.file("c1.json"));
    CHECK(json.find("\"q1\":2,\"q2\":3") != std::string::npos);
    CHECK(json.find("\"p_permutation\":{\"p\":") != std::string::npos);
    CHECK(json.find("\"n_perm\":500") != std::string::npos);
    CHECK(json.find("\"seed\":42") != std::string::npos);
    CHECK(json.find("\"sequence\":\"deaths\"") != std::string::npos);

    // determinism: same seed, byte-identical result
    args.back() = tmp.file("c2.json");
    CHECK(run_cli(args).code == 0);
    CHECK(read_file(tmp.file("c1.json")) == read_file(tmp.file("c2.json")));
}

TEST_CASE("compare rejects permutation on h-prime sequences") {
    // Both strictified sequences start at 0, so the pooled values always tie.
    TempDir tmp;
    write_file(tmp.file("a.csv"), kCollinearCsv);
    write_file(tmp.file("b.csv"), "0,0,0\n0.8,0,0\n2.9,0,0\n7,0,0\n");
    REQUIRE(run_cli({"persist", "--input", tmp.file("a.csv"), "--dim", "0",
                     "--output", tmp.file("a.json")})
                .code == 0);
    REQUIRE(run_cli({"persist", "--input", tmp.file("b.csv"), "--dim", "0",
                     "--output", tmp.file("b.json")})
                .code == 0);
    auto r = run_cli({"compare", "--a", tmp.file("a.json"), "--b",
                      tmp.file("b.json"), "--method", "permutation",
                      "--output", tmp.file("c.json")});
    CHECK(r.code == 2);
    CHECK(r.err.find("tied") != std::string::npos);
}

TEST_CASE("compare validates method, sequence, and series flags") {
    TempDir tmp;
    write_file(tmp.file("pts.csv"), kSquareCsv);
    REQUIRE(run_cli({"persist", "--input", tmp.file("pts.csv"), "--dim", "1",
                     "--output", tmp.file("d.json")})
                .code == 0);
    auto base = std::vector<std::string>{"compare", "--a", tmp.file("d.json"),
                                         "--b", tmp.file("d.json"),
                                         "--output", tmp.file("c.json")};
    auto with = [&](std::initializer_list<std::string> extra) {
        auto v = base;
        v.insert(v.end(), extra);
        return run_cli(v).code;
    };
    CHECK(with({"--method", "bogus"}) == 1);
    CHECK(with({"--sequence", "bogus"}) == 1);
    CHECK(with({"--series", "bogus"}) == 1);
    CHECK(with({"--series", "legacy"}) == 0);
}

}  // TEST_SUITE
