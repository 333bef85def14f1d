#include "cuspforge/cli.hpp"

#include "cuspforge/gieseking.hpp"
#include "cuspforge/triangulation.hpp"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace cuspforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// fresh scratch directory per test case, removed on scope exit
struct ScratchDir {
    fs::path path;
    ScratchDir() {
        static std::mt19937 rng(std::random_device{}());
        path = fs::temp_directory_path() / ("cuspforge_cli_" + std::to_string(rng()));
        fs::create_directories(path);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
    int entries() const {
        int n = 0;
        for ([[maybe_unused]] const auto& e : fs::directory_iterator(path)) ++n;
        return n;
    }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(cell);
    return out;
}

constexpr double kCompleteRe = 0.5;
constexpr double kCompleteIm = 0.8660254037844386;

}  // namespace

TEST_CASE("solve reports the complete structure") {
    RunResult r = run({"solve", "--manifold", "gieseking"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());

    json j = json::parse(r.out);
    CHECK(j["schema_version"] == 1);
    CHECK(j["manifold"] == "gieseking");
    CHECK(j["tetrahedra"] == 1);
    CHECK(j["target"]["type"] == "complete");
    CHECK(j["target"]["fillings"].empty());

    REQUIRE(j["shapes"].size() == 1);
    CHECK(std::abs(j["shapes"][0]["re"].get<double>() - kCompleteRe) < 1e-10);
    CHECK(std::abs(j["shapes"][0]["im"].get<double>() - kCompleteIm) < 1e-10);
    CHECK(j["residual_norm"].get<double>() < 1e-11);
    CHECK(j["iterations"].get<int>() >= 0);

    REQUIRE(j["cusps"].size() == 1);
    const json& cusp = j["cusps"][0];
    CHECK(cusp["name"] == "cusp0");
    CHECK(cusp["klein"] == true);
    CHECK(cusp["p"].is_null());
    CHECK(cusp["q"].is_null());
    CHECK(cusp["infinite"] == true);
    // both peripheral logs vanish at the complete structure
    CHECK(std::abs(cusp["log_l"]["re"].get<double>()) < 1e-10);
    CHECK(std::abs(cusp["log_l"]["im"].get<double>()) < 1e-10);
    CHECK(std::abs(cusp["log_m"]["re"].get<double>()) < 1e-10);
    CHECK(std::abs(cusp["log_m"]["im"].get<double>()) < 1e-10);
}

TEST_CASE("solve writes output atomically and reruns byte identically") {
    ScratchDir dir;
    std::string path = dir.file("complete.json");

    RunResult first = run({"solve", "--manifold", "gieseking", "--out", path});
    REQUIRE(first.code == 0);
    CHECK(first.out.empty());
    CHECK(dir.entries() == 1);  // no .tmp residue next to the report

    std::string bytes = slurp(path);
    CHECK(json::parse(bytes)["manifold"] == "gieseking");

    RunResult second = run({"solve", "--manifold", "gieseking", "--out", path});
    REQUIRE(second.code == 0);
    CHECK(slurp(path) == bytes);

    // stdout and file forms carry the same bytes
    RunResult streamed = run({"solve", "--manifold", "gieseking"});
    CHECK(streamed.out == bytes);
}

TEST_CASE("solve honours dehn filling targets") {
    RunResult r = run({"solve", "--manifold", "gieseking", "--target", "dehn", "cusp0=0,6"});
    REQUIRE(r.code == 0);

    json j = json::parse(r.out);
    CHECK(j["target"]["type"] == "dehn");
    REQUIRE(j["target"]["fillings"].size() == 1);
    CHECK(j["target"]["fillings"][0]["cusp"] == "cusp0");
    CHECK(j["target"]["fillings"][0]["p"].get<double>() == 0.0);
    CHECK(j["target"]["fillings"][0]["q"].get<double>() == 6.0);
    CHECK(j["target"]["fillings"][0]["infinite"] == false);

    const json& cusp = j["cusps"][0];
    CHECK(cusp["infinite"] == false);
    CHECK(std::abs(cusp["p"].get<double>()) < 1e-10);
    CHECK(std::abs(cusp["q"].get<double>() - 6.0) < 1e-9);
    CHECK(j["residual_norm"].get<double>() < 1e-11);
    CHECK(j["shapes"][0]["im"].get<double>() > 0.0);

    // a large coefficient stays close to the complete shape
    RunResult far = run({"solve", "--manifold", "gieseking", "--target", "dehn", "cusp0=0,1000"});
    REQUIRE(far.code == 0);
    json jf = json::parse(far.out);
    CHECK(std::abs(jf["shapes"][0]["re"].get<double>() - kCompleteRe) < 0.05);
    CHECK(std::abs(jf["shapes"][0]["im"].get<double>() - kCompleteIm) < 0.05);

    // "inf" marks the cusp unfilled, which is the complete structure again
    RunResult open = run({"solve", "--manifold", "gieseking", "--target", "dehn", "cusp0=inf"});
    REQUIRE(open.code == 0);
    json jo = json::parse(open.out);
    CHECK(jo["target"]["fillings"][0]["infinite"] == true);
    CHECK(std::abs(jo["shapes"][0]["re"].get<double>() - kCompleteRe) < 1e-10);
}

TEST_CASE("solve rejects bad invocations without touching the output file") {
    ScratchDir dir;

    RunResult missing = run({"solve", "--tri", dir.file("nope.json")});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("cannot open") != std::string::npos);
    CHECK(missing.out.empty());

    RunResult unknown = run({"solve", "--manifold", "weeks", "--out", dir.file("w.json")});
    CHECK(unknown.code == 1);
    CHECK(unknown.err.find("input error") != std::string::npos);
    CHECK(dir.entries() == 0);  // neither the report nor a temp file appeared

    RunResult neither = run({"solve"});
    CHECK(neither.code == 1);
    CHECK(neither.err.find("--tri") != std::string::npos);

    RunResult both = run({"solve", "--tri", "a.json", "--manifold", "gieseking"});
    CHECK(both.code == 1);
    CHECK(!both.err.empty());

    for (const char* target : {"banana", "dehn"}) {
        RunResult bad = run({"solve", "--manifold", "gieseking", "--target", target});
        CHECK(bad.code == 1);
        CHECK(!bad.err.empty());
    }
    RunResult half = run({"solve", "--manifold", "gieseking", "--target", "dehn", "cusp0=1"});
    CHECK(half.code == 1);
    RunResult ghost = run({"solve", "--manifold", "gieseking", "--target", "dehn", "nosuch=1,2"});
    CHECK(ghost.code == 1);

    // a Klein bottle cusp only fills along (0, q)
    RunResult tilted = run({"solve", "--manifold", "gieseking", "--target", "dehn", "cusp0=1,6"});
    CHECK(tilted.code == 1);
    CHECK(tilted.err.find("input error") != std::string::npos);
}

TEST_CASE("solver tolerance follows the environment override") {
    setenv("CUSPFORGE_TOL", "1e-30", 1);
    RunResult unreachable = run({"solve", "--manifold", "gieseking"});
    unsetenv("CUSPFORGE_TOL");
    CHECK(unreachable.code == 2);
    CHECK(unreachable.err.find("solver failure") != std::string::npos);

    setenv("CUSPFORGE_TOL", "pumpkin", 1);
    RunResult warned = run({"solve", "--manifold", "gieseking"});
    unsetenv("CUSPFORGE_TOL");
    CHECK(warned.code == 0);
    CHECK(warned.err.find("warning") != std::string::npos);
    CHECK(json::parse(warned.out)["residual_norm"].get<double>() < 1e-11);
}

TEST_CASE("sweep emits the deformation table") {
    ScratchDir dir;
    std::string path = dir.file("sweep.csv");
    RunResult r = run({"sweep", "--samples", "11", "--out", path});
    REQUIRE(r.code == 0);

    std::vector<std::string> rows = split_lines(slurp(path));
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == "t,w_re,w_im,x_re,x_im,tau,type,cone_angle,sing_length,p,q,residual_norm");

    struct Row {
        double t, w_re, w_im, x_re, x_im, tau, cone, len, p, q, residual;
        std::string type;
    };
    std::vector<Row> table;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> f = split_csv(rows[i]);
        REQUIRE(f.size() == 12);
        table.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]),
                         std::stod(f[4]), std::stod(f[5]), std::stod(f[7]), std::stod(f[8]),
                         std::stod(f[9]), std::stod(f[10]), std::stod(f[11]), f[6]});
    }

    for (std::size_t i = 0; i < table.size(); ++i) {
        const Row& row = table[i];
        double expected_t = -1.0 + 2.0 * (i + 1) / 12.0;
        CHECK(std::abs(row.t - expected_t) < 1e-15);
        // every sample sits on the geometric locus
        cx w(row.w_re, row.w_im);
        CHECK(std::abs(std::abs(w * (1.0 + w)) - 1.0) < 1e-9);
        CHECK(std::abs(std::abs(cx(row.x_re - 1.0, row.x_im)) - 1.0) < 1e-9);
        CHECK(row.residual < 1e-10);
        if (row.t != 0.0) {
            CHECK(row.type == "typeI");
            CHECK(row.cone > 0.0);
            CHECK(row.len > 0.0);
            CHECK(std::abs(row.p) < 1e-8);
            CHECK(std::abs(row.q * row.t - 1.0) < 1e-8);
        }
    }

    // middle sample is the complete structure
    const Row& mid = table[5];
    CHECK(mid.t == 0.0);
    CHECK(mid.type == "parabolic");
    CHECK(std::abs(mid.w_re + 0.5) < 1e-12);
    CHECK(std::abs(mid.w_im - kCompleteIm) < 1e-12);
    CHECK(std::abs(mid.tau + 2.0) < 1e-9);
    CHECK(std::isinf(mid.p));
    CHECK(std::isinf(mid.q));

    // the two halves fold onto each other: same character, reflected shape
    for (std::size_t i = 0; i < table.size(); ++i) {
        const Row& a = table[i];
        const Row& b = table[table.size() - 1 - i];
        CHECK(std::abs(a.t + b.t) < 1e-15);
        CHECK(std::abs(a.x_re - b.x_re) < 1e-9);
        CHECK(std::abs(a.x_im - b.x_im) < 1e-9);
        CHECK(std::abs(a.tau - b.tau) < 1e-9);
        CHECK(std::abs(a.w_re + 1.0 + b.w_re) < 1e-9);
        CHECK(std::abs(a.w_im - b.w_im) < 1e-9);
    }

    // reruns are byte identical
    std::string again = dir.file("sweep2.csv");
    RunResult r2 = run({"sweep", "--samples", "11", "--out", again});
    REQUIRE(r2.code == 0);
    CHECK(slurp(again) == slurp(path));
}

TEST_CASE("sweep validates its arguments") {
    RunResult even = run({"sweep", "--samples", "4"});
    CHECK(even.code == 0);  // even counts just skip the exact middle row
    CHECK(split_lines(even.out).size() == 5);

    RunResult few = run({"sweep", "--samples", "2"});
    CHECK(few.code == 1);
    CHECK(few.err.find("--samples") != std::string::npos);

    RunResult other = run({"sweep", "--manifold", "figure8"});
    CHECK(other.code == 1);
    CHECK(other.err.find("gieseking") != std::string::npos);
}

TEST_CASE("classify reads trace invariant pairs") {
    RunResult cusp = run({"classify", "--traces", "0,0"});
    REQUIRE(cusp.code == 0);
    CHECK(cusp.out.find("parabolic") != std::string::npos);
    CHECK(cusp.out.find("cusp") != std::string::npos);

    // 4 sinh^2(0.3) and -4 sin^2(0.25) pin l = 0.3, alpha = 0.5
    RunResult one = run({"classify", "--traces",
                         "0.37093043648453533,-0.2448348762192546", "--json"});
    REQUIRE(one.code == 0);
    json j1 = json::parse(one.out);
    CHECK(j1["type"] == "typeI");
    CHECK(j1["degenerate"] == false);
    CHECK(j1["tau"].is_null());
    CHECK(j1["alpha_mirror"].is_null());
    CHECK(std::abs(j1["l"].get<double>() - 0.3) < 1e-12);
    CHECK(std::abs(j1["alpha"].get<double>() - 0.5) < 1e-12);
    CHECK(j1["completion"]["kind"] == "solid_klein_bottle");
    CHECK(std::abs(j1["completion"]["cone_angle"].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(j1["completion"]["length"].get<double>() - 0.3) < 1e-12);

    // -4 sin^2(0.25) and 4 sinh^2(0.35) pin alpha = 0.25, l = 0.7
    RunResult two = run({"classify", "--traces",
                         "-0.2448348762192546,0.510338011261886", "--json"});
    REQUIRE(two.code == 0);
    json j2 = json::parse(two.out);
    CHECK(j2["type"] == "typeII");
    CHECK(std::abs(j2["l"].get<double>() - 0.7) < 1e-12);
    CHECK(std::abs(j2["alpha"].get<double>() - 0.25) < 1e-12);
    // traces cannot split the two lifts, so the partner angle rides along
    CHECK(std::abs(j2["alpha_mirror"].get<double>() - (M_PI - 0.25)) < 1e-12);
    CHECK(j2["completion"]["kind"] == "disc_orbi_bundle");
    CHECK(std::abs(j2["completion"]["cone_angle"].get<double>() - 0.5) < 1e-12);
    CHECK(std::abs(j2["completion"]["length"].get<double>() - 0.35) < 1e-12);

    RunResult text = run({"classify", "--traces", "0.37093043648453533,-0.2448348762192546"});
    REQUIRE(text.code == 0);
    CHECK(text.out.find("type I") != std::string::npos);
    CHECK(text.out.find("solid Klein bottle") != std::string::npos);

    for (const char* traces : {"1,1", "0.37093043648453533,0.510338011261886"}) {
        RunResult sick = run({"classify", "--traces", traces});
        CHECK(sick.code == 3);
        CHECK(sick.err.find("no consistent classification") != std::string::npos);
    }
}

TEST_CASE("classify reads character values") {
    RunResult complete = run({"classify", "--x", "1.5,0.8660254037844386", "--json"});
    REQUIRE(complete.code == 0);
    json jc = json::parse(complete.out);
    CHECK(jc["type"] == "parabolic");
    CHECK(jc["degenerate"] == false);
    CHECK(std::abs(jc["commutator_trace"].get<double>() + 2.0) < 1e-12);
    CHECK(jc["tau"].is_number());
    CHECK(jc["completion"]["kind"] == "cusp");

    // x = 1/2 + i sqrt(3)/2 lies on the circle and lifts to a type II group
    RunResult disc = run({"classify", "--x", "0.5,0.8660254037844386", "--json"});
    REQUIRE(disc.code == 0);
    json jd = json::parse(disc.out);
    CHECK(jd["type"] == "typeII");
    CHECK(std::abs(jd["commutator_trace"].get<double>() + 4.0) < 1e-9);
    CHECK(std::abs(jd["alpha"].get<double>() - M_PI / 4.0) < 1e-7);
    CHECK(std::abs(jd["l"].get<double>() - 2.0 * std::asinh(std::sqrt(3.0))) < 1e-7);
    CHECK(jd["alpha_mirror"].is_null());  // the reconstruction fixes the lift
    CHECK(jd["completion"]["kind"] == "disc_orbi_bundle");

    // digits truncated on the command line still land on the circle
    RunResult coarse = run({"classify", "--x", "0.5,0.866"});
    REQUIRE(coarse.code == 0);
    CHECK(coarse.out.find("type II") != std::string::npos);

    RunResult reducible = run({"classify", "--x", "2,0"});
    CHECK(reducible.code == 3);
    CHECK(reducible.err.find("reducible") != std::string::npos);

    RunResult off = run({"classify", "--x", "5,5"});
    CHECK(off.code == 1);
    CHECK(off.err.find("circle") != std::string::npos);
}

TEST_CASE("classify wants exactly one input form") {
    RunResult none = run({"classify"});
    CHECK(none.code == 1);

    RunResult both = run({"classify", "--traces", "0,0", "--x", "1.5,0.866"});
    CHECK(both.code == 1);

    RunResult lone = run({"classify", "--traces", "1"});
    CHECK(lone.code == 1);

    RunResult words = run({"classify", "--traces", "a,b"});
    CHECK(words.code == 1);
}

TEST_CASE("verify reports the structural invariants") {
    RunResult r = run({"verify", "--manifold", "gieseking"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("tetrahedra: 1") != std::string::npos);
    CHECK(r.out.find("orientable: no") != std::string::npos);
    CHECK(r.out.find("edge cycles: 1 (lengths: 6)") != std::string::npos);
    CHECK(r.out.find("cusp0: Klein bottle, curves: l m") != std::string::npos);
    CHECK(r.out.find("double cover: 2 tetrahedra, 1 torus cusp, "
                     "all face pairings orientation coherent") != std::string::npos);

    // the serialized document round-trips to the same report
    ScratchDir dir;
    std::string path = dir.file("gieseking.json");
    std::ofstream(path) << serialize(gieseking_triangulation());
    RunResult file = run({"verify", "--tri", path});
    REQUIRE(file.code == 0);
    CHECK(file.out == r.out);
}

TEST_CASE("verify names the violated invariant") {
    ScratchDir dir;
    json doc = json::parse(serialize(gieseking_triangulation()));
    std::swap(doc["gluings"][0]["vertex_map"][0], doc["gluings"][0]["vertex_map"][1]);
    std::string path = dir.file("broken.json");
    std::ofstream(path) << doc.dump();

    RunResult r = run({"verify", "--tri", path});
    CHECK(r.code == 1);
    CHECK(r.err.find("invariant violated") != std::string::npos);

    std::string junk = dir.file("junk.json");
    std::ofstream(junk) << "not a document";
    RunResult parse = run({"verify", "--tri", junk});
    CHECK(parse.code == 1);
    CHECK(parse.err.find("input error") != std::string::npos);
}

TEST_CASE("top level dispatch") {
    RunResult help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("solve") != std::string::npos);
    CHECK(help.out.find("classify") != std::string::npos);

    RunResult bare = run({});
    CHECK(bare.code == 1);

    RunResult unknown = run({"frobnicate"});
    CHECK(unknown.code == 1);
}
