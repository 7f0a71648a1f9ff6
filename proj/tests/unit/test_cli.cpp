#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kez/cli.hpp"

using namespace kez;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int rc;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int rc = run_cli(args, o, e);
    return {rc, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("kez_cli_" + name);
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<json> manifests(const fs::path& dir) {
    std::vector<json> v;
    std::ifstream in(dir / "manifest.jsonl");
    std::string line;
    while (std::getline(in, line)) v.push_back(json::parse(line));
    return v;
}

}  // namespace

TEST_CASE("dispatch table reaches every public operation") {
    const std::set<std::string> required{
        "log_gamma", "eval", "restrict_to_line", "zeros_and_poles_in_strip",
        "stereo_to_sphere", "sphere_to_stereo", "chordal", "green", "config_energy", "sample_uniform",
        "selberg_gamma_product", "pn_minimal_Z", "p1_three_point_Z", "circular_Z", "gaussian_det_Z", "zero_free_in_tube",
        "weight_condition", "gamma_threshold", "classify", "lct_point_divisor",
        "mc_selberg", "mc_sphere_partition", "mc_circular", "mc_gaussian_det", "mc_gaussian_det_ratio", "free_energy_curve",
        "log_target", "run_chain", "mean_energy_estimate", "marginal_histogram", "ks_against",
        "reduced_laplacian", "solve_mean_field", "free_energy_functional", "solve_poisson", "phi_N_approximant",
        "calibrate_laplacian", "verify"};
    std::set<std::string> covered;
    std::set<std::pair<std::string, std::string>> seen;
    for (auto& e : dispatch_table()) {
        covered.insert(e.covers.begin(), e.covers.end());
        CHECK_MESSAGE(seen.insert({e.command, e.op}).second, e.command << " " << e.op);
    }
    for (auto& r : required) CHECK_MESSAGE(covered.count(r) == 1, "not reachable: " << r);

    std::set<std::string> without_examples;
    int idx = 0;
    for (auto& e : dispatch_table()) {
        if (e.examples.empty()) without_examples.insert(e.command + " " + e.op);
        for (auto args : e.examples) {
            const fs::path d = scratch("example" + std::to_string(idx++));
            args.push_back("--out");
            args.push_back(d.string());
            const Run r = cli(args);
            const int expected = e.command == "verify" ? exit_code::mismatch : exit_code::ok;  // the gate has a known red
            CHECK_MESSAGE(r.rc == expected, e.command << " " << e.op << ": " << r.err);
            const auto m = manifests(d);
            REQUIRE(m.size() == 1);
            CHECK(m[0]["op"] == e.op);
            for (auto& f : m[0]["outputs"]) CHECK(fs::exists(d / f.get<std::string>()));
            fs::remove_all(d);
        }
    }
    // exercised from files below; the full suite runs as its own test
    CHECK(without_examples == std::set<std::string>{"oracle laplacian", "oracle free-energy", "verify full"});
}

TEST_CASE("file-driven oracle operations") {
    const fs::path d = scratch("files");
    REQUIRE(cli({"oracle", "poisson", "--grid", "400", "--out", d.string()}).rc == 0);
    const Run l = cli({"oracle", "laplacian", "--input", (d / "phi.csv").string()});
    CHECK(l.rc == 0);
    REQUIRE(cli({"oracle", "meanfield", "--w", "0.5", "--grid", "400", "--out", (d / "mf").string()}).rc == 0);
    const Run f = cli({"oracle", "free-energy", "--w", "0.5", "--input", (d / "mf" / "mu.csv").string()});
    REQUIRE(f.rc == 0);
    const double fe = json::parse(f.out)["result"]["free_energy"].get<double>();
    CHECK(fe == doctest::Approx(manifests(d / "mf")[0]["result"]["free_energy"].get<double>()).epsilon(1e-9));
    CHECK(cli({"oracle", "laplacian", "--input", (d / "missing.csv").string()}).rc == exit_code::validation);
    fs::remove_all(d);
}

TEST_CASE("command results") {
    SUBCASE("stability verdict") {
        const Run r = cli({"stability", "--w", "0.5,0.5,0.5"});
        REQUIRE(r.rc == 0);
        CHECK(json::parse(r.out)["result"]["kind"] == "GibbsStable");
        CHECK(json::parse(cli({"stability", "--w", "0.9,0.2"}).out)["result"]["kind"] == "NotGibbsStable");
    }
    SUBCASE("circular closed form at full precision") {
        const Run r = cli({"zeta", "--family", "circular", "--n", "3", "--beta", "1"});
        REQUIRE(r.rc == 0);
        const auto j = json::parse(r.out)["result"];
        const double v = std::stod(j["value"].get<std::string>());
        CHECK(std::abs(v - 48 * std::numbers::pi * std::numbers::pi) < 1e-12 * v);
        CHECK(j["value"].get<std::string>().size() >= 17);
    }
    SUBCASE("pole evaluation") {
        const auto j = json::parse(cli({"zeta", "--family", "p1_three_point", "--beta", "-2/3"}).out)["result"];
        CHECK(j["kind"] == "pole");
    }
}

TEST_CASE("exit codes and no output on refusal") {
    const fs::path d = scratch("refuse");
    CHECK(cli({"stability", "--w", "0.5,,0.5", "--out", d.string()}).rc == exit_code::validation);
    CHECK(cli({"stability", "--w", "0.5,abc", "--out", d.string()}).rc == exit_code::validation);
    CHECK(cli({"mc", "--samples", "ten", "--out", d.string()}).rc == exit_code::validation);
    CHECK(cli({"zeta", "frobnicate", "--out", d.string()}).rc == exit_code::validation);
    CHECK(cli({"nosuch"}).rc == exit_code::validation);
    CHECK(cli({"mc", "sphere", "--n", "3", "--beta", "-1", "--out", d.string()}).rc == exit_code::stability);
    CHECK(cli({"sample", "--n", "3", "--beta", "-1", "--out", d.string()}).rc == exit_code::stability);
    CHECK(cli({"oracle", "--w", "0.5", "--max-newton", "1", "--out", d.string()}).rc == exit_code::convergence);
    CHECK_FALSE(fs::exists(d));
    // tampered Laplacian constant: calibration reports a mismatch
    const Run t = cli({"oracle", "calibrate", "--c-lap", "0.5"});
    CHECK(t.rc == exit_code::mismatch);
    CHECK(json::parse(t.out)["result"]["pass"] == false);
    CHECK(cli({"--help"}).rc == 0);
}

TEST_CASE("config file and flag precedence") {
    const fs::path d = scratch("config");
    fs::create_directories(d);
    const fs::path cfg = d / "cfg.json";
    std::ofstream(cfg) << R"({"op": "value", "family": "circular", "n": 3, "beta": "2"})";
    const auto val = [](const Run& r) { return std::stod(json::parse(r.out)["result"]["value"].get<std::string>()); };
    const Run from_file = cli({"zeta", "--config", cfg.string()});
    REQUIRE(from_file.rc == 0);
    const Run overridden = cli({"zeta", "--config", cfg.string(), "--beta", "1"});
    REQUIRE(overridden.rc == 0);
    CHECK(std::abs(val(overridden) - 48 * std::numbers::pi * std::numbers::pi) < 1e-9);
    CHECK(val(from_file) != doctest::Approx(val(overridden)));
    std::ofstream(d / "bad.json") << R"({"family": "circular", "colour": 3})";
    CHECK(cli({"zeta", "--config", (d / "bad.json").string()}).rc == exit_code::validation);
    std::ofstream(d / "broken.json") << "{ not json";
    CHECK(cli({"zeta", "--config", (d / "broken.json").string()}).rc == exit_code::validation);
    fs::remove_all(d);
}

TEST_CASE("manifests append and reproduce") {
    const fs::path d = scratch("append");
    const std::vector<std::string> args{"mc", "circular", "--n", "3", "--samples", "5000", "--seed", "9", "--workers", "2", "--out", d.string()};
    REQUIRE(cli(args).rc == 0);
    const std::string first_csv = slurp(d / "estimate.csv");
    REQUIRE(cli(args).rc == 0);
    auto m = manifests(d);
    REQUIRE(m.size() == 2);
    for (auto& x : m) x.erase("wall_clock_seconds");
    CHECK(m[0] == m[1]);
    CHECK(slurp(d / "estimate.csv") == first_csv);
    CHECK(m[0]["schema"] == kManifestSchema);
    fs::remove_all(d);
}

TEST_CASE("verify quick is deterministic and isolates a tampered constant") {
    const fs::path a = scratch("verify_a"), b = scratch("verify_b"), c = scratch("verify_c");
    cli({"verify", "quick", "--out", a.string()});
    cli({"verify", "quick", "--out", b.string()});
    CHECK(slurp(a / "verify_report.json") == slurp(b / "verify_report.json"));
    CHECK(slurp(a / "verify_report.txt") == slurp(b / "verify_report.txt"));
    cli({"verify", "quick", "--c-lap", "0.9", "--out", c.string()});
    const auto good = json::parse(slurp(a / "verify_report.json"))["criteria"];
    const auto bad = json::parse(slurp(c / "verify_report.json"))["criteria"];
    REQUIRE(good.size() == bad.size());
    for (std::size_t k = 0; k < good.size(); ++k) {
        const std::string id = good[k]["id"];
        if (id == "C0" || id == "11") {
            CHECK(good[k]["pass"] == true);
            CHECK(bad[k]["pass"] == false);
        } else {
            CHECK_MESSAGE(good[k]["pass"] == bad[k]["pass"], id);
        }
    }
    for (auto& p : {a, b, c}) fs::remove_all(p);
}
