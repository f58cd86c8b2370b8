#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cfrg/errors.hpp"
#include "cfrg/field_io.hpp"
#include "cfrg/sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string cli_binary() {
    const char* p = std::getenv("CFRG_CLI");
    if (!p || !*p) throw std::runtime_error("CFRG_CLI is not set");
    return p;
}

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path d = fs::temp_directory_path() /
                 ("cfrg-cli-" + std::to_string(::getpid()) + "-" + tag + "-" +
                  std::to_string(counter++));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = cli_binary() + " " + args + " > " + out_file.string() + " 2> " +
                            err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    res.out = slurp(out_file);
    res.err = slurp(err_file);
    return res;
}

fs::path write_config(const fs::path& dir, const json& j) {
    const fs::path p = dir / "config.json";
    std::ofstream out(p, std::ios::binary);
    out << j.dump(2) << "\n";
    return p;
}

json base_config() {
    json j;
    j["schema"] = "cfrg-config/1";
    j["seed"] = 7;
    j["lattice"] = {{"n", 16}, {"length", 1.0}};
    j["background"] = {{"mode", "flat"}, {"r", 0.0}};
    return j;
}

/// Constant TT tensor diag(1/3, 1/3, -2/3): sigma^2 is exactly 2/3.
json third_sigma() {
    json s;
    s["constant"] = {{"xx", 1.0 / 3.0}, {"yy", 1.0 / 3.0}, {"zz", -2.0 / 3.0}};
    return s;
}

json wave_sigma() {
    json s = third_sigma();
    s["modes"] = json::array();
    json m;
    m["k"] = {1, 0, 0};
    m["eps"] = {{"yz", 0.25}};
    s["modes"].push_back(m);
    return s;
}

json load_report(const fs::path& out_dir) {
    std::ifstream in(out_dir / "report.json");
    REQUIRE(in.good());
    return json::parse(in);
}

} // namespace

TEST_CASE("solve command writes an exact closed-form report") {
    fs::path dir = fresh_dir("solve");
    json cfg = base_config();
    cfg["sigma"] = third_sigma();
    cfg["tau"] = 1.0;
    cfg["solver"] = {{"method", "monotone"}};
    cfg["output"] = {{"dump_fields", true}, {"csv_slice", 0}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("solve --config " + cp.string() + " --out " + (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);
    CHECK(res.out.find("solve:") != std::string::npos);
    CHECK(res.out.find("converged=1") != std::string::npos);

    json rep = load_report(dir / "out");
    CHECK(rep["schema"] == "cfrg-report/1");
    CHECK(rep["command"] == "solve");
    CHECK(rep["solve"]["converged"] == true);
    CHECK(rep["solve"]["residual_max"] == 0.0);
    CHECK(rep["solve"]["phi_min"] == 1.0);
    CHECK(rep["solve"]["phi_max"] == 1.0);
    CHECK(rep["class"]["yamabe"] == "0");
    CHECK(rep["class"]["sigma2_zero"] == false);

    // Field dump round-trips to the constant solution.
    cfrg::ScalarField phi = cfrg::load_scalar_field(dir / "out" / "phi.bin");
    CHECK(phi.min() == 1.0);
    CHECK(phi.max() == 1.0);
    CHECK(fs::exists(dir / "out" / "sigma.bin"));
    CHECK(fs::exists(dir / "out" / "phi_slice.csv"));
}

TEST_CASE("manifest lists every artifact with its digest") {
    fs::path dir = fresh_dir("manifest");
    json cfg = base_config();
    cfg["sigma"] = third_sigma();
    cfg["tau"] = 1.0;
    cfg["output"] = {{"dump_fields", true}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("solve --config " + cp.string() + " --out " + (dir / "out").string(),
                            dir);
    REQUIRE(res.code == 0);

    std::ifstream min(dir / "out" / "manifest.json");
    REQUIRE(min.good());
    json manifest = json::parse(min);
    CHECK(manifest["schema"] == "cfrg-manifest/1");
    REQUIRE(manifest["files"].contains("report.json"));
    REQUIRE(manifest["files"].contains("phi.bin"));
    CHECK_FALSE(manifest["files"].contains("manifest.json"));
    for (const auto& [name, digest] : manifest["files"].items()) {
        CHECK(digest.get<std::string>() == cfrg::sha256_file(dir / "out" / name));
    }
}

TEST_CASE("obstructed data is refused with exit 2 and a reason") {
    fs::path dir = fresh_dir("refuse");
    json cfg = base_config();
    cfg["background"] = {{"mode", "flat"}, {"r", 1.0}};
    cfg["tau"] = 1.0;
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("solve --config " + cp.string() + " --out " + (dir / "out").string(),
                            dir);
    CHECK(res.code == 2);
    CHECK(res.err.find("refusing to solve") != std::string::npos);
    CHECK(res.err.find("strictly positive") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "out" / "report.json"));
}

TEST_CASE("table command matches all twelve cells") {
    fs::path dir = fresh_dir("table");
    fs::path cp = write_config(dir, base_config());

    CliResult res = run_cli("table --config " + cp.string() + " --out " + (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);
    CHECK(res.out.find("table:") != std::string::npos);

    json rep = load_report(dir / "out");
    CHECK(rep["command"] == "table");
    CHECK(rep["all_match"] == true);
    REQUIRE(rep["cells"].size() == 12);
    for (const json& cell : rep["cells"]) {
        CHECK(cell["match"] == true);
        CHECK(cell["observed"] == cell["expected"]);
    }
}

TEST_CASE("sweep writes a csv grid and is thread-count invariant") {
    fs::path dir = fresh_dir("sweep");
    json cfg = base_config();
    cfg["sweep"] = {{"c1", 2.0}, {"c2", 2.0}, {"samples_per_axis", 3}};
    fs::path cp = write_config(dir, cfg);

    CliResult one = run_cli("sweep --config " + cp.string() + " --threads 1 --out " +
                                (dir / "a").string(),
                            dir);
    CliResult four = run_cli("sweep --config " + cp.string() + " --threads 4 --out " +
                                 (dir / "b").string(),
                             dir);
    CHECK(one.code == 0);
    CHECK(four.code == 0);

    json rep = load_report(dir / "a");
    CHECK(rep["failures"] == 0);
    CHECK(rep["barrier_violated"] == false);
    REQUIRE(rep["samples"].size() == 9);

    const std::string csv = slurp(dir / "a" / "sweep.csv");
    CHECK(csv.rfind("s,t2,min_phi,max_phi,iterations,converged\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);

    // Thread count must not leak into any byte of the artifacts.
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
}

TEST_CASE("reruns are byte-identical") {
    fs::path dir = fresh_dir("rerun");
    json cfg = base_config();
    cfg["sigma"] = wave_sigma();
    cfg["tau"] = 0.8;
    cfg["solver"] = {{"method", "newton"}};
    fs::path cp = write_config(dir, cfg);

    CliResult a = run_cli("solve --config " + cp.string() + " --out " + (dir / "a").string(),
                          dir);
    CliResult b = run_cli("solve --config " + cp.string() + " --out " + (dir / "b").string(),
                          dir);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
}

TEST_CASE("liouville command reports finite increasing radii") {
    fs::path dir = fresh_dir("liouville");
    json cfg = base_config();
    cfg["liouville"] = {{"k_values", {1.0, 4.0}}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("liouville --config " + cp.string() + " --out " +
                                (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);

    json rep = load_report(dir / "out");
    CHECK(rep["all_increasing_with_finite_radii"] == true);
    REQUIRE(rep["rows"].size() == 2);
    const auto& radii = rep["rows"][0]["radii"];
    CHECK(radii[0].get<double>() < radii[1].get<double>());
    CHECK(radii[1].get<double>() < radii[2].get<double>());
    // radius scaling: k = 4 halves every radius of k = 1.
    const double r1 = rep["rows"][0]["radii"][2].get<double>();
    const double r4 = rep["rows"][1]["radii"][2].get<double>();
    CHECK(std::abs(r4 - 0.5 * r1) <= 1e-6);
}

TEST_CASE("yamabe command reports the flat eigenvalue") {
    fs::path dir = fresh_dir("yamabe");
    json cfg = base_config();
    cfg["background"] = {{"mode", "flat"}, {"r", 1.0}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("yamabe --config " + cp.string() + " --out " + (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);
    json rep = load_report(dir / "out");
    CHECK(rep["sign"] == "+");
    CHECK(std::abs(rep["lambda1"].get<double>() - 0.125) <= 1e-12);
}

TEST_CASE("reconstruct command certifies the constraints") {
    fs::path dir = fresh_dir("reconstruct");
    json cfg = base_config();
    cfg["sigma"] = wave_sigma();
    cfg["tau"] = 0.8;
    cfg["solver"] = {{"method", "newton"}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("reconstruct --config " + cp.string() + " --out " +
                                (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);
    json rep = load_report(dir / "out");
    CHECK(rep["solve"]["converged"] == true);
    CHECK(rep["hamiltonian_max"].get<double>() <= 1e-7);
    CHECK(rep["momentum_max"].get<double>() <= 1e-6);
    CHECK(rep["trace_k_dev"].get<double>() <= 1e-12);
}

TEST_CASE("converge command flags the constant study as exact") {
    fs::path dir = fresh_dir("converge");
    json cfg = base_config();
    cfg["converge"] = {{"kind", "constant"}, {"n_values", {16, 32, 64}}};
    fs::path cp = write_config(dir, cfg);

    CliResult res = run_cli("converge --config " + cp.string() + " --out " +
                                (dir / "out").string(),
                            dir);
    CHECK(res.code == 0);
    json rep = load_report(dir / "out");
    CHECK(rep["exact"] == true);
}

TEST_CASE("argument and configuration failures use the documented exit codes") {
    fs::path dir = fresh_dir("errors");

    CliResult missing = run_cli("solve --config " + (dir / "nope.json").string(), dir);
    CHECK(missing.code == 5);

    std::ofstream(dir / "broken.json") << "{ not json";
    CliResult broken = run_cli("solve --config " + (dir / "broken.json").string(), dir);
    CHECK(broken.code == 2);

    json wrong = base_config();
    wrong["schema"] = "cfrg-config/999";
    fs::path wp = write_config(dir, wrong);
    CliResult schema = run_cli("solve --config " + wp.string(), dir);
    CHECK(schema.code == 2);

    fs::path cp = write_config(fresh_dir("errors2"), base_config());
    CliResult nosub = run_cli("--config " + cp.string(), dir);
    CHECK(nosub.code == 2);
    CliResult badsub = run_cli("frobnicate --config " + cp.string(), dir);
    CHECK(badsub.code == 2);
    CliResult noconf = run_cli("solve", dir);
    CHECK(noconf.code == 2);
}
