#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cfrg/errors.hpp"
#include "cfrg/run.hpp"

namespace {

int env_threads() {
    const char* v = std::getenv("CFRG_THREADS");
    if (!v || !*v) return 1;
    char* end = nullptr;
    long n = std::strtol(v, &end, 10);
    if (!end || *end != '\0' || n < 1 || n > 1024) return 1;
    return static_cast<int>(n);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint-equation laboratory on the periodic 3-torus"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool verbose = false;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--out", out_dir, "directory for reports and field dumps");
    app.add_option("--threads", threads, "worker threads for sweeps (default CFRG_THREADS or 1)");
    app.add_flag("--verbose", verbose, "print the full report to stdout");

    static const char* commands[] = {"solve",     "sweep",       "table",  "degenerate",
                                     "liouville", "reconstruct", "yamabe", "converge"};
    static const char* descriptions[] = {
        "solve the conformal-factor equation for configured data",
        "a-priori bounds sweep over a sigma^2/tau^2 box",
        "scan all 12 solvability cells against expectations",
        "rescaling family: re-solve and compare against the scaled solution",
        "radial blow-up trajectories and exceedance radii",
        "solve, assemble (gamma, K), and evaluate constraint residuals",
        "sign of the first conformal-Laplacian eigenvalue",
        "grid refinement study"};
    for (size_t i = 0; i < 8; ++i) app.add_subcommand(commands[i], descriptions[i])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    cfrg::RunOptions opt;
    opt.out_dir = out_dir;
    opt.threads = threads >= 1 ? threads : env_threads();
    opt.verbose = verbose;

    std::string command = app.get_subcommands().front()->get_name();
    try {
        cfrg::RunConfig cfg = cfrg::load_config(config_path);
        return cfrg::run_command(command, cfg, opt, std::cout, std::cerr);
    } catch (const cfrg::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const cfrg::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
