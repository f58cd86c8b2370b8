#include "cfrg/run.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>

#include "json.hpp"

#include "cfrg/errors.hpp"
#include "cfrg/field_io.hpp"
#include "cfrg/liouville.hpp"
#include "cfrg/operators.hpp"
#include "cfrg/reconstruct.hpp"
#include "cfrg/sha256.hpp"
#include "cfrg/yamabe.hpp"

namespace cfrg {

namespace {

using nlohmann::ordered_json;

class OutputWriter {
public:
    explicit OutputWriter(const std::string& dir) : dir_(dir) {
        if (dir_.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_ + ": " + ec.message());
    }

    bool enabled() const { return !dir_.empty(); }

    std::string path(const std::string& name) const {
        return (std::filesystem::path(dir_) / name).string();
    }

    void add_json(const std::string& name, const ordered_json& j) {
        if (!enabled()) return;
        std::ofstream out(path(name), std::ios::binary);
        if (!out) throw IoError("cannot write " + path(name));
        out << j.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + path(name));
        names_.push_back(name);
    }

    void note(const std::string& name) {
        if (enabled()) names_.push_back(name);
    }

    void finalize() {
        if (!enabled()) return;
        std::sort(names_.begin(), names_.end());
        ordered_json files = ordered_json::object();
        for (const std::string& name : names_) files[name] = sha256_file(path(name));
        ordered_json manifest;
        manifest["schema"] = "cfrg-manifest/1";
        manifest["files"] = std::move(files);
        std::ofstream out(path("manifest.json"), std::ios::binary);
        if (!out) throw IoError("cannot write " + path("manifest.json"));
        out << manifest.dump(2) << "\n";
        if (!out) throw IoError("write failed: " + path("manifest.json"));
    }

private:
    std::string dir_;
    std::vector<std::string> names_;
};

ordered_json lattice_json(const Lattice& lat) {
    return ordered_json{{"n", lat.n}, {"length", lat.length}};
}

ordered_json background_json(const ConformalBackground& bg) {
    ordered_json j;
    if (bg.is_flat()) {
        j["mode"] = "flat";
        j["r"] = bg.r_const();
    } else {
        j["mode"] = "conformally_flat";
        j["psi_min"] = bg.psi().min();
        j["psi_max"] = bg.psi().max();
    }
    return j;
}

ordered_json class_json(const ClassTag& tag) {
    return ordered_json{{"yamabe", std::string(1, sign_char(tag.sign))},
                        {"sigma2_zero", tag.sigma2_zero},
                        {"tau_zero", tag.tau_zero}};
}

ordered_json solve_json(const SolveReport& rep) {
    ordered_json j;
    j["method"] = method_name(rep.method);
    j["converged"] = rep.converged;
    j["iterations"] = rep.iterations;
    j["residual_max"] = rep.residual_max;
    j["residual_l2"] = rep.residual_l2;
    j["phi_min"] = rep.phi.min();
    j["phi_max"] = rep.phi.max();
    if (std::isfinite(rep.phi_minus)) j["phi_minus"] = rep.phi_minus;
    if (std::isfinite(rep.phi_plus)) j["phi_plus"] = rep.phi_plus;
    return j;
}

double resolve_tol(const RunConfig& cfg, const ConformalBackground& bg) {
    return cfg.solver.tol > 0.0 ? cfg.solver.tol : default_tolerance(bg);
}

double mean_of(const ScalarField& f) {
    double acc = 0.0, comp = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
        double y = f[i] - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc / static_cast<double>(f.size());
}

SolveReport solve_with_restarts(const ConformalData& data, const RunConfig& cfg, double tol,
                                int& restarts_used, std::ostream& err) {
    restarts_used = 0;
    if (cfg.solver.method == SolveMethod::Monotone)
        return solve_monotone(data, tol, cfg.solver.max_iter);
    try {
        return solve_newton(data, tol, cfg.solver.max_iter);
    } catch (const ConvergenceError& e) {
        if (cfg.solver.restarts == 0) throw;
        err << "newton stalled (" << e.what() << "); retrying from perturbed seeds\n";
    }
    double r_mean = mean_of(scalar_curvature(data.background()));
    double s_mean = data.sigma2_is_zero() ? 0.0 : mean_of(data.sigma2());
    double root = constant_root(r_mean, s_mean, data.tau() * data.tau());
    for (int r = 1; r <= cfg.solver.restarts; ++r) {
        std::mt19937 rng(cfg.seed + static_cast<unsigned>(r));
        std::uniform_real_distribution<double> shift(-0.3, 0.3);
        ScalarField phi0(data.lattice(), root * std::exp(shift(rng)));
        try {
            SolveReport rep = solve_newton(data, tol, cfg.solver.max_iter, &phi0);
            restarts_used = r;
            return rep;
        } catch (const ConvergenceError& e) {
            if (r == cfg.solver.restarts) throw;
            err << "newton restart " << r << " stalled (" << e.what() << ")\n";
        }
    }
    throw InternalError("unreachable restart exit");
}

int run_solve(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream& err) {
    ConformalData data = build_data(cfg);
    if (data.background().is_flat()) {
        ObstructionReport obs = obstruction_check(data);
        if (obs.status != Solvability::Solvable)
            throw ValidationError(std::string("refusing to solve, class is ") +
                                  solvability_name(obs.status) + ": " + obs.reason);
    }
    double tol = resolve_tol(cfg, data.background());
    int restarts_used = 0;
    SolveReport rep = solve_with_restarts(data, cfg, tol, restarts_used, err);

    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "solve";
    j["lattice"] = lattice_json(data.lattice());
    j["background"] = background_json(data.background());
    j["class"] = class_json(data.class_tag());
    j["tau"] = data.tau();
    j["tol"] = tol;
    j["solve"] = solve_json(rep);
    j["restarts_used"] = restarts_used;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    if (w.enabled() && cfg.output.dump_fields) {
        dump_field(rep.phi, w.path("phi.bin"));
        w.note("phi.bin");
        if (data.sigma()) {
            dump_field(*data.sigma(), w.path("sigma.bin"));
            w.note("sigma.bin");
        }
    }
    if (w.enabled() && cfg.output.csv_slice >= 0) {
        write_csv_slice(rep.phi, cfg.output.csv_slice, w.path("phi_slice.csv"));
        w.note("phi_slice.csv");
    }
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "solve: method=" << method_name(rep.method) << " converged=" << rep.converged
        << " iterations=" << rep.iterations << " residual_max=" << rep.residual_max << " phi=["
        << rep.phi.min() << ", " << rep.phi.max() << "]\n";
    return 0;
}

int run_yamabe(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream&) {
    ConformalBackground bg = build_background(cfg);
    YamabeReport rep = yamabe_sign(bg);

    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "yamabe";
    j["lattice"] = lattice_json(bg.lattice());
    j["background"] = background_json(bg);
    j["sign"] = std::string(1, sign_char(rep.sign));
    j["lambda1"] = rep.lambda1;
    j["quotient_at_minimizer"] = rep.quotient_at_minimizer;
    j["iterations"] = rep.iterations;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    if (w.enabled() && cfg.output.dump_fields) {
        dump_field(rep.minimizer, w.path("minimizer.bin"));
        w.note("minimizer.bin");
    }
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "yamabe: sign=" << sign_char(rep.sign) << " lambda1=" << rep.lambda1
        << " iterations=" << rep.iterations << "\n";
    return 0;
}

int run_table(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream&) {
    Lattice lat = build_lattice(cfg);
    double tol = cfg.solver.tol > 0.0 ? cfg.solver.tol : 1e-9;
    TableScanReport rep = table_scan(lat, tol, cfg.solver.max_iter);

    ordered_json cells = ordered_json::array();
    int matches = 0;
    for (const TableCell& c : rep.cells) {
        ordered_json cj;
        cj["r"] = c.r_const;
        cj["sigma_zero"] = c.sigma_zero;
        cj["tau_zero"] = c.tau_zero;
        cj["expected"] = c.expected;
        cj["observed"] = c.observed;
        cj["match"] = c.match;
        cj["detail"] = c.detail;
        if (c.expected == "SOLVABLE") {
            cj["residual_max"] = c.residual_max;
            cj["iterations"] = c.iterations;
        }
        cells.push_back(std::move(cj));
        if (c.match) ++matches;
    }
    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "table";
    j["lattice"] = lattice_json(lat);
    j["tol"] = tol;
    j["cells"] = std::move(cells);
    j["all_match"] = rep.all_match;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "table: " << matches << "/" << rep.cells.size() << " cells match\n";
    if (!rep.all_match) throw MismatchError("solvability table mismatch");
    return 0;
}

int run_sweep(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream&) {
    ConformalBackground bg = build_background(cfg);
    SymTensorField base = unit_min_tt_base(bg.lattice());
    double tol = resolve_tol(cfg, bg);
    const std::vector<double>* sv = cfg.sweep.s_values ? &*cfg.sweep.s_values : nullptr;
    const std::vector<double>* tv = cfg.sweep.t2_values ? &*cfg.sweep.t2_values : nullptr;
    SweepReport rep = bounds_sweep(bg, base, cfg.sweep.c1, cfg.sweep.c2,
                                   cfg.sweep.samples_per_axis, tol, cfg.solver.max_iter,
                                   opt.threads, sv, tv);

    ordered_json samples = ordered_json::array();
    for (const SweepSample& s : rep.samples) {
        ordered_json sj;
        sj["s"] = s.s;
        sj["t2"] = s.t2;
        sj["converged"] = s.converged;
        if (s.converged) {
            sj["min_phi"] = s.min_phi;
            sj["max_phi"] = s.max_phi;
            sj["iterations"] = s.iterations;
        } else {
            sj["error"] = s.error;
        }
        samples.push_back(std::move(sj));
    }
    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "sweep";
    j["lattice"] = lattice_json(bg.lattice());
    j["background"] = background_json(bg);
    j["c1"] = rep.c1;
    j["c2"] = rep.c2;
    j["tol"] = tol;
    j["s_values"] = rep.s_values;
    j["t2_values"] = rep.t2_values;
    j["barrier_lo"] = rep.barrier_lo;
    j["barrier_hi"] = rep.barrier_hi;
    j["global_min_phi"] = rep.global_min_phi;
    j["global_max_phi"] = rep.global_max_phi;
    j["failures"] = rep.failures;
    j["barrier_violated"] = rep.barrier_violated;
    j["samples"] = std::move(samples);

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    if (w.enabled()) {
        std::ofstream csv(w.path("sweep.csv"), std::ios::binary);
        if (!csv) throw IoError("cannot write " + w.path("sweep.csv"));
        csv << "s,t2,min_phi,max_phi,iterations,converged\n";
        csv.precision(17);
        for (const SweepSample& s : rep.samples)
            csv << s.s << "," << s.t2 << "," << s.min_phi << "," << s.max_phi << ","
                << s.iterations << "," << s.converged << "\n";
        if (!csv) throw IoError("write failed: " + w.path("sweep.csv"));
        w.note("sweep.csv");
    }
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "sweep: samples=" << rep.samples.size() << " failures=" << rep.failures << " phi=["
        << rep.global_min_phi << ", " << rep.global_max_phi << "] barriers=[" << rep.barrier_lo
        << ", " << rep.barrier_hi << "] violated=" << rep.barrier_violated << "\n";
    if (rep.failures > 0) throw ConvergenceError("sweep: some samples failed to converge");
    if (rep.barrier_violated) throw MismatchError("sweep: solution left the constant barriers");
    return 0;
}

int run_degenerate(const RunConfig& cfg, const RunOptions& opt, std::ostream& out,
                   std::ostream& err) {
    ConformalData data = build_data(cfg);
    double tol = resolve_tol(cfg, data.background());
    int restarts_used = 0;
    SolveReport base = solve_with_restarts(data, cfg, tol, restarts_used, err);
    DegenerationReport rep = degeneration_study(data, base.phi, cfg.degeneration.c_values, tol);

    ordered_json rows = ordered_json::array();
    for (const DegenerationRow& r : rep.rows) {
        ordered_json rj;
        rj["c"] = r.c;
        rj["converged"] = r.converged;
        if (r.converged) {
            rj["scale_dev"] = r.scale_dev;
            rj["min_phi_over_c"] = r.min_phi_over_c;
            rj["max_phi_over_c"] = r.max_phi_over_c;
            rj["iterations"] = r.iterations;
        } else {
            rj["error"] = r.error;
        }
        rows.push_back(std::move(rj));
    }
    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "degenerate";
    j["lattice"] = lattice_json(data.lattice());
    j["background"] = background_json(data.background());
    j["tol"] = tol;
    j["base_solve"] = solve_json(base);
    j["rows"] = std::move(rows);
    j["all_match"] = rep.all_match;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "degenerate: scales=" << rep.rows.size() << " all_match=" << rep.all_match << "\n";
    if (!rep.all_match) throw MismatchError("degenerate: rescaled solve left the scaling family");
    return 0;
}

int run_liouville(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream&) {
    ordered_json rows = ordered_json::array();
    bool all_ok = true;
    for (double k : cfg.liouville.k_values) {
        NonexistenceReport rep = nonexistence_report(k);
        ordered_json rj;
        rj["k"] = rep.k;
        rj["thresholds"] = rep.thresholds;
        rj["radii"] = rep.radii;
        rj["strictly_increasing"] = rep.strictly_increasing;
        rj["trajectory_end_r"] = rep.trajectory_end_r;
        rj["trajectory_end_u"] = rep.trajectory_end_u;
        rj["sample_count"] = rep.sample_count;
        rows.push_back(std::move(rj));
        bool finite = true;
        for (double rad : rep.radii) finite = finite && std::isfinite(rad) && rad > 0.0;
        all_ok = all_ok && rep.strictly_increasing && finite;
    }
    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "liouville";
    j["rows"] = std::move(rows);
    j["all_increasing_with_finite_radii"] = all_ok;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "liouville: k_count=" << cfg.liouville.k_values.size()
        << " all_increasing_with_finite_radii=" << all_ok << "\n";
    if (!all_ok) throw MismatchError("liouville: trajectory not strictly increasing to blow-up");
    return 0;
}

int run_reconstruct(const RunConfig& cfg, const RunOptions& opt, std::ostream& out,
                    std::ostream& err) {
    ConformalData data = build_data(cfg);
    if (data.background().is_flat()) {
        ObstructionReport obs = obstruction_check(data);
        if (obs.status != Solvability::Solvable)
            throw ValidationError(std::string("refusing to solve, class is ") +
                                  solvability_name(obs.status) + ": " + obs.reason);
    }
    double tol = resolve_tol(cfg, data.background());
    int restarts_used = 0;
    SolveReport sol = solve_with_restarts(data, cfg, tol, restarts_used, err);
    InitialDataSet ids = build_initial_data(sol.phi, data);
    ScalarField ham = hamiltonian_residual(ids);
    auto mom = momentum_residual(ids);
    ScalarField trk = trace_k(ids);
    double mom_max = 0.0;
    for (const ScalarField& comp : mom) mom_max = std::max(mom_max, comp.max_abs());
    double trace_dev = 0.0;
    for (size_t i = 0; i < trk.size(); ++i)
        trace_dev = std::max(trace_dev, std::abs(trk[i] - data.tau()));

    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "reconstruct";
    j["lattice"] = lattice_json(data.lattice());
    j["background"] = background_json(data.background());
    j["tau"] = data.tau();
    j["tol"] = tol;
    j["solve"] = solve_json(sol);
    j["hamiltonian_max"] = ham.max_abs();
    j["momentum_max"] = mom_max;
    j["trace_k_dev"] = trace_dev;

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    if (w.enabled() && cfg.output.dump_fields) {
        dump_field(ids.gamma, w.path("gamma.bin"));
        w.note("gamma.bin");
        dump_field(ids.k, w.path("k.bin"));
        w.note("k.bin");
        dump_field(sol.phi, w.path("phi.bin"));
        w.note("phi.bin");
    }
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "reconstruct: hamiltonian_max=" << ham.max_abs() << " momentum_max=" << mom_max
        << " trace_k_dev=" << trace_dev << "\n";
    return 0;
}

int run_converge(const RunConfig& cfg, const RunOptions& opt, std::ostream& out, std::ostream&) {
    double tol = cfg.solver.tol;
    if (tol <= 0.0) tol = cfg.converge.kind == StudyKind::Hamiltonian ? 1e-9 : 1e-10;
    ConvergenceReport rep =
        convergence_study(cfg.converge.kind, cfg.converge.n_values, tol, cfg.solver.max_iter);

    ordered_json j;
    j["schema"] = "cfrg-report/1";
    j["command"] = "converge";
    j["kind"] = study_kind_name(rep.kind);
    j["n_values"] = rep.n_values;
    j["tol"] = tol;
    if (!rep.diffs.empty()) {
        j["diffs"] = rep.diffs;
        j["diff_orders"] = rep.diff_orders;
        j["exact"] = rep.exact;
    }
    if (!rep.residual_norms.empty()) {
        j["residual_norms"] = rep.residual_norms;
        j["residual_orders"] = rep.residual_orders;
    }

    OutputWriter w(opt.out_dir);
    w.add_json("report.json", j);
    w.finalize();

    if (opt.verbose) out << j.dump(2) << "\n";
    out << "converge: kind=" << study_kind_name(rep.kind);
    if (rep.exact) {
        out << " exact=1";
    } else if (!rep.diff_orders.empty()) {
        out << " diff_orders=[";
        for (size_t i = 0; i < rep.diff_orders.size(); ++i)
            out << (i ? ", " : "") << rep.diff_orders[i];
        out << "]";
    }
    if (!rep.residual_orders.empty()) {
        out << " residual_orders=[";
        for (size_t i = 0; i < rep.residual_orders.size(); ++i)
            out << (i ? ", " : "") << rep.residual_orders[i];
        out << "]";
    }
    out << "\n";
    return 0;
}

} // namespace

int run_command(const std::string& command, const RunConfig& cfg, const RunOptions& opt,
                std::ostream& out, std::ostream& err) {
    try {
        if (command == "solve") return run_solve(cfg, opt, out, err);
        if (command == "yamabe") return run_yamabe(cfg, opt, out, err);
        if (command == "table") return run_table(cfg, opt, out, err);
        if (command == "sweep") return run_sweep(cfg, opt, out, err);
        if (command == "degenerate") return run_degenerate(cfg, opt, out, err);
        if (command == "liouville") return run_liouville(cfg, opt, out, err);
        if (command == "reconstruct") return run_reconstruct(cfg, opt, out, err);
        if (command == "converge") return run_converge(cfg, opt, out, err);
        throw ValidationError("unknown command: " + command);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const MismatchError& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace cfrg
