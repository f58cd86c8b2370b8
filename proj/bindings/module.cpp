#include <cstring>
#include <optional>
#include <sstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cfrg/config.hpp"
#include "cfrg/errors.hpp"
#include "cfrg/field_io.hpp"
#include "cfrg/liouville.hpp"
#include "cfrg/operators.hpp"
#include "cfrg/reconstruct.hpp"
#include "cfrg/run.hpp"
#include "cfrg/yamabe.hpp"

namespace py = pybind11;
using namespace cfrg;

namespace {

py::array_t<double> scalar_to_numpy(const ScalarField& f) {
    const py::ssize_t n = f.lattice().n;
    const py::ssize_t b = static_cast<py::ssize_t>(sizeof(double));
    py::array_t<double> out({n, n, n}, {b, b * n, b * n * n});
    std::memcpy(out.mutable_data(), f.values().data(), sizeof(double) * f.size());
    return out;
}

ScalarField scalar_from_numpy(const Lattice& lat, const py::array& arr) {
    auto a = py::array_t<double, py::array::forcecast>::ensure(arr);
    if (!a || a.ndim() != 3) throw ValidationError("expected a 3-d float array");
    const py::ssize_t n = lat.n;
    if (a.shape(0) != n || a.shape(1) != n || a.shape(2) != n)
        throw ValidationError("array shape does not match the lattice");
    auto r = a.unchecked<3>();
    ScalarField f(lat);
    for (py::ssize_t i3 = 0; i3 < n; ++i3)
        for (py::ssize_t i2 = 0; i2 < n; ++i2)
            for (py::ssize_t i1 = 0; i1 < n; ++i1)
                f(static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3)) =
                    r(i1, i2, i3);
    return f;
}

py::array_t<double> tensor_to_numpy(const SymTensorField& t) {
    const py::ssize_t n = t.lattice().n;
    const py::ssize_t b = static_cast<py::ssize_t>(sizeof(double));
    py::array_t<double> out({static_cast<py::ssize_t>(6), n, n, n},
                            {b * n * n * n, b, b * n, b * n * n});
    std::memcpy(out.mutable_data(), t.values().data(), sizeof(double) * t.values().size());
    return out;
}

SymTensor3 tensor_from_tuple(const std::array<double, 6>& v) {
    SymTensor3 t;
    t.c = v;
    return t;
}

py::dict class_tag_dict(const ClassTag& tag) {
    py::dict d;
    d["yamabe"] = std::string(1, sign_char(tag.sign));
    d["sigma2_zero"] = tag.sigma2_zero;
    d["tau_zero"] = tag.tau_zero;
    return d;
}

py::dict solve_report_dict(const SolveReport& rep) {
    py::dict d;
    d["phi"] = rep.phi;
    d["residual_max"] = rep.residual_max;
    d["residual_l2"] = rep.residual_l2;
    d["iterations"] = rep.iterations;
    d["method"] = std::string(method_name(rep.method));
    d["converged"] = rep.converged;
    d["phi_minus"] = rep.phi_minus;
    d["phi_plus"] = rep.phi_plus;
    return d;
}

py::dict yamabe_report_dict(const YamabeReport& rep) {
    py::dict d;
    d["sign"] = std::string(1, sign_char(rep.sign));
    d["lambda1"] = rep.lambda1;
    d["quotient_at_minimizer"] = rep.quotient_at_minimizer;
    d["iterations"] = rep.iterations;
    d["minimizer"] = rep.minimizer;
    return d;
}

py::dict sweep_report_dict(const SweepReport& rep) {
    py::dict d;
    d["c1"] = rep.c1;
    d["c2"] = rep.c2;
    d["s_values"] = rep.s_values;
    d["t2_values"] = rep.t2_values;
    d["barrier_lo"] = rep.barrier_lo;
    d["barrier_hi"] = rep.barrier_hi;
    d["global_min_phi"] = rep.global_min_phi;
    d["global_max_phi"] = rep.global_max_phi;
    d["failures"] = rep.failures;
    d["barrier_violated"] = rep.barrier_violated;
    py::list samples;
    for (const SweepSample& s : rep.samples) {
        py::dict sd;
        sd["s"] = s.s;
        sd["t2"] = s.t2;
        sd["min_phi"] = s.min_phi;
        sd["max_phi"] = s.max_phi;
        sd["iterations"] = s.iterations;
        sd["converged"] = s.converged;
        sd["error"] = s.error;
        samples.append(sd);
    }
    d["samples"] = samples;
    return d;
}

py::dict degeneration_report_dict(const DegenerationReport& rep) {
    py::dict d;
    d["tol"] = rep.tol;
    d["all_match"] = rep.all_match;
    py::list rows;
    for (const DegenerationRow& r : rep.rows) {
        py::dict rd;
        rd["c"] = r.c;
        rd["converged"] = r.converged;
        rd["scale_dev"] = r.scale_dev;
        rd["min_phi_over_c"] = r.min_phi_over_c;
        rd["max_phi_over_c"] = r.max_phi_over_c;
        rd["iterations"] = r.iterations;
        rd["error"] = r.error;
        rows.append(rd);
    }
    d["rows"] = rows;
    return d;
}

py::dict table_report_dict(const TableScanReport& rep) {
    py::dict d;
    d["all_match"] = rep.all_match;
    py::list cells;
    for (const TableCell& c : rep.cells) {
        py::dict cd;
        cd["r"] = c.r_const;
        cd["sigma_zero"] = c.sigma_zero;
        cd["tau_zero"] = c.tau_zero;
        cd["expected"] = c.expected;
        cd["observed"] = c.observed;
        cd["detail"] = c.detail;
        cd["residual_max"] = c.residual_max;
        cd["iterations"] = c.iterations;
        cd["match"] = c.match;
        cells.append(cd);
    }
    d["cells"] = cells;
    return d;
}

py::dict convergence_report_dict(const ConvergenceReport& rep) {
    py::dict d;
    d["kind"] = std::string(study_kind_name(rep.kind));
    d["n_values"] = rep.n_values;
    d["diffs"] = rep.diffs;
    d["diff_orders"] = rep.diff_orders;
    d["residual_norms"] = rep.residual_norms;
    d["residual_orders"] = rep.residual_orders;
    d["exact"] = rep.exact;
    return d;
}

py::dict nonexistence_report_dict(const NonexistenceReport& rep) {
    py::dict d;
    d["k"] = rep.k;
    d["thresholds"] = rep.thresholds;
    d["radii"] = rep.radii;
    d["strictly_increasing"] = rep.strictly_increasing;
    d["trajectory_end_r"] = rep.trajectory_end_r;
    d["trajectory_end_u"] = rep.trajectory_end_u;
    d["sample_count"] = rep.sample_count;
    return d;
}

py::dict trajectory_dict(const RadialTrajectory& tr) {
    const py::ssize_t m = static_cast<py::ssize_t>(tr.samples.size());
    py::array_t<double> r(m), u(m), du(m);
    for (py::ssize_t i = 0; i < m; ++i) {
        const auto& s = tr.samples[static_cast<size_t>(i)];
        r.mutable_at(i) = s.r;
        u.mutable_at(i) = s.u;
        du.mutable_at(i) = s.du;
    }
    py::dict d;
    d["k"] = tr.k;
    d["step"] = tr.step;
    d["r"] = r;
    d["u"] = u;
    d["du"] = du;
    d["guard_hit"] = tr.guard_hit;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "CMC conformal-constraint laboratory on the periodic 3-torus";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<MismatchError>(m, "MismatchError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Lattice>(m, "Lattice")
        .def(py::init([](int n, double length) { return Lattice{n, length}; }), py::arg("n"),
             py::arg("length") = 1.0)
        .def_readonly("n", &Lattice::n)
        .def_readonly("length", &Lattice::length)
        .def("spacing", &Lattice::spacing)
        .def("num_nodes", &Lattice::num_nodes)
        .def("__repr__", [](const Lattice& l) {
            std::ostringstream os;
            os << "Lattice(n=" << l.n << ", length=" << l.length << ")";
            return os.str();
        });

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<const Lattice&, double>(), py::arg("lattice"), py::arg("fill") = 0.0)
        .def_static("from_numpy", &scalar_from_numpy, py::arg("lattice"), py::arg("array"))
        .def("numpy", &scalar_to_numpy)
        .def_property_readonly("lattice", &ScalarField::lattice)
        .def("min", &ScalarField::min)
        .def("max", &ScalarField::max)
        .def("max_abs", &ScalarField::max_abs)
        .def("__len__", &ScalarField::size);

    py::class_<SymTensorField>(m, "SymTensorField")
        .def("numpy", &tensor_to_numpy)
        .def_property_readonly("lattice", &SymTensorField::lattice);

    py::class_<TTWaveMode>(m, "TTWaveMode")
        .def(py::init([](std::array<int, 3> k, std::array<double, 6> eps, double phase) {
                 TTWaveMode mode;
                 mode.k = k;
                 mode.eps = tensor_from_tuple(eps);
                 mode.phase = phase;
                 return mode;
             }),
             py::arg("k"), py::arg("eps"), py::arg("phase") = 0.0);

    py::class_<HarmonicMode>(m, "HarmonicMode")
        .def(py::init([](std::array<int, 3> k, double amplitude, double phase) {
                 HarmonicMode mode;
                 mode.k = k;
                 mode.amplitude = amplitude;
                 mode.phase = phase;
                 return mode;
             }),
             py::arg("k"), py::arg("amplitude"), py::arg("phase") = 0.0);

    m.def(
        "make_tt_field",
        [](const Lattice& lat, std::array<double, 6> const_part,
           const std::vector<TTWaveMode>& modes) {
            return make_tt_field(lat, tensor_from_tuple(const_part), modes);
        },
        py::arg("lattice"), py::arg("const_part"), py::arg("modes") = std::vector<TTWaveMode>{});
    m.def("harmonic_field", &harmonic_field, py::arg("lattice"), py::arg("constant"),
          py::arg("modes") = std::vector<HarmonicMode>{});
    m.def("unit_min_tt_base", &unit_min_tt_base, py::arg("lattice"));

    py::class_<ConformalBackground>(m, "ConformalBackground")
        .def_static("flat", &ConformalBackground::flat, py::arg("lattice"), py::arg("r"))
        .def_static("conformally_flat", &ConformalBackground::conformally_flat, py::arg("psi"))
        .def_property_readonly("lattice", &ConformalBackground::lattice)
        .def("is_flat", &ConformalBackground::is_flat);

    m.def("tt_check", &tt_check, py::arg("sigma"), py::arg("background"));
    m.def("laplacian", &laplacian, py::arg("f"), py::arg("background"));
    m.def("integrate", &integrate, py::arg("f"), py::arg("background"));
    m.def("scalar_curvature", &scalar_curvature, py::arg("background"));
    m.def("gradient_norm_squared", &gradient_norm_squared, py::arg("f"), py::arg("background"));
    m.def("norm_squared", &norm_squared, py::arg("sigma"), py::arg("background"));
    m.def("rayleigh_quotient", &rayleigh_quotient, py::arg("psi"), py::arg("background"));
    m.def(
        "yamabe_sign",
        [](const ConformalBackground& bg, double tol) {
            return yamabe_report_dict(yamabe_sign(bg, tol));
        },
        py::arg("background"), py::arg("tol") = 1e-6);

    py::class_<ConformalData>(m, "ConformalData")
        .def(py::init<const ConformalBackground&, std::optional<SymTensorField>, double>(),
             py::arg("background"), py::arg("sigma"), py::arg("tau"))
        .def_property_readonly("background", &ConformalData::background)
        .def_property_readonly("tau", &ConformalData::tau)
        .def_property_readonly("sigma2", &ConformalData::sigma2)
        .def("sigma",
             [](const ConformalData& d) -> std::optional<SymTensorField> {
                 if (!d.sigma()) return std::nullopt;
                 return *d.sigma();
             })
        .def("sigma2_is_zero", &ConformalData::sigma2_is_zero)
        .def("tau_is_zero", &ConformalData::tau_is_zero)
        .def(
            "class_tag",
            [](const ConformalData& d, double tol) { return class_tag_dict(d.class_tag(tol)); },
            py::arg("yamabe_tol") = 1e-6);

    m.def("residual", &residual, py::arg("phi"), py::arg("data"));
    m.def("constant_root", &constant_root, py::arg("r"), py::arg("s"), py::arg("t2"));
    m.def("sub_super_bounds", &sub_super_bounds, py::arg("data"));
    m.def(
        "obstruction_check",
        [](const ConformalData& d, double tol) {
            ObstructionReport rep = obstruction_check(d, tol);
            py::dict out;
            out["status"] = std::string(solvability_name(rep.status));
            out["reason"] = rep.reason;
            return out;
        },
        py::arg("data"), py::arg("yamabe_tol") = 1e-6);
    m.def(
        "solve_monotone",
        [](const ConformalData& d, double tol, int max_iter) {
            return solve_report_dict(solve_monotone(d, tol, max_iter));
        },
        py::arg("data"), py::arg("tol"), py::arg("max_iter") = 400);
    m.def(
        "solve_newton",
        [](const ConformalData& d, double tol, int max_iter, const ScalarField* phi0) {
            return solve_report_dict(solve_newton(d, tol, max_iter, phi0));
        },
        py::arg("data"), py::arg("tol"), py::arg("max_iter") = 200,
        py::arg("phi0") = static_cast<const ScalarField*>(nullptr));
    m.def("scaling_transform", &scaling_transform, py::arg("phi"), py::arg("data"), py::arg("c"));
    m.def("conformal_transfer", &conformal_transfer, py::arg("phi"), py::arg("data"),
          py::arg("psi"));
    m.def("default_tolerance", &default_tolerance, py::arg("background"));

    m.def(
        "radial_shoot",
        [](double k, double r_max, double step) { return trajectory_dict(radial_shoot(k, r_max, step)); },
        py::arg("k"), py::arg("r_max"), py::arg("step"));
    m.def("exceedance_radius", &exceedance_radius, py::arg("k"), py::arg("threshold"),
          py::arg("step") = 0.0);
    m.def(
        "nonexistence_report",
        [](double k) { return nonexistence_report_dict(nonexistence_report(k)); }, py::arg("k"));

    py::class_<InitialDataSet>(m, "InitialDataSet")
        .def_readonly("gamma", &InitialDataSet::gamma)
        .def_readonly("k", &InitialDataSet::k)
        .def_readonly("tau", &InitialDataSet::tau)
        .def_readonly("phi", &InitialDataSet::phi);

    m.def("build_initial_data", &build_initial_data, py::arg("phi"), py::arg("data"));
    m.def("hamiltonian_residual", &hamiltonian_residual, py::arg("data_set"));
    m.def(
        "momentum_residual",
        [](const InitialDataSet& ids) {
            auto mom = momentum_residual(ids);
            return std::vector<ScalarField>(mom.begin(), mom.end());
        },
        py::arg("data_set"));
    m.def("trace_k", &trace_k, py::arg("data_set"));
    m.def("k_norm_squared", &k_norm_squared, py::arg("data_set"));

    m.def(
        "bounds_sweep",
        [](const ConformalBackground& bg, const SymTensorField& base, double c1, double c2,
           int samples_per_axis, double tol, int max_iter, int threads,
           std::optional<std::vector<double>> s_values,
           std::optional<std::vector<double>> t2_values) {
            return sweep_report_dict(bounds_sweep(bg, base, c1, c2, samples_per_axis, tol,
                                                  max_iter, threads,
                                                  s_values ? &*s_values : nullptr,
                                                  t2_values ? &*t2_values : nullptr));
        },
        py::arg("background"), py::arg("base_sigma"), py::arg("c1"), py::arg("c2"),
        py::arg("samples_per_axis"), py::arg("tol"), py::arg("max_iter") = 400,
        py::arg("threads") = 1, py::arg("s_values") = std::nullopt,
        py::arg("t2_values") = std::nullopt);
    m.def(
        "degeneration_study",
        [](const ConformalData& data0, const ScalarField& phi0, std::vector<double> c_values,
           double tol) {
            return degeneration_report_dict(degeneration_study(data0, phi0, c_values, tol));
        },
        py::arg("data"), py::arg("phi"), py::arg("c_values"), py::arg("tol"));
    m.def(
        "table_scan",
        [](const Lattice& lat, double tol, int max_iter) {
            return table_report_dict(table_scan(lat, tol, max_iter));
        },
        py::arg("lattice"), py::arg("tol") = 1e-9, py::arg("max_iter") = 400);
    m.def(
        "convergence_study",
        [](const std::string& kind, std::vector<int> n_values, double tol, int max_iter) {
            return convergence_report_dict(
                convergence_study(study_kind_from_name(kind), n_values, tol, max_iter));
        },
        py::arg("kind"), py::arg("n_values"), py::arg("tol"), py::arg("max_iter") = 400);

    m.def(
        "run_json",
        [](const std::string& command, const std::string& config_text, const std::string& out_dir,
           int threads, bool verbose) {
            RunConfig cfg = config_from_json_text(config_text);
            RunOptions opt;
            opt.out_dir = out_dir;
            opt.threads = threads;
            opt.verbose = verbose;
            std::ostringstream out, err;
            int code = run_command(command, cfg, opt, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("command"), py::arg("config_text"), py::arg("out_dir") = std::string(),
        py::arg("threads") = 1, py::arg("verbose") = false);

    m.def(
        "dump_scalar_field",
        [](const ScalarField& f, const std::string& path) { dump_field(f, path); },
        py::arg("field"), py::arg("path"));
    m.def(
        "load_scalar_field",
        [](const std::string& path) { return load_scalar_field(path); }, py::arg("path"));
}
