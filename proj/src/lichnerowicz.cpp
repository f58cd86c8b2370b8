#include "cfrg/lichnerowicz.hpp"

#include <cmath>
#include <sstream>

#include "cfrg/linear_solver.hpp"
#include "cfrg/operators.hpp"
#include "cfrg/spectral.hpp"

namespace cfrg {

namespace {

struct Powers {
    double inv7;  // u^-7
    double p5;    // u^5
};

inline Powers powers(double u) {
    const double u2 = u * u;
    const double u4 = u2 * u2;
    return {1.0 / (u4 * u2 * u), u4 * u};
}

// F(u; x) = (1/8) R u - (1/8) sigma^2 u^-7 + (1/12) tau^2 u^5, the right side
// of the equation Lap phi = F(phi).
inline double nonlinearity(double r, double s, double t2, double u) {
    const Powers p = powers(u);
    return 0.125 * r * u - 0.125 * s * p.inv7 + (t2 / 12.0) * p.p5;
}

// dF/du, the Jacobian diagonal.
inline double nonlinearity_slope(double r, double s, double t2, double u) {
    const double u2 = u * u;
    const double u4 = u2 * u2;
    return 0.125 * r + 0.875 * s / (u4 * u4) + (5.0 / 12.0) * t2 * u4;
}

void require_positive_phi(const ScalarField& phi, const char* what) {
    if (!phi.all_finite() || phi.min() <= 0.0)
        throw ValidationError(std::string(what) + ": phi must be positive and finite everywhere");
}

std::string describe_cell(const ClassTag& tag) {
    std::string s = "(Y";
    s += sign_char(tag.sign);
    s += tag.sigma2_zero ? ", sigma^2 == 0" : ", sigma^2 != 0";
    s += tag.tau_zero ? ", tau == 0)" : ", tau != 0)";
    return s;
}

} // namespace

const char* method_name(SolveMethod m) {
    return m == SolveMethod::Monotone ? "monotone" : "newton";
}

const char* solvability_name(Solvability s) {
    switch (s) {
        case Solvability::Solvable: return "SOLVABLE";
        case Solvability::Obstructed: return "OBSTRUCTED";
        case Solvability::TrivialFamily: return "TRIVIAL_FAMILY";
    }
    return "?";
}

double default_tolerance(const ConformalBackground& bg) {
    return bg.is_flat() ? 1e-9 : 1e-8;
}

ScalarField residual(const ScalarField& phi, const ConformalData& data) {
    require_same_lattice(phi.lattice(), data.lattice(), "residual");
    require_positive_phi(phi, "residual");
    const ConformalBackground& bg = data.background();
    ScalarField out = laplacian(phi, bg);
    const ScalarField r = scalar_curvature(bg);
    const ScalarField& s = data.sigma2();
    const double t2 = data.tau() * data.tau();
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] -= nonlinearity(r[i], s[i], t2, phi[i]);
    return out;
}

double constant_root(double r, double s, double t2) {
    if (!(std::isfinite(r) && std::isfinite(s) && std::isfinite(t2)))
        throw ValidationError("constant_root: non-finite coefficient");
    if (s < 0.0 || t2 < 0.0)
        throw ValidationError("constant_root: sigma^2 and tau^2 must be nonnegative");

    const bool admissible = (s > 0.0 && t2 > 0.0) || (s > 0.0 && t2 == 0.0 && r > 0.0) ||
                            (s == 0.0 && t2 > 0.0 && r < 0.0);
    if (!admissible) {
        std::ostringstream msg;
        msg << "constant_root: no positive root for (R=" << r << ", sigma^2=" << s
            << ", tau^2=" << t2 << ")";
        throw ValidationError(msg.str());
    }

    if (t2 == 0.0) return std::pow(s / r, 0.125);
    if (s == 0.0) return std::pow(-1.5 * r / t2, 0.25);
    if (r == 0.0) return std::pow(1.5 * s / t2, 1.0 / 12.0);

    auto g = [&](double u) {
        const double u2 = u * u;
        const double u4 = u2 * u2;
        const double u8 = u4 * u4;
        return (t2 / 12.0) * u8 * u4 + 0.125 * r * u8 - 0.125 * s;
    };
    double lo = 1e-8;
    double hi = 10.0 * std::max({1.0, std::pow(12.0 * s / t2, 1.0 / 12.0),
                                 std::pow(s / std::abs(r), 0.125),
                                 std::pow(3.0 * std::abs(r) / t2, 0.25)});
    if (!(g(lo) < 0.0 && g(hi) > 0.0))
        throw InternalError("constant_root: bisection bracket failed to straddle the root");
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Solvability table_expectation(const ClassTag& tag) {
    if (tag.sigma2_zero && tag.tau_zero)
        return tag.sign == YamabeSign::Zero ? Solvability::TrivialFamily : Solvability::Obstructed;
    if (tag.sigma2_zero)
        return tag.sign == YamabeSign::Negative ? Solvability::Solvable : Solvability::Obstructed;
    if (tag.tau_zero)
        return tag.sign == YamabeSign::Positive ? Solvability::Solvable : Solvability::Obstructed;
    return Solvability::Solvable;
}

ObstructionReport obstruction_check(const ConformalData& data, double yamabe_tol) {
    if (!data.background().is_flat())
        throw ValidationError(
            "obstruction_check: only defined for prescribed constant curvature backgrounds");
    const ClassTag tag = data.class_tag(yamabe_tol);
    ObstructionReport rep;
    rep.status = table_expectation(tag);
    switch (rep.status) {
        case Solvability::Solvable:
            break;
        case Solvability::TrivialFamily:
            rep.reason = "class " + describe_cell(tag) + ": every positive constant is a solution";
            break;
        case Solvability::Obstructed: {
            // A positive solution would force the volume integral of
            // (1/8)R phi - (1/8)sigma^2 phi^-7 + (1/12)tau^2 phi^5 to vanish,
            // but in this cell every surviving term has one strict sign.
            std::string terms;
            const bool positive_side = tag.sign == YamabeSign::Positive || !tag.tau_zero;
            if (tag.sign != YamabeSign::Zero)
                terms += std::string("(1/8)R phi is strictly ") +
                         (tag.sign == YamabeSign::Positive ? "positive" : "negative");
            if (!tag.sigma2_zero) {
                if (!terms.empty()) terms += " and ";
                terms += "-(1/8)sigma^2 phi^-7 is negative and not identically zero";
            }
            if (!tag.tau_zero) {
                if (!terms.empty()) terms += " and ";
                terms += "(1/12)tau^2 phi^5 is strictly positive";
            }
            rep.reason = "class " + describe_cell(tag) +
                         ": integrating the equation over the manifold requires the mean of the "
                         "right side to vanish, but " +
                         terms + ", so the integral is strictly " +
                         (positive_side ? "positive" : "negative");
            break;
        }
    }
    return rep;
}

namespace {

void require_solvable(const ConformalData& data, const char* what) {
    const ClassTag tag = data.class_tag();
    const Solvability s = table_expectation(tag);
    if (s == Solvability::Solvable) return;
    std::string msg = std::string(what) + ": class " + describe_cell(tag);
    msg += s == Solvability::TrivialFamily
               ? " admits every positive constant; there is nothing to solve"
               : " admits no positive solution";
    throw ValidationError(msg);
}

struct FieldExtremes {
    double r_min, r_max, s_min, s_max;
};

FieldExtremes extremes(const ConformalData& data) {
    const ScalarField r = scalar_curvature(data.background());
    return {r.min(), r.max(), data.sigma2().min(), data.sigma2().max()};
}

} // namespace

std::pair<double, double> sub_super_bounds(const ConformalData& data) {
    require_solvable(data, "sub_super_bounds");
    const FieldExtremes e = extremes(data);
    const double t2 = data.tau() * data.tau();
    // Zero out a sub-threshold sigma^2 so the structural-zero class uses the
    // exact s = 0 closed form.
    const bool s_zero = data.sigma2_is_zero();
    const double s_min = s_zero ? 0.0 : e.s_min;
    const double s_max = s_zero ? 0.0 : e.s_max;

    double lo, hi;
    try {
        lo = constant_root(e.r_max, s_min, t2);
        hi = constant_root(e.r_min, s_max, t2);
    } catch (const ValidationError& err) {
        throw ValidationError(std::string("sub_super_bounds: no constant barrier: ") + err.what());
    }
    if (!(lo <= hi * (1.0 + 1e-12)))
        throw InternalError("sub_super_bounds: barrier ordering failed");
    if (lo > hi) lo = hi;

    // The constant lo must be a subsolution (F(lo; x) <= 0 everywhere) and hi
    // a supersolution; verify against the worst node.
    const ScalarField rf = scalar_curvature(data.background());
    const ScalarField& sf = data.sigma2();
    double worst_lo = -1e300, worst_hi = 1e300;
    for (std::size_t i = 0; i < sf.size(); ++i) {
        worst_lo = std::max(worst_lo, nonlinearity(rf[i], sf[i], t2, lo));
        worst_hi = std::min(worst_hi, nonlinearity(rf[i], sf[i], t2, hi));
    }
    const double scale = 0.125 * std::max(std::abs(e.r_min), std::abs(e.r_max)) * hi +
                         0.125 * s_max * powers(lo).inv7 + (t2 / 12.0) * powers(hi).p5;
    const double slack = 1e-10 * std::max(1.0, scale);
    if (worst_lo > slack || worst_hi < -slack)
        throw InternalError("sub_super_bounds: barrier verification failed");
    return {lo, hi};
}

namespace {

struct SolveContext {
    const ConformalBackground& bg;
    ScalarField r_field;
    const ScalarField& s_field;
    double t2;
    bool flat;
    ScalarField psi2;  // conformally flat only
    ScalarField psi6;

    explicit SolveContext(const ConformalData& data)
        : bg(data.background()),
          r_field(scalar_curvature(bg)),
          s_field(data.sigma2()),
          t2(data.tau() * data.tau()),
          flat(bg.is_flat()) {
        if (!flat) {
            const ScalarField& psi = bg.psi();
            psi2 = ScalarField(bg.lattice());
            psi6 = ScalarField(bg.lattice());
            for (std::size_t i = 0; i < psi.size(); ++i) {
                const double p2 = psi[i] * psi[i];
                psi2[i] = p2;
                psi6[i] = p2 * p2 * p2;
            }
        }
    }
};

double residual_l2_norm(const ScalarField& r, const ConformalBackground& bg) {
    ScalarField sq(r.lattice());
    for (std::size_t i = 0; i < r.size(); ++i) sq[i] = r[i] * r[i];
    return std::sqrt(integrate(sq, bg));
}

// Solve (Lap - mu) u = rhs for constant mu > 0, or more generally
// (Lap - diag(w)) u = -rhs_neg in the Newton step; both reduce to an SPD
// system after flipping sign (and weighting by psi^6 off the flat case).
ScalarField shifted_inverse(const SolveContext& ctx, StencilFourierSolver& fft,
                            const ScalarField& rhs, double mu, const ScalarField* start,
                            double rel_tol) {
    if (ctx.flat) return fft.solve(rhs, 1.0, -mu);
    const Lattice& lat = rhs.lattice();
    ScalarField c(lat), b(lat);
    for (std::size_t i = 0; i < b.size(); ++i) {
        c[i] = mu * ctx.psi6[i];
        b[i] = -ctx.psi6[i] * rhs[i];
    }
    PcgResult res = pcg_div_form(ctx.psi2, c, b, rel_tol, 5000, start);
    if (!res.converged)
        throw ConvergenceError("inner linear solve did not converge (monotone step)");
    return res.x;
}

} // namespace

SolveReport solve_monotone(const ConformalData& data, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ValidationError("solve_monotone: tol must be positive");
    if (max_iter < 1) throw ValidationError("solve_monotone: max_iter must be >= 1");
    const auto [phi_minus, phi_plus] = sub_super_bounds(data);

    SolveContext ctx(data);
    const Lattice& lat = data.lattice();
    const std::size_t nn = lat.num_nodes();

    // mu bounds dF/du over the bracket box, so u -> F(u) - mu*u is decreasing
    // and the iteration map preserves order.
    const FieldExtremes e = extremes(data);
    const double mu = 0.125 * std::max(e.r_max, 0.0) +
                      0.875 * e.s_max / std::pow(phi_minus, 8) +
                      (5.0 / 12.0) * ctx.t2 * std::pow(phi_plus, 4);
    if (!(mu > 0.0)) throw InternalError("solve_monotone: nonpositive shift");

    StencilFourierSolver fft(lat);
    const double slack = 1e-10 * std::max(1.0, phi_plus);

    SolveReport rep;
    rep.method = SolveMethod::Monotone;
    rep.phi_minus = phi_minus;
    rep.phi_plus = phi_plus;
    rep.phi = ScalarField(lat, phi_plus);

    for (int k = 0; k <= max_iter; ++k) {
        ScalarField r = residual(rep.phi, data);
        rep.residual_max = r.max_abs();
        if (rep.residual_max <= tol) {
            rep.residual_l2 = residual_l2_norm(r, ctx.bg);
            rep.iterations = k;
            rep.converged = true;
            return rep;
        }
        if (k == max_iter) break;

        ScalarField rhs(lat);
        for (std::size_t i = 0; i < nn; ++i)
            rhs[i] = nonlinearity(ctx.r_field[i], ctx.s_field[i], ctx.t2, rep.phi[i]) -
                     mu * rep.phi[i];
        ScalarField next = shifted_inverse(ctx, fft, rhs, mu, &rep.phi, 1e-13);

        for (std::size_t i = 0; i < nn; ++i) {
            if (next[i] < phi_minus - slack || next[i] > phi_plus + slack)
                throw InternalError("solve_monotone: iterate left the bracket");
            if (next[i] > rep.phi[i] + slack)
                throw InternalError("solve_monotone: iterate failed to decrease");
        }
        rep.phi = next;
    }
    std::ostringstream msg;
    msg << "solve_monotone: residual " << rep.residual_max << " after " << max_iter
        << " iterations (tol " << tol << ")";
    throw ConvergenceError(msg.str());
}

SolveReport solve_newton(const ConformalData& data, double tol, int max_iter,
                         const ScalarField* phi0) {
    if (!(tol > 0.0)) throw ValidationError("solve_newton: tol must be positive");
    if (max_iter < 1) throw ValidationError("solve_newton: max_iter must be >= 1");
    require_solvable(data, "solve_newton");

    SolveContext ctx(data);
    const Lattice& lat = data.lattice();
    const std::size_t nn = lat.num_nodes();

    SolveReport rep;
    rep.method = SolveMethod::Newton;
    try {
        std::tie(rep.phi_minus, rep.phi_plus) = sub_super_bounds(data);
    } catch (const ValidationError&) {
        // No constant barrier for this data; the solve proceeds without one.
    }

    if (phi0) {
        require_same_lattice(phi0->lattice(), lat, "solve_newton");
        require_positive_phi(*phi0, "solve_newton");
        rep.phi = *phi0;
    } else {
        double r_mean = 0.0, s_mean = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            r_mean += ctx.r_field[i];
            s_mean += ctx.s_field[i];
        }
        r_mean /= static_cast<double>(nn);
        s_mean /= static_cast<double>(nn);
        if (data.sigma2_is_zero()) s_mean = 0.0;
        rep.phi = ScalarField(lat, constant_root(r_mean, s_mean, ctx.t2));
    }

    StencilFourierSolver fft(lat);
    const double inner_rel = std::max(1e-2 * tol, 1e-14);

    for (int k = 0; k <= max_iter; ++k) {
        ScalarField r = residual(rep.phi, data);
        rep.residual_max = r.max_abs();
        if (rep.residual_max <= tol) {
            rep.residual_l2 = residual_l2_norm(r, ctx.bg);
            rep.iterations = k;
            rep.converged = true;
            return rep;
        }
        if (k == max_iter) break;

        // (Lap - diag(w)) delta = -r, flipped to the SPD-candidate form
        // (-div(a grad) + c) delta = b.
        ScalarField a(lat, 1.0), c(lat), b(lat);
        for (std::size_t i = 0; i < nn; ++i) {
            const double w =
                nonlinearity_slope(ctx.r_field[i], ctx.s_field[i], ctx.t2, rep.phi[i]);
            if (ctx.flat) {
                c[i] = w;
                b[i] = r[i];
            } else {
                a[i] = ctx.psi2[i];
                c[i] = ctx.psi6[i] * w;
                b[i] = ctx.psi6[i] * r[i];
            }
        }
        PcgResult lin = pcg_div_form(a, c, b, inner_rel, 5000);
        ScalarField delta = lin.x;
        if (lin.indefinite && lin.iterations == 0) {
            // Fall back to a preconditioned gradient direction.
            double c_mean = 0.0, a_mean = 0.0;
            for (std::size_t i = 0; i < nn; ++i) {
                c_mean += c[i];
                a_mean += a[i];
            }
            c_mean /= static_cast<double>(nn);
            a_mean /= static_cast<double>(nn);
            delta = fft.solve(b, -a_mean, std::max(c_mean, 1e-10));
        } else if (!lin.converged && !lin.indefinite) {
            throw ConvergenceError("solve_newton: inner Krylov solve stalled");
        }

        bool accepted = false;
        double step = 1.0;
        for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
            ScalarField trial(lat);
            for (std::size_t i = 0; i < nn; ++i) trial[i] = rep.phi[i] + step * delta[i];
            if (trial.min() <= 0.0) continue;
            const ScalarField rt = residual(trial, data);
            if (rt.max_abs() < rep.residual_max) {
                rep.phi = trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "solve_newton: line search stagnated at residual " << rep.residual_max
                << " (iteration " << k << ")";
            throw ConvergenceError(msg.str());
        }
    }
    std::ostringstream msg;
    msg << "solve_newton: residual " << rep.residual_max << " after " << max_iter
        << " iterations (tol " << tol << ")";
    throw ConvergenceError(msg.str());
}

std::pair<ScalarField, ConformalData> scaling_transform(const ScalarField& phi,
                                                        const ConformalData& data, double c) {
    if (!(std::isfinite(c) && c > 0.0))
        throw ValidationError("scaling_transform: c must be positive and finite");
    require_same_lattice(phi.lattice(), data.lattice(), "scaling_transform");

    const double c4 = c * c * c * c;
    const double c8 = c4 * c4;

    ScalarField phi_c = phi;
    for (std::size_t i = 0; i < phi_c.size(); ++i) phi_c[i] *= c;

    std::optional<SymTensorField> sigma_c;
    if (data.sigma()) {
        sigma_c = *data.sigma();
        for (double& v : sigma_c->values()) v *= c4;
    }
    ScalarField sigma2_c = data.sigma2();
    for (std::size_t i = 0; i < sigma2_c.size(); ++i) sigma2_c[i] *= c8;

    ConformalData data_c = ConformalData::with_explicit_sigma2(
        data.background(), std::move(sigma_c), std::move(sigma2_c), data.tau() / (c * c));
    return {std::move(phi_c), std::move(data_c)};
}

std::pair<ScalarField, ConformalData> conformal_transfer(const ScalarField& phi,
                                                         const ConformalData& data,
                                                         const ScalarField& psi) {
    require_same_lattice(phi.lattice(), data.lattice(), "conformal_transfer");
    require_same_lattice(psi.lattice(), data.lattice(), "conformal_transfer");
    if (!data.background().is_flat())
        throw ValidationError("conformal_transfer: base background must be flat");
    if (data.background().r_const() != 0.0)
        throw ValidationError(
            "conformal_transfer: flat base must have zero prescribed curvature; the "
            "conformally flat target derives its curvature from psi alone");
    if (!psi.all_finite() || psi.min() <= 0.0)
        throw ValidationError("conformal_transfer: psi must be positive and finite everywhere");

    const std::size_t nn = phi.size();
    ScalarField phi_t = phi;
    for (std::size_t i = 0; i < nn; ++i) phi_t[i] /= psi[i];

    std::optional<SymTensorField> sigma_t;
    if (data.sigma()) {
        sigma_t = *data.sigma();
        for (int comp = 0; comp < 6; ++comp)
            for (std::size_t i = 0; i < nn; ++i)
                sigma_t->comp(comp, i) /= psi[i] * psi[i];
    }
    ScalarField sigma2_t = data.sigma2();
    for (std::size_t i = 0; i < nn; ++i) {
        const double p2 = psi[i] * psi[i];
        const double p4 = p2 * p2;
        sigma2_t[i] /= p4 * p4 * p4;  // psi^12
    }

    ConformalData data_t = ConformalData::with_explicit_sigma2(
        ConformalBackground::conformally_flat(psi), std::move(sigma_t), std::move(sigma2_t),
        data.tau());
    return {std::move(phi_t), std::move(data_t)};
}

} // namespace cfrg
