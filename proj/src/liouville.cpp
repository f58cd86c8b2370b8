#include "cfrg/liouville.hpp"

#include <cmath>
#include <sstream>

#include "cfrg/errors.hpp"

namespace cfrg {

namespace {

constexpr double kBlowupGuard = 1e3;

struct State {
    double u, v;
};

// u' = v, v' = k u^5 - (2/r) v; valid for r > 0.
inline State rhs(double k, double r, State s) {
    const double u2 = s.u * s.u;
    return {s.v, k * u2 * u2 * s.u - 2.0 * s.v / r};
}

inline State rk4_step(double k, double r, State s, double h) {
    const State k1 = rhs(k, r, s);
    const State k2 = rhs(k, r + 0.5 * h, {s.u + 0.5 * h * k1.u, s.v + 0.5 * h * k1.v});
    const State k3 = rhs(k, r + 0.5 * h, {s.u + 0.5 * h * k2.u, s.v + 0.5 * h * k2.v});
    const State k4 = rhs(k, r + h, {s.u + h * k3.u, s.v + h * k3.v});
    return {s.u + h / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u),
            s.v + h / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

// Series solution near the origin: u = 1 + (k/6) r^2 + (k^2/24) r^4 + (5k^3/432) r^6.
inline State taylor_start(double k, double r) {
    const double r2 = r * r;
    const double u = 1.0 + (k / 6.0) * r2 + (k * k / 24.0) * r2 * r2 +
                     (5.0 * k * k * k / 432.0) * r2 * r2 * r2;
    const double v = (k / 3.0) * r + (k * k / 6.0) * r2 * r +
                     (5.0 * k * k * k / 72.0) * r2 * r2 * r;
    return {u, v};
}

} // namespace

RadialTrajectory radial_shoot(double k, double r_max, double step) {
    if (!(k > 0.0)) throw ValidationError("radial_shoot: k must be positive");
    if (!(step > 0.0)) throw ValidationError("radial_shoot: step must be positive");
    if (!(r_max > step)) throw ValidationError("radial_shoot: r_max must exceed the step");

    RadialTrajectory traj;
    traj.k = k;
    traj.step = step;
    traj.samples.push_back({0.0, 1.0, 0.0});

    double r = step;
    State s = taylor_start(k, r);
    traj.samples.push_back({r, s.u, s.v});

    while (r < r_max && s.u <= kBlowupGuard) {
        s = rk4_step(k, r, s, step);
        r += step;
        if (!std::isfinite(s.u) || !std::isfinite(s.v)) {
            traj.guard_hit = true;
            break;
        }
        traj.samples.push_back({r, s.u, s.v});
        if (s.u > kBlowupGuard) {
            traj.guard_hit = true;
            break;
        }
    }
    return traj;
}

double exceedance_radius(double k, double threshold, double step) {
    if (!(k > 0.0)) throw ValidationError("exceedance_radius: k must be positive");
    if (!(threshold > 1.0)) throw ValidationError("exceedance_radius: threshold must exceed 1");
    if (step <= 0.0) step = 1e-3 / std::sqrt(k);

    const double r_max = 100.0 / std::sqrt(k);
    const RadialTrajectory traj = radial_shoot(k, r_max, step);

    std::size_t hit = traj.samples.size();
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        if (traj.samples[i].u >= threshold) {
            hit = i;
            break;
        }
    }
    if (hit == traj.samples.size()) {
        std::ostringstream msg;
        msg << "exceedance_radius: no crossing of " << threshold << " before r = "
            << traj.samples.back().r << "; retry with a smaller step";
        throw ConvergenceError(msg.str());
    }
    if (hit == 0) return 0.0;

    const auto& a = traj.samples[hit - 1];
    const auto& b = traj.samples[hit];
    const double h = b.r - a.r;
    // Cubic Hermite interpolant between the bracketing samples, matching the
    // integrator's fourth-order accuracy.
    auto interp = [&](double r) {
        const double t = (r - a.r) / h;
        const double t2 = t * t;
        const double t3 = t2 * t;
        return (2.0 * t3 - 3.0 * t2 + 1.0) * a.u + (t3 - 2.0 * t2 + t) * h * a.du +
               (-2.0 * t3 + 3.0 * t2) * b.u + (t3 - t2) * h * b.du;
    };
    double lo = a.r, hi = b.r;
    while (hi - lo > 1e-13 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (interp(mid) < threshold ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

NonexistenceReport nonexistence_report(double k) {
    if (!(k > 0.0)) throw ValidationError("nonexistence_report: k must be positive");
    NonexistenceReport rep;
    rep.k = k;
    rep.thresholds = {1.0 + 1e-3, 1.5, 2.0};
    for (std::size_t i = 0; i < rep.thresholds.size(); ++i)
        rep.radii[i] = exceedance_radius(k, rep.thresholds[i]);

    const double step = 1e-3 / std::sqrt(k);
    const RadialTrajectory traj = radial_shoot(k, 3.0 / std::sqrt(k), step);
    rep.strictly_increasing = true;
    for (std::size_t i = 2; i < traj.samples.size(); ++i) {
        if (!(traj.samples[i].u > traj.samples[i - 1].u) || !(traj.samples[i].du > 0.0)) {
            rep.strictly_increasing = false;
            break;
        }
    }
    rep.trajectory_end_r = traj.samples.back().r;
    rep.trajectory_end_u = traj.samples.back().u;
    rep.sample_count = traj.samples.size();
    return rep;
}

} // namespace cfrg
