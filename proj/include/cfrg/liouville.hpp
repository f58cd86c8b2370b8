#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace cfrg {

/// Radial trajectory of u'' + (2/r) u' = k u^5, u(0) = 1, u'(0) = 0.
struct RadialTrajectory {
    double k = 0.0;
    double step = 0.0;
    struct Sample {
        double r, u, du;
    };
    std::vector<Sample> samples;
    /// True when integration stopped because u crossed the blow-up guard
    /// (u > 1e3) rather than reaching r_max.
    bool guard_hit = false;
};

/// Fourth-order integration with a Taylor start over the first step (the
/// origin term 2/r is removed analytically).  Stops at r_max or at the
/// blow-up guard u > 1e3.
RadialTrajectory radial_shoot(double k, double r_max, double step);

/// Smallest r with u(r) >= threshold, refined to 1e-8 by bisection on a cubic
/// Hermite interpolant of the stored trajectory.  step <= 0 selects the
/// default step 1e-3 / sqrt(k).
double exceedance_radius(double k, double threshold, double step = 0.0);

/// The witness summary: u increases strictly from u(0) = 1, so any bound
/// u <= theta fails at a finite radius.
struct NonexistenceReport {
    double k = 0.0;
    std::array<double, 3> thresholds{};
    std::array<double, 3> radii{};
    bool strictly_increasing = false;
    double trajectory_end_r = 0.0;
    double trajectory_end_u = 0.0;
    std::size_t sample_count = 0;
};

NonexistenceReport nonexistence_report(double k);

} // namespace cfrg
