#pragma once

#include <random>

#include "cfrg/background.hpp"
#include "cfrg/lattice.hpp"

namespace cfrg::testing {

inline ScalarField random_field(const Lattice& lat, unsigned seed, double lo = -1.0,
                                double hi = 1.0) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ScalarField f(lat);
    for (size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
    return f;
}

inline ScalarField product(const ScalarField& a, const ScalarField& b) {
    ScalarField out = a;
    for (size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    double d = 0.0;
    for (size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

} // namespace cfrg::testing
