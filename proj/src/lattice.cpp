#include "cfrg/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace cfrg {

double ScalarField::min() const {
    return *std::min_element(v_.begin(), v_.end());
}

double ScalarField::max() const {
    return *std::max_element(v_.begin(), v_.end());
}

double ScalarField::max_abs() const {
    double m = 0.0;
    for (double x : v_) m = std::max(m, std::abs(x));
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
}

} // namespace cfrg
