#pragma once

#include "cfrg/background.hpp"
#include "cfrg/lattice.hpp"

namespace cfrg {

enum class YamabeSign { Positive, Zero, Negative };

struct YamabeReport {
    YamabeSign sign = YamabeSign::Zero;
    /// Smallest eigenvalue of the conformal Laplacian -Lap + R/8 in the
    /// metric's L2 inner product.
    double lambda1 = 0.0;
    /// Principal eigenfunction, positive, normalized to unit max.
    ScalarField minimizer;
    double quotient_at_minimizer = 0.0;
    int iterations = 0;
};

/// [integral of |grad psi|^2 + (1/8) R psi^2] / [integral of psi^6]^(1/3),
/// all measures taken in the background metric.
double rayleigh_quotient(const ScalarField& psi, const ConformalBackground& bg);

/// Classifies the background by the sign of lambda1, computed by shifted
/// inverse power iteration; |lambda1| <= tol reports Zero.
YamabeReport yamabe_sign(const ConformalBackground& bg, double tol = 1e-6);

char sign_char(YamabeSign s);

} // namespace cfrg
