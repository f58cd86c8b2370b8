#pragma once

#include "cfrg/lattice.hpp"

namespace cfrg {

struct PcgResult {
    ScalarField x;
    int iterations = 0;
    bool converged = false;
    /// A direction of nonpositive curvature was met; x is the last unfinished
    /// iterate and the caller decides how to use it.
    bool indefinite = false;
    double rel_residual = 0.0;
};

/// Preconditioned conjugate gradient for A u = b with
///   A u = -div(a grad u) + c u
/// (face-averaged a > 0, node diagonal c of any sign).  Preconditioner: the
/// constant-coefficient operator with mean(a) and max(mean(c), small floor),
/// inverted spectrally.  Stops when ||b - A u||_2 <= rel_tol * ||b||_2.
PcgResult pcg_div_form(const ScalarField& a, const ScalarField& c, const ScalarField& b,
                       double rel_tol, int max_iter, const ScalarField* x0 = nullptr);

} // namespace cfrg
