#pragma once

#include "cfrg/background.hpp"
#include "cfrg/lattice.hpp"

namespace cfrg {

/// Discrete Laplace-Beltrami of f with respect to the background metric.
///
/// Flat mode: the 7-point second-order periodic stencil.  Conformally flat
/// mode: the metric is psi^4*(flat), for which the operator reduces to
/// psi^-6 * div(psi^2 grad f); discretized in flux form with face-averaged
/// coefficients so that it is self-adjoint w.r.t. the volume measure psi^6 h^3
/// to roundoff (and reduces to the flat stencil when psi == 1).
ScalarField laplacian(const ScalarField& f, const ConformalBackground& bg);

/// Flux-form div(a grad f) with arithmetic face averages of a; the building
/// block shared by the conformally flat Laplacian and variable-coefficient
/// linear solves.  Symmetric as a matrix in the node basis.
ScalarField div_a_grad(const ScalarField& a, const ScalarField& f);

/// Sum over nodes of f * sqrt(det metric) * h^3 (compensated summation).
double integrate(const ScalarField& f, const ConformalBackground& bg);

/// Scalar curvature field of the background.  Flat mode: the prescribed
/// constant.  Conformally flat: -8 psi^-5 * (flat Laplacian of psi).
ScalarField scalar_curvature(const ConformalBackground& bg);

/// Metric-squared gradient |grad f|^2 by centered differences.
ScalarField gradient_norm_squared(const ScalarField& f, const ConformalBackground& bg);

/// Pointwise sigma^ij sigma_ij: flat sum of squares (off-diagonals twice),
/// times psi^-8 in conformally flat mode.
ScalarField norm_squared(const SymTensorField& sigma, const ConformalBackground& bg);

} // namespace cfrg
