#pragma once

#include <array>

#include "cfrg/conformal_data.hpp"
#include "cfrg/lattice.hpp"

namespace cfrg {

/// Physical initial data (gamma, K) together with the generating solution.
struct InitialDataSet {
    SymTensorField gamma;
    SymTensorField k;
    double tau = 0.0;
    ScalarField phi;
    ConformalData source;
};

/// gamma = phi^4 * (background metric); K = phi^-2 sigma + (1/3) tau phi^4 *
/// (background metric).  gamma is checked positive-definite via leading
/// principal minors.
InitialDataSet build_initial_data(const ScalarField& phi, const ConformalData& data);

/// Scalar constraint R^gamma + (Tr K)^2 - |K|^2 nodewise, with R^gamma from
/// the conformal identity for the total factor (det gamma)^(1/12).
ScalarField hamiltonian_residual(const InitialDataSet& ids);

/// Vector constraint: covariant divergence of K minus the gradient of Tr K,
/// Christoffel symbols by centered differences of gamma.
std::array<ScalarField, 3> momentum_residual(const InitialDataSet& ids);

/// Tr_gamma K per node, via explicit inversion of gamma.
ScalarField trace_k(const InitialDataSet& ids);

/// |K|^2_gamma per node.
ScalarField k_norm_squared(const InitialDataSet& ids);

} // namespace cfrg
