#pragma once

#include <array>
#include <utility>
#include <vector>

#include "cfrg/background.hpp"
#include "cfrg/lattice.hpp"

namespace cfrg {

/// One cosine mode of a transverse-traceless tensor field.  The wavevector is
/// given in integer units; the physical wavevector is (2*pi/L) * k.
struct TTWaveMode {
    std::array<int, 3> k{};
    SymTensor3 eps;
    double phase = 0.0;
};

/// sigma_ij(x) = const_part_ij + sum over modes of eps_ij * cos(k.x + phase).
/// Requires: const_part trace-free; every eps symmetric (structural), trace-free
/// and transverse to its k (sum_i k_i eps_ij = 0 for all j); every k nonzero.
/// The result is trace-free pointwise and divergence-free w.r.t. the flat
/// metric at the continuum level.
SymTensorField make_tt_field(const Lattice& lat, const SymTensor3& const_part,
                             const std::vector<TTWaveMode>& modes);

/// (max abs centered-difference divergence, max abs algebraic trace).
/// Defined against the flat metric only.
std::pair<double, double> tt_check(const SymTensorField& sigma,
                                   const ConformalBackground& bg);

/// One cosine mode of a scalar field, integer wavevector as above.
struct HarmonicMode {
    std::array<int, 3> k{};
    double amplitude = 0.0;
    double phase = 0.0;
};

/// constant + sum over modes of amplitude * cos(k.x + phase).
ScalarField harmonic_field(const Lattice& lat, double constant,
                           const std::vector<HarmonicMode>& modes);

} // namespace cfrg
