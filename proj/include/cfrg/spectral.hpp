#pragma once

#include "cfrg/lattice.hpp"

namespace cfrg {

/// Eigenvalue of the flat 7-point stencil on the mode with integer frequencies
/// (m1, m2, m3): -(4/h^2) * sum_a sin^2(pi * m_a / n).
double stencil_eigenvalue(const Lattice& lat, int m1, int m2, int m3);

/// Direct solver for constant-coefficient problems (alpha * Lap_h + beta) u = rhs
/// on the periodic lattice, by real-to-complex FFT diagonalization of the flat
/// stencil.  Plans use FFTW_ESTIMATE and plan creation is serialized, so
/// results are deterministic and instances may live on different threads.
class StencilFourierSolver {
public:
    explicit StencilFourierSolver(const Lattice& lat);
    ~StencilFourierSolver();
    StencilFourierSolver(const StencilFourierSolver&) = delete;
    StencilFourierSolver& operator=(const StencilFourierSolver&) = delete;

    const Lattice& lattice() const { return lat_; }

    /// Requires alpha*eigenvalue + beta nonzero on every mode, except that a
    /// singular zero mode (beta == 0) is projected out: the input mean is
    /// dropped and the zero-mean solution returned.
    ScalarField solve(const ScalarField& rhs, double alpha, double beta);

private:
    Lattice lat_;
    double* real_ = nullptr;
    void* cplx_ = nullptr;  // fftw_complex*
    void* fwd_ = nullptr;   // fftw_plan
    void* bwd_ = nullptr;   // fftw_plan
};

} // namespace cfrg
