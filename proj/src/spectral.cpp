#include "cfrg/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>

namespace cfrg {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

double stencil_eigenvalue(const Lattice& lat, int m1, int m2, int m3) {
    const double pi = std::acos(-1.0);
    const double h = lat.spacing();
    auto s2 = [&](int m) {
        const double s = std::sin(pi * static_cast<double>(m) / lat.n);
        return s * s;
    };
    return -(4.0 / (h * h)) * (s2(m1) + s2(m2) + s2(m3));
}

StencilFourierSolver::StencilFourierSolver(const Lattice& lat) : lat_(lat) {
    const int n = lat_.n;
    const std::size_t nreal = lat_.num_nodes();
    const std::size_t ncplx = static_cast<std::size_t>(n) * n * (n / 2 + 1);
    real_ = fftw_alloc_real(nreal);
    fftw_complex* c = fftw_alloc_complex(ncplx);
    cplx_ = c;
    if (!real_ || !cplx_) throw InternalError("StencilFourierSolver: allocation failed");
    std::lock_guard<std::mutex> lock(plan_mutex());
    // Storage is x1-fastest, so x1 is the transform's last (contiguous) axis.
    fwd_ = fftw_plan_dft_r2c_3d(n, n, n, real_, c, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r_3d(n, n, n, c, real_, FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw InternalError("StencilFourierSolver: plan creation failed");
}

StencilFourierSolver::~StencilFourierSolver() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    if (bwd_) fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(real_);
    fftw_free(static_cast<fftw_complex*>(cplx_));
}

ScalarField StencilFourierSolver::solve(const ScalarField& rhs, double alpha, double beta) {
    require_same_lattice(rhs.lattice(), lat_, "StencilFourierSolver::solve");
    const int n = lat_.n;
    const int nh = n / 2 + 1;
    const std::size_t nreal = lat_.num_nodes();

    std::memcpy(real_, rhs.values().data(), nreal * sizeof(double));
    fftw_execute(static_cast<fftw_plan>(fwd_));

    fftw_complex* c = static_cast<fftw_complex*>(cplx_);
    const double pi = std::acos(-1.0);
    const double h = lat_.spacing();
    const double scale = 1.0 / static_cast<double>(nreal);
    std::vector<double> s2(n);
    for (int m = 0; m < n; ++m) {
        const double s = std::sin(pi * static_cast<double>(m) / n);
        s2[m] = s * s;
    }
    const double tiny = 1e-300;
    for (int m3 = 0; m3 < n; ++m3) {
        for (int m2 = 0; m2 < n; ++m2) {
            for (int m1 = 0; m1 < nh; ++m1) {
                const double lam = -(4.0 / (h * h)) * (s2[m1] + s2[m2] + s2[m3]);
                const double denom = alpha * lam + beta;
                const std::size_t idx =
                    static_cast<std::size_t>(m1) +
                    static_cast<std::size_t>(nh) * (m2 + static_cast<std::size_t>(n) * m3);
                if (m1 == 0 && m2 == 0 && m3 == 0 && beta == 0.0) {
                    c[idx][0] = 0.0;
                    c[idx][1] = 0.0;
                    continue;
                }
                if (std::abs(denom) < tiny)
                    throw InternalError("StencilFourierSolver: singular symbol away from the zero mode");
                const double f = scale / denom;
                c[idx][0] *= f;
                c[idx][1] *= f;
            }
        }
    }

    fftw_execute(static_cast<fftw_plan>(bwd_));
    ScalarField out(lat_);
    std::memcpy(out.values().data(), real_, nreal * sizeof(double));
    return out;
}

} // namespace cfrg
