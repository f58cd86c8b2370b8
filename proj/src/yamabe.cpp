#include "cfrg/yamabe.hpp"

#include <cmath>

#include "cfrg/linear_solver.hpp"
#include "cfrg/operators.hpp"
#include "cfrg/spectral.hpp"

namespace cfrg {

double rayleigh_quotient(const ScalarField& psi, const ConformalBackground& bg) {
    require_same_lattice(psi.lattice(), bg.lattice(), "rayleigh_quotient");
    if (psi.min() <= 0.0)
        throw ValidationError("rayleigh_quotient: psi must be positive everywhere");

    const ScalarField r = scalar_curvature(bg);
    ScalarField numerand = gradient_norm_squared(psi, bg);
    ScalarField psi6(psi.lattice());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        numerand[i] += 0.125 * r[i] * psi[i] * psi[i];
        const double p2 = psi[i] * psi[i];
        psi6[i] = p2 * p2 * p2;
    }
    const double denom = integrate(psi6, bg);
    if (!(denom > 0.0))
        throw ValidationError("rayleigh_quotient: vanishing psi^6 volume integral");
    return integrate(numerand, bg) / std::cbrt(denom);
}

YamabeReport yamabe_sign(const ConformalBackground& bg, double tol) {
    if (!(tol > 0.0)) throw ValidationError("yamabe_sign: tol must be positive");
    const Lattice& lat = bg.lattice();
    const std::size_t nn = lat.num_nodes();
    const ScalarField r = scalar_curvature(bg);

    // Shift so -Lap + R/8 + s is positive definite (>= 1/2 on constants).
    const double shift = 0.5 + std::max(0.0, -r.min() / 8.0);

    // Generalized problem A u = lambda W u with A = -psi^6 Lap + psi^6 R/8 and
    // W = psi^6 (identity in flat mode); the shifted solve stays in div form.
    const bool flat = bg.is_flat();
    ScalarField weight(lat, 1.0);
    ScalarField a_coef(lat, 1.0);
    ScalarField c_coef(lat);
    if (!flat) {
        const auto& psi = bg.psi().values();
        for (std::size_t i = 0; i < nn; ++i) {
            const double p2 = psi[i] * psi[i];
            weight[i] = p2 * p2 * p2;
            a_coef[i] = p2;
        }
    }
    for (std::size_t i = 0; i < nn; ++i)
        c_coef[i] = weight[i] * (0.125 * r[i] + shift);

    StencilFourierSolver fft(lat);
    auto inverse_apply = [&](const ScalarField& u) {
        ScalarField b(lat);
        for (std::size_t i = 0; i < nn; ++i) b[i] = weight[i] * u[i];
        if (flat) return fft.solve(b, -1.0, 0.125 * bg.r_const() + shift);
        PcgResult res = pcg_div_form(a_coef, c_coef, b, 1e-13, 2000, &u);
        if (!res.converged)
            throw ConvergenceError("yamabe_sign: inner linear solve did not converge");
        return res.x;
    };

    auto rayleigh = [&](const ScalarField& u) {
        ScalarField lap = laplacian(u, bg);
        ScalarField num(lat), den(lat);
        for (std::size_t i = 0; i < nn; ++i) {
            num[i] = u[i] * (-lap[i] + 0.125 * r[i] * u[i]);
            den[i] = u[i] * u[i];
        }
        return integrate(num, bg) / integrate(den, bg);
    };

    ScalarField v(lat, 1.0);
    double lambda = rayleigh(v);
    const int max_iter = 500;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        ScalarField w = inverse_apply(v);
        const double m = w.max_abs();
        if (!(m > 0.0)) throw ConvergenceError("yamabe_sign: iterate collapsed to zero");
        for (std::size_t i = 0; i < nn; ++i) w[i] /= m;
        const double lambda_new = rayleigh(w);
        const double dv = [&] {
            double d = 0.0;
            for (std::size_t i = 0; i < nn; ++i) d = std::max(d, std::abs(w[i] - v[i]));
            return d;
        }();
        v = w;
        const bool settled = std::abs(lambda_new - lambda) <= 1e-13 * std::max(1.0, std::abs(lambda_new)) &&
                             dv <= 1e-11;
        lambda = lambda_new;
        if (settled) break;
    }
    if (iter == max_iter)
        throw ConvergenceError("yamabe_sign: inverse power iteration did not settle");

    const double vmax = v.max();
    if (!(vmax > 0.0) || v.min() <= 0.0)
        throw ConvergenceError("yamabe_sign: principal eigenfunction lost positivity");
    for (std::size_t i = 0; i < nn; ++i) v[i] /= vmax;

    YamabeReport rep;
    rep.lambda1 = lambda;
    rep.sign = lambda > tol ? YamabeSign::Positive
                            : (lambda < -tol ? YamabeSign::Negative : YamabeSign::Zero);
    rep.minimizer = v;
    rep.quotient_at_minimizer = rayleigh_quotient(v, bg);
    rep.iterations = iter + 1;
    return rep;
}

char sign_char(YamabeSign s) {
    switch (s) {
        case YamabeSign::Positive: return '+';
        case YamabeSign::Zero: return '0';
        case YamabeSign::Negative: return '-';
    }
    return '?';
}

} // namespace cfrg
