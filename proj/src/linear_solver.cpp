#include "cfrg/linear_solver.hpp"

#include <cmath>
#include <numeric>

#include "cfrg/operators.hpp"
#include "cfrg/spectral.hpp"

namespace cfrg {

namespace {

double dot(const ScalarField& u, const ScalarField& v) {
    double sum = 0.0, comp = 0.0;
    const auto& a = u.values();
    const auto& b = v.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double y = a[i] * b[i] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

double mean(const ScalarField& f) {
    double sum = 0.0, comp = 0.0;
    for (double x : f.values()) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(f.size());
}

} // namespace

PcgResult pcg_div_form(const ScalarField& a, const ScalarField& c, const ScalarField& b,
                       double rel_tol, int max_iter, const ScalarField* x0) {
    require_same_lattice(a.lattice(), b.lattice(), "pcg_div_form");
    require_same_lattice(c.lattice(), b.lattice(), "pcg_div_form");
    const Lattice& lat = b.lattice();
    const std::size_t nn = lat.num_nodes();

    auto apply = [&](const ScalarField& u) {
        ScalarField au = div_a_grad(a, u);
        for (std::size_t i = 0; i < nn; ++i) au[i] = -au[i] + c[i] * u[i];
        return au;
    };

    StencilFourierSolver fft(lat);
    const double a_bar = mean(a);
    const double c_bar = std::max(mean(c), 1e-10 * std::max(1.0, a_bar));
    auto precondition = [&](const ScalarField& r) {
        return fft.solve(r, -a_bar, c_bar);
    };

    PcgResult res;
    res.x = x0 ? *x0 : ScalarField(lat);
    const double b_norm = std::sqrt(dot(b, b));
    if (b_norm == 0.0) {
        res.x = ScalarField(lat);
        res.converged = true;
        return res;
    }

    ScalarField r = apply(res.x);
    for (std::size_t i = 0; i < nn; ++i) r[i] = b[i] - r[i];
    ScalarField z = precondition(r);
    ScalarField p = z;
    double rz = dot(r, z);

    for (int k = 0; k < max_iter; ++k) {
        const double r_norm = std::sqrt(dot(r, r));
        res.rel_residual = r_norm / b_norm;
        if (res.rel_residual <= rel_tol) {
            res.converged = true;
            res.iterations = k;
            return res;
        }
        ScalarField ap = apply(p);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) {
            res.indefinite = true;
            res.iterations = k;
            return res;
        }
        const double alpha = rz / pap;
        for (std::size_t i = 0; i < nn; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        z = precondition(r);
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < nn; ++i) p[i] = z[i] + beta * p[i];
        res.iterations = k + 1;
    }
    res.rel_residual = std::sqrt(dot(r, r)) / b_norm;
    res.converged = res.rel_residual <= rel_tol;
    return res;
}

} // namespace cfrg
