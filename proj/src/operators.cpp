#include "cfrg/operators.hpp"

#include <cmath>
#include <vector>

namespace cfrg {

namespace {

// Periodic neighbor offsets along one axis for index i in [0, n).
inline int up(int i, int n) { return i + 1 == n ? 0 : i + 1; }
inline int dn(int i, int n) { return i == 0 ? n - 1 : i - 1; }

// div(a grad f) in flux form with arithmetic face averages; a == nullptr means a == 1.
// Writing the flat stencil through the same flux expression keeps the
// conformally flat operator exactly symmetric and its psi==1 limit equal to
// the flat 7-point stencil up to association order.
void flux_divergence(const ScalarField& f, const std::vector<double>* a,
                     double inv_h2, ScalarField& out) {
    const Lattice& lat = f.lattice();
    const int n = lat.n;
    const auto& v = f.values();
    auto& o = out.values();
    for (int i3 = 0; i3 < n; ++i3) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i1 = 0; i1 < n; ++i1) {
                const std::size_t c = lat.index(i1, i2, i3);
                const std::size_t xp = lat.index(up(i1, n), i2, i3);
                const std::size_t xm = lat.index(dn(i1, n), i2, i3);
                const std::size_t yp = lat.index(i1, up(i2, n), i3);
                const std::size_t ym = lat.index(i1, dn(i2, n), i3);
                const std::size_t zp = lat.index(i1, i2, up(i3, n));
                const std::size_t zm = lat.index(i1, i2, dn(i3, n));
                double acc;
                if (a) {
                    const double ac = (*a)[c];
                    acc = 0.5 * (ac + (*a)[xp]) * (v[xp] - v[c]) -
                          0.5 * (ac + (*a)[xm]) * (v[c] - v[xm]);
                    acc += 0.5 * (ac + (*a)[yp]) * (v[yp] - v[c]) -
                           0.5 * (ac + (*a)[ym]) * (v[c] - v[ym]);
                    acc += 0.5 * (ac + (*a)[zp]) * (v[zp] - v[c]) -
                           0.5 * (ac + (*a)[zm]) * (v[c] - v[zm]);
                } else {
                    acc = (v[xp] - v[c]) - (v[c] - v[xm]);
                    acc += (v[yp] - v[c]) - (v[c] - v[ym]);
                    acc += (v[zp] - v[c]) - (v[c] - v[zm]);
                }
                o[c] = acc * inv_h2;
            }
        }
    }
}

} // namespace

ScalarField div_a_grad(const ScalarField& a, const ScalarField& f) {
    require_same_lattice(a.lattice(), f.lattice(), "div_a_grad");
    const double h = f.lattice().spacing();
    ScalarField out(f.lattice());
    flux_divergence(f, &a.values(), 1.0 / (h * h), out);
    return out;
}

ScalarField laplacian(const ScalarField& f, const ConformalBackground& bg) {
    require_same_lattice(f.lattice(), bg.lattice(), "laplacian");
    if (!f.all_finite())
        throw ValidationError("laplacian: input field has non-finite values");

    const Lattice& lat = f.lattice();
    const double inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
    ScalarField out(lat);

    if (bg.is_flat()) {
        flux_divergence(f, nullptr, inv_h2, out);
        return out;
    }

    const auto& psi = bg.psi().values();
    std::vector<double> a(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) a[i] = psi[i] * psi[i];
    flux_divergence(f, &a, inv_h2, out);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p2 = a[i];
        out[i] /= p2 * p2 * p2; // psi^6
    }
    return out;
}

double integrate(const ScalarField& f, const ConformalBackground& bg) {
    require_same_lattice(f.lattice(), bg.lattice(), "integrate");
    const double h = f.lattice().spacing();
    const double cell = h * h * h;
    const auto& v = f.values();

    // Kahan summation; node order is fixed, so results are reproducible.
    double sum = 0.0, comp = 0.0;
    auto add = [&](double x) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    };

    if (bg.is_flat()) {
        for (double x : v) add(x);
    } else {
        const auto& psi = bg.psi().values();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double p2 = psi[i] * psi[i];
            add(v[i] * (p2 * p2 * p2));
        }
    }
    return sum * cell;
}

ScalarField scalar_curvature(const ConformalBackground& bg) {
    if (bg.is_flat()) {
        ScalarField r(bg.lattice(), bg.r_const());
        return r;
    }
    const ScalarField& psi = bg.psi();
    if (psi.min() <= 0.0)
        throw ValidationError("scalar_curvature: psi must be positive everywhere");
    ConformalBackground flat_bg = ConformalBackground::flat(bg.lattice(), 0.0);
    ScalarField lap = laplacian(psi, flat_bg);
    ScalarField r(bg.lattice());
    const auto& p = psi.values();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double p2 = p[i] * p[i];
        r[i] = -8.0 * lap[i] / (p2 * p2 * p[i]); // psi^-5
    }
    return r;
}

ScalarField gradient_norm_squared(const ScalarField& f, const ConformalBackground& bg) {
    require_same_lattice(f.lattice(), bg.lattice(), "gradient_norm_squared");
    const Lattice& lat = f.lattice();
    const int n = lat.n;
    const double inv_2h = 1.0 / (2.0 * lat.spacing());
    ScalarField out(lat);
    const auto& v = f.values();
    for (int i3 = 0; i3 < n; ++i3) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i1 = 0; i1 < n; ++i1) {
                const double gx = (v[lat.index(up(i1, n), i2, i3)] - v[lat.index(dn(i1, n), i2, i3)]) * inv_2h;
                const double gy = (v[lat.index(i1, up(i2, n), i3)] - v[lat.index(i1, dn(i2, n), i3)]) * inv_2h;
                const double gz = (v[lat.index(i1, i2, up(i3, n))] - v[lat.index(i1, i2, dn(i3, n))]) * inv_2h;
                out[lat.index(i1, i2, i3)] = gx * gx + gy * gy + gz * gz;
            }
        }
    }
    if (!bg.is_flat()) {
        const auto& psi = bg.psi().values();
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const double p2 = psi[i] * psi[i];
            out[i] /= p2 * p2; // inverse metric carries psi^-4
        }
    }
    return out;
}

ScalarField norm_squared(const SymTensorField& sigma, const ConformalBackground& bg) {
    require_same_lattice(sigma.lattice(), bg.lattice(), "norm_squared");
    ScalarField out(sigma.lattice());
    const std::size_t nn = sigma.nodes();
    for (std::size_t i = 0; i < nn; ++i) out[i] = sigma.at(i).norm2_flat();
    if (!bg.is_flat()) {
        const auto& psi = bg.psi().values();
        for (std::size_t i = 0; i < nn; ++i) {
            const double p2 = psi[i] * psi[i];
            const double p4 = p2 * p2;
            out[i] /= p4 * p4; // two inverse metrics: psi^-8
        }
    }
    return out;
}

} // namespace cfrg
