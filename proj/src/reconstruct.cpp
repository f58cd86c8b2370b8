#include "cfrg/reconstruct.hpp"

#include <cmath>

#include "cfrg/operators.hpp"

namespace cfrg {

namespace {

void require_positive(const ScalarField& phi, const char* what) {
    if (!phi.all_finite() || phi.min() <= 0.0)
        throw ValidationError(std::string(what) + ": phi must be positive and finite everywhere");
}

struct Mat3 {
    double m[3][3];
};

Mat3 to_mat(const SymTensor3& t) {
    Mat3 a;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a.m[i][j] = t.entry(i, j);
    return a;
}

double det3(const Mat3& a) {
    return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
           a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
           a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

Mat3 inverse3(const Mat3& a, double det) {
    Mat3 inv;
    inv.m[0][0] = (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) / det;
    inv.m[0][1] = (a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2]) / det;
    inv.m[0][2] = (a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1]) / det;
    inv.m[1][0] = (a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2]) / det;
    inv.m[1][1] = (a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0]) / det;
    inv.m[1][2] = (a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2]) / det;
    inv.m[2][0] = (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]) / det;
    inv.m[2][1] = (a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1]) / det;
    inv.m[2][2] = (a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]) / det;
    return inv;
}

/// Total conformal factor from the metric itself, and the check that gamma is
/// a pointwise multiple of the identity (the only class this module certifies).
ScalarField conformal_factor_of(const SymTensorField& gamma) {
    const std::size_t nn = gamma.nodes();
    ScalarField hat(gamma.lattice());
    for (std::size_t i = 0; i < nn; ++i) {
        const SymTensor3 g = gamma.at(i);
        const double scale = std::max({std::abs(g[SymTensor3::XX]), std::abs(g[SymTensor3::YY]),
                                       std::abs(g[SymTensor3::ZZ])});
        const double off = std::max({std::abs(g[SymTensor3::XY]), std::abs(g[SymTensor3::XZ]),
                                     std::abs(g[SymTensor3::YZ])});
        const double spread = std::max(std::abs(g[SymTensor3::XX] - g[SymTensor3::YY]),
                                       std::abs(g[SymTensor3::XX] - g[SymTensor3::ZZ]));
        if (!(scale > 0.0) || off > 1e-12 * scale || spread > 1e-12 * scale)
            throw ValidationError(
                "hamiltonian/momentum residual: gamma is not conformally flat "
                "(not a pointwise multiple of the identity)");
        const double det = det3(to_mat(g));
        hat[i] = std::pow(det, 1.0 / 12.0);
    }
    return hat;
}

} // namespace

InitialDataSet build_initial_data(const ScalarField& phi, const ConformalData& data) {
    require_same_lattice(phi.lattice(), data.lattice(), "build_initial_data");
    require_positive(phi, "build_initial_data");

    const Lattice& lat = data.lattice();
    const std::size_t nn = lat.num_nodes();
    const ConformalBackground& bg = data.background();
    const SymTensorField* sigma = data.sigma();

    InitialDataSet ids{SymTensorField(lat), SymTensorField(lat), data.tau(), phi, data};
    for (std::size_t i = 0; i < nn; ++i) {
        const double p = phi[i];
        const double p2 = p * p;
        const double p4 = p2 * p2;
        double lambda_scale = 1.0;  // background metric is lambda_scale * identity
        if (!bg.is_flat()) {
            const double q = bg.psi()[i];
            const double q2 = q * q;
            lambda_scale = q2 * q2;
        }
        const double gscale = p4 * lambda_scale;
        const double kscale = (data.tau() / 3.0) * gscale;
        SymTensor3 g{}, k{};
        g[SymTensor3::XX] = g[SymTensor3::YY] = g[SymTensor3::ZZ] = gscale;
        k[SymTensor3::XX] = k[SymTensor3::YY] = k[SymTensor3::ZZ] = kscale;
        if (sigma) {
            const SymTensor3 s = sigma->at(i);
            for (int comp = 0; comp < 6; ++comp) k[comp] += s[comp] / p2;
        }
        ids.gamma.set(i, g);
        ids.k.set(i, k);

        // Leading principal minors of gamma.
        const Mat3 gm = to_mat(g);
        const double m1 = gm.m[0][0];
        const double m2 = gm.m[0][0] * gm.m[1][1] - gm.m[0][1] * gm.m[1][0];
        const double m3 = det3(gm);
        if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0))
            throw InternalError("build_initial_data: gamma lost positive-definiteness");
    }
    return ids;
}

ScalarField trace_k(const InitialDataSet& ids) {
    const std::size_t nn = ids.gamma.nodes();
    ScalarField tr(ids.gamma.lattice());
    for (std::size_t i = 0; i < nn; ++i) {
        const Mat3 g = to_mat(ids.gamma.at(i));
        const Mat3 ginv = inverse3(g, det3(g));
        const Mat3 k = to_mat(ids.k.at(i));
        double t = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) t += ginv.m[a][b] * k.m[a][b];
        tr[i] = t;
    }
    return tr;
}

ScalarField k_norm_squared(const InitialDataSet& ids) {
    const std::size_t nn = ids.gamma.nodes();
    ScalarField out(ids.gamma.lattice());
    for (std::size_t i = 0; i < nn; ++i) {
        const Mat3 g = to_mat(ids.gamma.at(i));
        const Mat3 ginv = inverse3(g, det3(g));
        const Mat3 k = to_mat(ids.k.at(i));
        // K^a_b = g^{ac} K_cb, then |K|^2 = K^a_b K^b_a.
        double up[3][3] = {};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 3; ++c) up[a][b] += ginv.m[a][c] * k.m[c][b];
        double n2 = 0.0;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) n2 += up[a][b] * up[b][a];
        out[i] = n2;
    }
    return out;
}

ScalarField hamiltonian_residual(const InitialDataSet& ids) {
    const Lattice& lat = ids.gamma.lattice();
    const ScalarField hat = conformal_factor_of(ids.gamma);

    // R^gamma = hat^-5 (R_base hat - 8 Lap_flat hat); the base is the flat
    // coordinate metric, whose curvature is the prescribed constant in flat
    // source mode and zero otherwise (psi is already inside hat).
    const ConformalBackground& src_bg = ids.source.background();
    const double r_base = src_bg.is_flat() ? src_bg.r_const() : 0.0;
    const ConformalBackground flat = ConformalBackground::flat(lat, 0.0);
    const ScalarField lap_hat = laplacian(hat, flat);

    const ScalarField tr = trace_k(ids);
    const ScalarField kn2 = k_norm_squared(ids);
    ScalarField out(lat);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double h = hat[i];
        const double h2 = h * h;
        const double h5 = h2 * h2 * h;
        const double r_gamma = (r_base * h - 8.0 * lap_hat[i]) / h5;
        out[i] = r_gamma + tr[i] * tr[i] - kn2[i];
    }
    return out;
}

std::array<ScalarField, 3> momentum_residual(const InitialDataSet& ids) {
    const Lattice& lat = ids.gamma.lattice();
    conformal_factor_of(ids.gamma);  // class gate
    const int n = lat.n;
    const double inv_2h = 1.0 / (2.0 * lat.spacing());
    const ScalarField tr = trace_k(ids);

    std::array<ScalarField, 3> out{ScalarField(lat), ScalarField(lat), ScalarField(lat)};
    const SymTensorField& G = ids.gamma;
    const SymTensorField& K = ids.k;

    for (int i3 = 0; i3 < n; ++i3) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i1 = 0; i1 < n; ++i1) {
                const std::size_t node = lat.index(i1, i2, i3);
                const Mat3 g = to_mat(G.at(node));
                const Mat3 ginv = inverse3(g, det3(g));
                const Mat3 k = to_mat(K.at(node));

                // Centered differences of gamma and K components along each axis.
                double dg[3][3][3], dk[3][3][3];  // [axis][i][j]
                auto diff = [&](const SymTensorField& f, int comp, int axis) {
                    const int up1 = axis == 0, up2 = axis == 1, up3 = axis == 2;
                    return (f.comp(comp, i1 + up1, i2 + up2, i3 + up3) -
                            f.comp(comp, i1 - up1, i2 - up2, i3 - up3)) *
                           inv_2h;
                };
                for (int axis = 0; axis < 3; ++axis)
                    for (int i = 0; i < 3; ++i)
                        for (int j = i; j < 3; ++j) {
                            const int comp = SymTensor3::comp_index(i, j);
                            dg[axis][i][j] = dg[axis][j][i] = diff(G, comp, axis);
                            dk[axis][i][j] = dk[axis][j][i] = diff(K, comp, axis);
                        }

                // Gamma^m_{ab} = (1/2) g^{ml} (d_a g_bl + d_b g_al - d_l g_ab).
                double chr[3][3][3];
                for (int m = 0; m < 3; ++m)
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) {
                            double sum = 0.0;
                            for (int l = 0; l < 3; ++l)
                                sum += ginv.m[m][l] * (dg[a][b][l] + dg[b][a][l] - dg[l][a][b]);
                            chr[m][a][b] = 0.5 * sum;
                        }

                for (int i = 0; i < 3; ++i) {
                    // g^{jk} (d_j K_{ki} - Gamma^m_{jk} K_{mi} - Gamma^m_{ji} K_{km})
                    double div = 0.0;
                    for (int j = 0; j < 3; ++j)
                        for (int kk = 0; kk < 3; ++kk) {
                            double cov = dk[j][kk][i];
                            for (int m = 0; m < 3; ++m)
                                cov -= chr[m][j][kk] * k.m[m][i] + chr[m][j][i] * k.m[kk][m];
                            div += ginv.m[j][kk] * cov;
                        }
                    const int up1 = i == 0, up2 = i == 1, up3 = i == 2;
                    const double dtr = (tr(i1 + up1, i2 + up2, i3 + up3) -
                                        tr(i1 - up1, i2 - up2, i3 - up3)) *
                                       inv_2h;
                    out[i][node] = div - dtr;
                }
            }
        }
    }
    return out;
}

} // namespace cfrg
