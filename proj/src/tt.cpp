#include "cfrg/tt.hpp"

#include <cmath>
#include <string>

namespace cfrg {

namespace {

constexpr double kStructureTol = 1e-12;

void validate_mode(const TTWaveMode& m, std::size_t idx) {
    const auto tag = [idx](const char* what) {
        return "make_tt_field: mode " + std::to_string(idx) + " " + what;
    };
    if (m.k[0] == 0 && m.k[1] == 0 && m.k[2] == 0)
        throw ValidationError(tag("has zero wavevector"));
    if (std::abs(m.eps.trace()) > kStructureTol)
        throw ValidationError(tag("amplitude is not trace-free"));
    for (int j = 0; j < 3; ++j) {
        double dot = 0.0;
        for (int i = 0; i < 3; ++i) dot += m.k[i] * m.eps.entry(i, j);
        if (std::abs(dot) > kStructureTol)
            throw ValidationError(tag("amplitude is not transverse to its wavevector"));
    }
}

} // namespace

SymTensorField make_tt_field(const Lattice& lat, const SymTensor3& const_part,
                             const std::vector<TTWaveMode>& modes) {
    if (std::abs(const_part.trace()) > kStructureTol)
        throw ValidationError("make_tt_field: constant part is not trace-free");
    for (std::size_t m = 0; m < modes.size(); ++m) validate_mode(modes[m], m);

    SymTensorField sigma(lat);
    const int n = lat.n;
    const double two_pi_over_l = 2.0 * std::acos(-1.0) / lat.length;
    for (int i3 = 0; i3 < n; ++i3) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i1 = 0; i1 < n; ++i1) {
                const std::size_t node = lat.index(i1, i2, i3);
                SymTensor3 t = const_part;
                for (const TTWaveMode& m : modes) {
                    const double arg =
                        two_pi_over_l * (m.k[0] * lat.coord(i1) + m.k[1] * lat.coord(i2) +
                                         m.k[2] * lat.coord(i3)) +
                        m.phase;
                    const double c = std::cos(arg);
                    for (int comp = 0; comp < 6; ++comp) t[comp] += m.eps[comp] * c;
                }
                sigma.set(node, t);
            }
        }
    }
    return sigma;
}

ScalarField harmonic_field(const Lattice& lat, double constant,
                           const std::vector<HarmonicMode>& modes) {
    ScalarField f(lat, constant);
    const int n = lat.n;
    const double two_pi_over_l = 2.0 * std::acos(-1.0) / lat.length;
    for (const HarmonicMode& m : modes) {
        for (int i3 = 0; i3 < n; ++i3)
            for (int i2 = 0; i2 < n; ++i2)
                for (int i1 = 0; i1 < n; ++i1) {
                    const double arg =
                        two_pi_over_l * (m.k[0] * lat.coord(i1) + m.k[1] * lat.coord(i2) +
                                         m.k[2] * lat.coord(i3)) +
                        m.phase;
                    f(i1, i2, i3) += m.amplitude * std::cos(arg);
                }
    }
    return f;
}

std::pair<double, double> tt_check(const SymTensorField& sigma,
                                   const ConformalBackground& bg) {
    require_same_lattice(sigma.lattice(), bg.lattice(), "tt_check");
    if (!bg.is_flat())
        throw ValidationError("tt_check: defined against the flat metric only");

    const Lattice& lat = sigma.lattice();
    const int n = lat.n;
    const double inv_2h = 1.0 / (2.0 * lat.spacing());

    double max_div = 0.0;
    double max_trace = 0.0;
    // (div sigma)_j = sum_i d_i sigma_ij by centered differences.
    static constexpr int col[3][3] = {
        {SymTensor3::XX, SymTensor3::XY, SymTensor3::XZ},
        {SymTensor3::XY, SymTensor3::YY, SymTensor3::YZ},
        {SymTensor3::XZ, SymTensor3::YZ, SymTensor3::ZZ}};
    for (int i3 = 0; i3 < n; ++i3) {
        for (int i2 = 0; i2 < n; ++i2) {
            for (int i1 = 0; i1 < n; ++i1) {
                const SymTensor3 t = sigma.at(lat.index(i1, i2, i3));
                max_trace = std::max(max_trace, std::abs(t.trace()));
                for (int j = 0; j < 3; ++j) {
                    const double dx = sigma.comp(col[0][j], i1 + 1, i2, i3) -
                                      sigma.comp(col[0][j], i1 - 1, i2, i3);
                    const double dy = sigma.comp(col[1][j], i1, i2 + 1, i3) -
                                      sigma.comp(col[1][j], i1, i2 - 1, i3);
                    const double dz = sigma.comp(col[2][j], i1, i2, i3 + 1) -
                                      sigma.comp(col[2][j], i1, i2, i3 - 1);
                    max_div = std::max(max_div, std::abs((dx + dy + dz) * inv_2h));
                }
            }
        }
    }
    return {max_div, max_trace};
}

} // namespace cfrg
