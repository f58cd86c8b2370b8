#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cfrg/errors.hpp"

namespace cfrg {

/// Uniform periodic grid on the 3-torus: n nodes per axis, period length L,
/// spacing h = L/n.  Node (i1,i2,i3) sits at ((i*L)/n, ...) and all index
/// arithmetic wraps modulo n.
struct Lattice {
    int n = 0;
    double length = 1.0;

    Lattice() = default;
    Lattice(int nodes_per_axis, double period = 1.0)
        : n(nodes_per_axis), length(period) {
        if (n < 8)
            throw ValidationError("Lattice: need n >= 8, got n = " + std::to_string(n));
        if (!(length > 0.0))
            throw ValidationError("Lattice: period length must be positive");
    }

    double spacing() const { return length / n; }

    std::size_t num_nodes() const {
        return static_cast<std::size_t>(n) * n * n;
    }

    int wrap(int i) const {
        i %= n;
        return i < 0 ? i + n : i;
    }

    /// x1-fastest storage order (x3-major rows).
    std::size_t index(int i1, int i2, int i3) const {
        return static_cast<std::size_t>(wrap(i1)) +
               static_cast<std::size_t>(n) *
                   (static_cast<std::size_t>(wrap(i2)) +
                    static_cast<std::size_t>(n) * static_cast<std::size_t>(wrap(i3)));
    }

    /// Node coordinate along one axis; (n*L)/n reproduces L exactly, so the
    /// period closes in the same arithmetic used for interior nodes.
    double coord(int i) const { return (static_cast<double>(i) * length) / n; }

    bool operator==(const Lattice& o) const {
        return n == o.n && length == o.length;
    }
};

/// One real value per node, immutable lattice geometry.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Lattice& lat, double fill = 0.0)
        : lat_(lat), v_(lat.num_nodes(), fill) {}

    const Lattice& lattice() const { return lat_; }
    std::size_t size() const { return v_.size(); }

    double operator[](std::size_t i) const { return v_[i]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator()(int i1, int i2, int i3) const { return v_[lat_.index(i1, i2, i3)]; }
    double& operator()(int i1, int i2, int i3) { return v_[lat_.index(i1, i2, i3)]; }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

    double min() const;
    double max() const;
    double max_abs() const;
    bool all_finite() const;

private:
    Lattice lat_;
    std::vector<double> v_;
};

/// Symmetric 3x3 tensor as its six independent components.
/// Component order: xx, xy, xz, yy, yz, zz.
struct SymTensor3 {
    std::array<double, 6> c{};

    static constexpr int XX = 0, XY = 1, XZ = 2, YY = 3, YZ = 4, ZZ = 5;

    double operator[](int i) const { return c[i]; }
    double& operator[](int i) { return c[i]; }

    /// Storage slot of full-matrix entry (i,j), i,j in 0..2.
    static constexpr int comp_index(int i, int j) {
        constexpr int map[3][3] = {{XX, XY, XZ}, {XY, YY, YZ}, {XZ, YZ, ZZ}};
        return map[i][j];
    }

    double entry(int i, int j) const { return c[comp_index(i, j)]; }

    double trace() const { return c[XX] + c[YY] + c[ZZ]; }

    /// Componentwise sum of squares with off-diagonals counted twice
    /// (the flat-metric squared norm).
    double norm2_flat() const {
        return c[XX] * c[XX] + c[YY] * c[YY] + c[ZZ] * c[ZZ] +
               2.0 * (c[XY] * c[XY] + c[XZ] * c[XZ] + c[YZ] * c[YZ]);
    }
};

/// Node-valued symmetric 2-tensor; component-major storage (six scalar
/// fields back to back, each in the lattice storage order).
class SymTensorField {
public:
    SymTensorField() = default;
    explicit SymTensorField(const Lattice& lat)
        : lat_(lat), v_(6 * lat.num_nodes(), 0.0) {}

    const Lattice& lattice() const { return lat_; }
    std::size_t nodes() const { return lat_.num_nodes(); }

    double comp(int c, std::size_t node) const { return v_[c * nodes() + node]; }
    double& comp(int c, std::size_t node) { return v_[c * nodes() + node]; }
    double comp(int c, int i1, int i2, int i3) const {
        return v_[c * nodes() + lat_.index(i1, i2, i3)];
    }
    double& comp(int c, int i1, int i2, int i3) {
        return v_[c * nodes() + lat_.index(i1, i2, i3)];
    }

    SymTensor3 at(std::size_t node) const {
        SymTensor3 t;
        for (int c = 0; c < 6; ++c) t[c] = comp(c, node);
        return t;
    }
    void set(std::size_t node, const SymTensor3& t) {
        for (int c = 0; c < 6; ++c) comp(c, node) = t[c];
    }

    const std::vector<double>& values() const { return v_; }
    std::vector<double>& values() { return v_; }

private:
    Lattice lat_;
    std::vector<double> v_;
};

inline void require_same_lattice(const Lattice& a, const Lattice& b, const char* what) {
    if (!(a == b))
        throw ValidationError(std::string(what) + ": lattice mismatch");
}

} // namespace cfrg
