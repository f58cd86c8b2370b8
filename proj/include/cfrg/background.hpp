#pragma once

#include <optional>
#include <utility>

#include "cfrg/lattice.hpp"

namespace cfrg {

enum class MetricMode {
    /// Metric tensor is the identity at every node; the scalar curvature is a
    /// prescribed constant (coefficient-level surrogate covering all signs).
    FlatPrescribedR,
    /// Metric psi^4 * (flat) with a node-valued conformal factor psi > 0.
    ConformallyFlat,
};

/// The background metric: flat with prescribed constant curvature, or
/// conformally flat via a positive factor psi.
class ConformalBackground {
public:
    static ConformalBackground flat(const Lattice& lat, double r_const) {
        return ConformalBackground(lat, MetricMode::FlatPrescribedR, r_const, std::nullopt);
    }

    static ConformalBackground conformally_flat(ScalarField psi) {
        if (!psi.all_finite() || psi.min() <= 0.0)
            throw ValidationError("ConformalBackground: psi must be positive and finite everywhere");
        Lattice lat = psi.lattice();
        return ConformalBackground(lat, MetricMode::ConformallyFlat, 0.0, std::move(psi));
    }

    const Lattice& lattice() const { return lat_; }
    MetricMode mode() const { return mode_; }
    bool is_flat() const { return mode_ == MetricMode::FlatPrescribedR; }

    double r_const() const {
        if (!is_flat())
            throw ValidationError("ConformalBackground: r_const only defined in flat mode");
        return r_const_;
    }

    const ScalarField& psi() const {
        if (is_flat())
            throw ValidationError("ConformalBackground: psi only defined in conformally flat mode");
        return *psi_;
    }

private:
    ConformalBackground(const Lattice& lat, MetricMode mode, double r_const,
                        std::optional<ScalarField> psi)
        : lat_(lat), mode_(mode), r_const_(r_const), psi_(std::move(psi)) {}

    Lattice lat_;
    MetricMode mode_;
    double r_const_;
    std::optional<ScalarField> psi_;
};

} // namespace cfrg
