#pragma once

#include <memory>
#include <optional>

#include "cfrg/background.hpp"
#include "cfrg/lattice.hpp"
#include "cfrg/yamabe.hpp"

namespace cfrg {

/// (Yamabe sign, sigma^2 identically zero, tau zero): the cell coordinates of
/// the solvability table.
struct ClassTag {
    YamabeSign sign = YamabeSign::Zero;
    bool sigma2_zero = true;
    bool tau_zero = true;
};

/// Free conformal data (background metric, TT tensor sigma or absent, constant
/// tau) with the cached pointwise norm sigma^2.
class ConformalData {
public:
    ConformalData(ConformalBackground bg, std::optional<SymTensorField> sigma, double tau);

    const ConformalBackground& background() const { return bg_; }
    const Lattice& lattice() const { return bg_.lattice(); }
    const SymTensorField* sigma() const { return sigma_ ? &*sigma_ : nullptr; }
    const ScalarField& sigma2() const { return sigma2_; }
    double tau() const { return tau_; }

    bool sigma2_is_zero() const { return sigma2_.max() < 1e-14; }
    bool tau_is_zero() const { return tau_ == 0.0; }

    /// Yamabe sign is computed on first use and cached.
    ClassTag class_tag(double yamabe_tol = 1e-6) const;

    /// Used by exact transforms to install a rescaled cache without
    /// recomputing it from sigma.
    static ConformalData with_explicit_sigma2(ConformalBackground bg,
                                              std::optional<SymTensorField> sigma,
                                              ScalarField sigma2, double tau);

private:
    ConformalData() = default;

    ConformalBackground bg_ = ConformalBackground::flat(Lattice(8), 0.0);
    std::optional<SymTensorField> sigma_;
    ScalarField sigma2_;
    double tau_ = 0.0;
    mutable std::shared_ptr<const YamabeSign> cached_sign_;
};

} // namespace cfrg
