#include "cfrg/conformal_data.hpp"

#include <mutex>

#include "cfrg/operators.hpp"

namespace cfrg {

ConformalData::ConformalData(ConformalBackground bg, std::optional<SymTensorField> sigma,
                             double tau) {
    if (sigma) require_same_lattice(sigma->lattice(), bg.lattice(), "ConformalData");
    bg_ = std::move(bg);
    tau_ = tau;
    if (sigma) {
        sigma2_ = norm_squared(*sigma, bg_);
        sigma_ = std::move(sigma);
    } else {
        sigma2_ = ScalarField(bg_.lattice());
    }
    if (!sigma2_.all_finite() || sigma2_.min() < 0.0)
        throw ValidationError("ConformalData: sigma^2 must be finite and nonnegative");
}

ConformalData ConformalData::with_explicit_sigma2(ConformalBackground bg,
                                                  std::optional<SymTensorField> sigma,
                                                  ScalarField sigma2, double tau) {
    require_same_lattice(sigma2.lattice(), bg.lattice(), "ConformalData");
    if (sigma) require_same_lattice(sigma->lattice(), bg.lattice(), "ConformalData");
    if (!sigma2.all_finite() || sigma2.min() < 0.0)
        throw ValidationError("ConformalData: sigma^2 must be finite and nonnegative");
    ConformalData d;
    d.bg_ = std::move(bg);
    d.sigma_ = std::move(sigma);
    d.sigma2_ = std::move(sigma2);
    d.tau_ = tau;
    return d;
}

ClassTag ConformalData::class_tag(double yamabe_tol) const {
    static std::mutex mu;
    std::shared_ptr<const YamabeSign> sign;
    {
        std::lock_guard<std::mutex> lock(mu);
        sign = cached_sign_;
    }
    if (!sign) {
        sign = std::make_shared<const YamabeSign>(yamabe_sign(bg_, yamabe_tol).sign);
        std::lock_guard<std::mutex> lock(mu);
        cached_sign_ = sign;
    }
    return ClassTag{*sign, sigma2_is_zero(), tau_is_zero()};
}

} // namespace cfrg
