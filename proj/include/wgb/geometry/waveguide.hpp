#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/profile.hpp"
#include "wgb/numerics/sup_search.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace wgb {

struct SupConfig {
    int n_seed = 10000;
    int n_refine = 5;
    /// Multiplies sampled sup norms; values > 1 give conservative bounds.
    double safety_factor = 1.0;
};

struct Norms {
    double gamma_sup = 0.0;
    double gamma1_sup = 0.0;
    double gamma2_sup = 0.0;
    double delta_minus = 1.0;
    double delta_plus = 1.0;
};

/// Sampled sup norms of |gamma|, |gamma'|, |gamma''| over [-b, b] and delta_pm = 1 -+ a ||gamma||.
inline Norms sup_norms(const CurvatureProfile& profile, double a, const SupConfig& cfg = {}) {
    require(std::isfinite(a) && a > 0.0, "halfwidth a must be positive and finite");
    require(cfg.safety_factor >= 1.0, "sup-norm safety factor must be >= 1");
    const double b = profile.support();
    auto sup_of = [&](auto component) {
        const auto r = numerics::sup_search([&](double s) { return std::abs(component(profile.eval(s))); }, -b, b,
                                            cfg.n_seed, cfg.n_refine);
        return cfg.safety_factor * r.max;
    };
    Norms n;
    n.gamma_sup = sup_of([](const CurvatureSample& c) { return c.gamma; });
    n.gamma1_sup = sup_of([](const CurvatureSample& c) { return c.d1; });
    n.gamma2_sup = sup_of([](const CurvatureSample& c) { return c.d2; });
    if (!(a * n.gamma_sup < 1.0))
        throw AssumptionError("a * ||gamma||_inf = " + std::to_string(a * n.gamma_sup) +
                              " violates a * ||gamma||_inf < 1");
    n.delta_minus = 1.0 - a * n.gamma_sup;
    n.delta_plus = 1.0 + a * n.gamma_sup;
    return n;
}

/// A curved planar strip of halfwidth a around an axis with curvature profile gamma.
class Waveguide {
public:
    Waveguide(CurvatureProfile profile, double a, const SupConfig& cfg = {})
        : profile_(std::move(profile)), a_(a), cfg_(cfg), norms_(sup_norms(profile_, a, cfg)) {}

    const CurvatureProfile& profile() const noexcept { return profile_; }
    double a() const noexcept { return a_; }
    double b() const { return profile_.support(); }
    const Norms& norms() const noexcept { return norms_; }
    const SupConfig& sup_config() const noexcept { return cfg_; }

    /// Bottom of the essential spectrum of the one-particle operator, (pi / 2a)^2.
    double threshold() const {
        const double k = std::numbers::pi / (2.0 * a_);
        return k * k;
    }

    /// Curvature-induced potential of the straightened operator at (s, u), |u| <= a:
    ///   V = -gamma^2 / 4(1+u gamma)^2 + u gamma'' / 2(1+u gamma)^3 - 5 u^2 gamma'^2 / 4(1+u gamma)^4.
    double effective_potential(double s, double u) const {
        if (!(std::abs(u) <= a_)) throw InputError("transverse coordinate u outside [-a, a]");
        const CurvatureSample c = profile_.eval(s);
        const double f = 1.0 + u * c.gamma;
        const double f2 = f * f;
        return -c.gamma * c.gamma / (4.0 * f2) + u * c.d2 / (2.0 * f2 * f) - 1.25 * u * u * c.d1 * c.d1 / (f2 * f2);
    }

private:
    CurvatureProfile profile_;
    double a_;
    SupConfig cfg_;
    Norms norms_;
};

inline double effective_potential(const Waveguide& guide, double s, double u) { return guide.effective_potential(s, u); }

} // namespace wgb
