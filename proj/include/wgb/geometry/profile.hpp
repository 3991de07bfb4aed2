#pragma once

#include "wgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace wgb {

/// gamma(s) and its first two arc-length derivatives.
struct CurvatureSample {
    double gamma = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

enum class ProfileKind { cosine_bump, smoothed_arc, tabulated };

inline std::string_view to_string(ProfileKind kind) {
    switch (kind) {
    case ProfileKind::cosine_bump: return "bump";
    case ProfileKind::smoothed_arc: return "arc";
    case ProfileKind::tabulated: return "tabulated";
    }
    return "unknown";
}

namespace profiles {

/// gamma0 * cos^2(pi s / 2b) on [-b, b], zero outside. C^1 at +-b, gamma'' jumps there.
struct CosineBump {
    double gamma0;
    double b;

    CurvatureSample eval(double s) const {
        if (!(std::abs(s) < b)) return {};
        const double k = std::numbers::pi / b;
        const double c = std::cos(k * s);
        return {0.5 * gamma0 * (1.0 + c), -0.5 * gamma0 * k * std::sin(k * s), -0.5 * gamma0 * k * k * c};
    }

    double support() const { return b; }

    // |gamma''| has kinks where cos(pi s / b) changes sign.
    std::vector<double> breakpoints() const { return {-b, -0.5 * b, 0.5 * b, b}; }
};

/// Constant curvature gamma0 on [lo, hi], joined to zero by cubic smoothstep
/// ramps of width `ramp` on either side.
struct SmoothedArc {
    double gamma0;
    double lo;
    double hi;
    double ramp;

    CurvatureSample eval(double s) const {
        if (s <= lo - ramp || s >= hi + ramp) return {};
        if (s >= lo && s <= hi) return {gamma0, 0.0, 0.0};
        // x runs 0 -> 1 from the outer edge of the ramp towards the plateau.
        const bool left = s < lo;
        const double x = left ? (s - (lo - ramp)) / ramp : ((hi + ramp) - s) / ramp;
        const double dir = left ? 1.0 : -1.0;
        const double h = x * x * (3.0 - 2.0 * x);
        const double dh = 6.0 * x * (1.0 - x);
        const double d2h = 6.0 - 12.0 * x;
        return {gamma0 * h, dir * gamma0 * dh / ramp, gamma0 * d2h / (ramp * ramp)};
    }

    double support() const { return std::max(std::abs(lo - ramp), std::abs(hi + ramp)); }

    std::vector<double> breakpoints() const {
        return {lo - ramp, lo - 0.5 * ramp, lo, hi, hi + 0.5 * ramp, hi + ramp};
    }
};

/// Clamped cubic spline through (s_i, gamma_i) with zero end slopes; zero outside the knots.
class TabulatedSpline {
public:
    TabulatedSpline(std::vector<double> knots, std::vector<double> values)
        : knots_(std::move(knots)), values_(std::move(values)) {
        const std::size_t n = knots_.size();
        require(n >= 3 && values_.size() == n, "tabulated profile needs >= 3 knots and matching values");
        for (std::size_t i = 0; i < n; ++i)
            require(std::isfinite(knots_[i]) && std::isfinite(values_[i]), "tabulated profile has non-finite samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            require(knots_[i + 1] > knots_[i], "tabulated knots must be strictly increasing");
        double scale = 0.0;
        for (double v : values_) scale = std::max(scale, std::abs(v));
        const double edge_tol = 1e-12 * std::max(scale, 1.0);
        require(std::abs(values_.front()) <= edge_tol && std::abs(values_.back()) <= edge_tol,
                "tabulated curvature must vanish at the support boundary");
        values_.front() = 0.0;
        values_.back() = 0.0;
        solve_second_derivatives();
    }

    CurvatureSample eval(double s) const {
        if (!(s > knots_.front() && s < knots_.back())) return {};
        const auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
        const double h = knots_[i + 1] - knots_[i];
        const double A = (knots_[i + 1] - s) / h;
        const double B = (s - knots_[i]) / h;
        const double Mi = second_[i], Mj = second_[i + 1];
        const double y = A * values_[i] + B * values_[i + 1] + ((A * A * A - A) * Mi + (B * B * B - B) * Mj) * h * h / 6.0;
        const double dy = (values_[i + 1] - values_[i]) / h - (3.0 * A * A - 1.0) * h * Mi / 6.0 +
                          (3.0 * B * B - 1.0) * h * Mj / 6.0;
        const double d2y = A * Mi + B * Mj;
        return {y, dy, d2y};
    }

    double support() const { return std::max(std::abs(knots_.front()), std::abs(knots_.back())); }
    std::vector<double> breakpoints() const { return knots_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& values() const { return values_; }

private:
    // Tridiagonal system for the knot second derivatives with clamped
    // (zero-slope) ends, solved by the Thomas algorithm.
    void solve_second_derivatives() {
        const std::size_t n = knots_.size();
        std::vector<double> sub(n, 0.0), diag(n, 0.0), sup(n, 0.0), rhs(n, 0.0);
        auto h = [&](std::size_t i) { return knots_[i + 1] - knots_[i]; };
        auto slope = [&](std::size_t i) { return (values_[i + 1] - values_[i]) / h(i); };
        diag[0] = h(0) / 3.0;
        sup[0] = h(0) / 6.0;
        rhs[0] = slope(0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            sub[i] = h(i - 1) / 6.0;
            diag[i] = (h(i - 1) + h(i)) / 3.0;
            sup[i] = h(i) / 6.0;
            rhs[i] = slope(i) - slope(i - 1);
        }
        sub[n - 1] = h(n - 2) / 6.0;
        diag[n - 1] = h(n - 2) / 3.0;
        rhs[n - 1] = -slope(n - 2);
        for (std::size_t i = 1; i < n; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        second_.assign(n, 0.0);
        second_[n - 1] = rhs[n - 1] / diag[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) second_[i] = (rhs[i] - sup[i] * second_[i + 1]) / diag[i];
    }

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> second_;
};

} // namespace profiles

/// Signed curvature of the waveguide axis as a function of arc length.
/// Every profile vanishes identically (with its derivatives) for |s| > support().
class CurvatureProfile {
public:
    using Variant = std::variant<profiles::CosineBump, profiles::SmoothedArc, profiles::TabulatedSpline>;

    static CurvatureProfile cosine_bump(double gamma0, double b) {
        require(std::isfinite(gamma0) && std::isfinite(b), "bump parameters must be finite");
        require(b > 0.0, "bump support radius b must be positive");
        return CurvatureProfile(profiles::CosineBump{gamma0, b});
    }

    /// A straight guide, represented as a zero-amplitude bump with nominal support b.
    static CurvatureProfile straight(double b) { return cosine_bump(0.0, b); }

    static CurvatureProfile smoothed_arc(double gamma0, double plateau_lo, double plateau_hi, double ramp) {
        require(std::isfinite(gamma0) && std::isfinite(plateau_lo) && std::isfinite(plateau_hi) && std::isfinite(ramp),
                "arc parameters must be finite");
        require(plateau_lo <= plateau_hi, "arc plateau must satisfy lo <= hi");
        require(ramp > 0.0, "arc ramp width must be positive");
        profiles::SmoothedArc arc{gamma0, plateau_lo, plateau_hi, ramp};
        require(arc.support() > 0.0, "arc support radius b must be positive");
        return CurvatureProfile(arc);
    }

    static CurvatureProfile tabulated(std::vector<double> knots, std::vector<double> values) {
        profiles::TabulatedSpline spline(std::move(knots), std::move(values));
        require(spline.support() > 0.0, "tabulated support radius b must be positive");
        return CurvatureProfile(std::move(spline));
    }

    CurvatureSample eval(double s) const {
        return std::visit([s](const auto& p) { return p.eval(s); }, impl_);
    }
    double operator()(double s) const { return eval(s).gamma; }

    /// Support radius b: gamma vanishes for |s| > b.
    double support() const {
        return std::visit([](const auto& p) { return p.support(); }, impl_);
    }

    /// Points in [-b, b] where gamma'' may jump or |gamma''| may kink, sorted.
    std::vector<double> breakpoints() const {
        auto pts = std::visit([](const auto& p) { return p.breakpoints(); }, impl_);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

    ProfileKind kind() const { return static_cast<ProfileKind>(impl_.index()); }
    const Variant& variant() const noexcept { return impl_; }

private:
    template <class P>
    explicit CurvatureProfile(P p) : impl_(std::move(p)) {}

    Variant impl_;
};

inline CurvatureSample curvature_eval(const CurvatureProfile& profile, double s) { return profile.eval(s); }

} // namespace wgb
