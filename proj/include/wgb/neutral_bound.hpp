#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/waveguide.hpp"
#include "wgb/numerics/quadrature.hpp"
#include "wgb/numerics/sup_search.hpp"
#include "wgb/spin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace wgb {

/// Majorant of the effective potential, independent of u:
///   W(s) = gamma^2 / 4 delta_-^2 + a |gamma''| / 2 delta_-^3 + 5 a^2 gamma'^2 / 4 delta_-^4.
inline double w_tilde(const Waveguide& guide, double s) {
    const CurvatureSample c = guide.profile().eval(s);
    const double a = guide.a();
    const double dm = guide.norms().delta_minus;
    const double dm2 = dm * dm;
    return c.gamma * c.gamma / (4.0 * dm2) + a * std::abs(c.d2) / (2.0 * dm2 * dm) +
           1.25 * a * a * c.d1 * c.d1 / (dm2 * dm2);
}

/// Energy of the j-th transverse mode above the first one, (pi / 2a)^2 (j^2 - 1).
inline double mode_offset(const Waveguide& guide, int j) {
    return guide.threshold() * (static_cast<double>(j) * j - 1.0);
}

/// Part of the majorant that reaches below the j-th transverse threshold,
/// max{0, W(s) - (pi / 2a)^2 (j^2 - 1)}, for j >= 2.
inline double w_tilde_j(const Waveguide& guide, int j, double s) {
    require(j >= 2, "w_tilde_j is defined for j >= 2");
    return std::max(0.0, w_tilde(guide, s) - mode_offset(guide, j));
}

struct WTildeStats {
    double w_sup = 0.0;
    double argmax = 0.0;
    int j_max = 1;
};

/// Highest transverse mode index whose cutoff majorant can be nonzero:
/// the integer part of sqrt(1 + (2a / pi)^2 ||W||).
inline int mode_cutoff(double a, double w_sup) {
    const double r = 2.0 * a / std::numbers::pi;
    return std::max(1, static_cast<int>(std::floor(std::sqrt(1.0 + r * r * w_sup))));
}

inline WTildeStats w_tilde_stats(const Waveguide& guide) {
    const SupConfig& cfg = guide.sup_config();
    const double b = guide.b();
    const auto sup = numerics::sup_search([&](double s) { return w_tilde(guide, s); }, -b, b, cfg.n_seed, cfg.n_refine);
    WTildeStats st;
    st.w_sup = cfg.safety_factor * sup.max;
    st.argmax = sup.argmax;
    st.j_max = mode_cutoff(guide.a(), st.w_sup);
    return st;
}

namespace detail {

/// Points where f crosses `level`, found by sampling (plus `extra`) and bisection.
/// max{0, f - level} has kinks there, so they are used as quadrature breakpoints.
template <class F>
std::vector<double> level_crossings(F&& f, double level, double lo, double hi, std::vector<double> extra,
                                    int samples = 4001) {
    std::vector<double> xs = std::move(extra);
    for (int i = 0; i < samples; ++i) xs.push_back(lo + (hi - lo) * i / (samples - 1));
    std::sort(xs.begin(), xs.end());
    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        double x0 = xs[i], x1 = xs[i + 1];
        const bool above0 = f(x0) > level;
        if (above0 == (f(x1) > level)) continue;
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (x0 + x1);
            if (m <= x0 || m >= x1) break;
            ((f(m) > level) == above0 ? x0 : x1) = m;
        }
        roots.push_back(x0);
        roots.push_back(x1);
    }
    return roots;
}

} // namespace detail

struct HigherModeTerm {
    int j = 0;
    double kappa = 0.0;    ///< (pi / 2a) sqrt(j^2 - 1)
    double integral = 0.0; ///< int W_j ds
    double value = 0.0;    ///< a delta_+^2 / (pi sqrt(j^2 - 1)) * integral
};

/// Terms of the Birman-Schwinger/Pauli bound on the number of bindable neutral fermions.
struct NeutralBoundReport {
    double I1 = 0.0; ///< int W ds
    double I2 = 0.0; ///< int int W(s) |s - t| W(t) ds dt
    double w_sup = 0.0;
    int j_max = 1;
    std::vector<HigherModeTerm> higher_mode_terms;
    double delta_plus = 1.0;
    double lowest_mode_term = 0.0; ///< delta_+^2 I2 / I1, zero when I1 = 0
    double rhs_real = 0.0;
    long long n_max = 0;
    Spin spin;
};

/// Assembles the bound from its integral ingredients. Kept separate from the
/// quadrature so that reports can be re-derived from stored fields.
inline void finalize_neutral_bound(NeutralBoundReport& r) {
    const double dp2 = r.delta_plus * r.delta_plus;
    r.lowest_mode_term = r.I1 > 0.0 ? dp2 * r.I2 / r.I1 : 0.0;
    double braces = 1.0 + r.lowest_mode_term;
    for (const auto& t : r.higher_mode_terms) braces += t.value;
    r.rhs_real = r.spin.multiplicity() * braces;
    r.n_max = static_cast<long long>(std::floor(r.rhs_real));
}

inline NeutralBoundReport neutral_particle_bound(const Waveguide& guide, Spin spin,
                                                 const numerics::QuadratureConfig& qcfg = {}) {
    NeutralBoundReport r;
    r.spin = spin;
    r.delta_plus = guide.norms().delta_plus;
    const double a = guide.a(), b = guide.b();
    const auto breaks = guide.profile().breakpoints();
    auto W = [&](double s) { return w_tilde(guide, s); };

    const WTildeStats st = w_tilde_stats(guide);
    r.w_sup = st.w_sup;
    r.j_max = st.j_max;
    r.I1 = numerics::integrate_1d(W, -b, b, qcfg, breaks);
    r.I2 = r.I1 > 0.0 ? numerics::integrate_kernel_abs(W, -b, b, qcfg, breaks) : 0.0;

    const double dp2 = r.delta_plus * r.delta_plus;
    std::vector<double> breaks_with_peak = breaks;
    breaks_with_peak.push_back(st.argmax);
    for (int j = 2; j <= r.j_max; ++j) {
        HigherModeTerm t;
        t.j = j;
        const double root = std::sqrt(static_cast<double>(j) * j - 1.0);
        t.kappa = std::numbers::pi / (2.0 * a) * root;
        std::vector<double> pts = detail::level_crossings(W, mode_offset(guide, j), -b, b, breaks_with_peak);
        pts.insert(pts.end(), breaks.begin(), breaks.end());
        t.integral = numerics::integrate_1d([&](double s) { return w_tilde_j(guide, j, s); }, -b, b, qcfg, pts);
        t.value = a * dp2 / (std::numbers::pi * root) * t.integral;
        r.higher_mode_terms.push_back(t);
    }
    finalize_neutral_bound(r);
    return r;
}

} // namespace wgb
