#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/waveguide.hpp"
#include "wgb/neutral_bound.hpp"
#include "wgb/numerics/lattice.hpp"
#include "wgb/numerics/sup_search.hpp"
#include "wgb/spin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace wgb {

/// Constants of the IMS localization with v(xi) = sin(4 pi xi^2 (1 - 2 xi^2)):
/// C0 = max (v'^2 + g'^2) = (8 pi)^2 / 27, and the admissibility coefficient
/// 18 sqrt(2) C0 = 2 sqrt(2) (8 pi)^2 / 3 in beta > 18 sqrt(2) C0 / e^2.
struct LocalizationConstants {
    double C0;
    double beta_coeff;
};

inline constexpr LocalizationConstants localization_constants() {
    constexpr double eight_pi_sq = 64.0 * std::numbers::pi * std::numbers::pi;
    constexpr double c0 = eight_pi_sq / 27.0;
    return {c0, 18.0 * std::numbers::sqrt2 * c0};
}

inline constexpr double default_beta_slack = 1e-9;

/// Smallest admissible localization radius, max{2b, 18 sqrt(2) C0 / e^2} (1 + slack).
inline double beta_min(double b, double charge, double slack = default_beta_slack) {
    require(charge > 0.0 && std::isfinite(charge), "charge e must be positive");
    return std::max(2.0 * b, localization_constants().beta_coeff / (charge * charge)) * (1.0 + slack);
}

inline double beta_min(const Waveguide& guide, double charge, double slack = default_beta_slack) {
    return beta_min(guide.b(), charge, slack);
}

/// Sum of the N lowest Dirichlet eigenvalues of (2S+1) copies of the Laplacian on the
/// rectangle [-3 beta delta_+ / 2, 3 beta delta_+ / 2] x [-a, a].
///
/// For S = 1/2 this is 2 sum_{m<=n} lambda_m (N = 2n) or that plus lambda_{n+1} (N = 2n+1).
inline double t_beta(double length_s, double length_u, long long n_particles, Spin spin) {
    require(n_particles >= 1, "t_beta needs N >= 1");
    const long long g = spin.multiplicity();
    const long long full = n_particles / g;
    const long long rem = n_particles % g;
    numerics::LatticeSpectrum spectrum(length_s, length_u);
    double partial = 0.0;
    for (long long m = 0; m < full; ++m) partial += spectrum.next().value;
    double total = static_cast<double>(g) * partial;
    if (rem > 0) total += static_cast<double>(rem) * spectrum.next().value;
    return total;
}

inline double t_beta(const Waveguide& guide, long long n_particles, double beta, Spin spin) {
    require(beta > 0.0 && std::isfinite(beta), "beta must be positive");
    return t_beta(3.0 * beta * guide.norms().delta_plus, 2.0 * guide.a(), n_particles, spin);
}

/// A charged-particle setting: waveguide, sup of the potential majorant, spin and charge.
class ChargedProblem {
public:
    ChargedProblem(Waveguide guide, Spin spin, double charge)
        : guide_(std::move(guide)), spin_(spin), charge_(charge) {
        require(charge > 0.0 && std::isfinite(charge), "charge e must be positive");
        if (!(2.0 * guide_.b() > guide_.a()))
            throw AssumptionError("the emptiness condition requires 2b > a");
        w_sup_ = w_tilde_stats(guide_).w_sup;
    }

    const Waveguide& guide() const noexcept { return guide_; }
    Spin spin() const noexcept { return spin_; }
    double charge() const noexcept { return charge_; }
    double w_sup() const noexcept { return w_sup_; }
    double beta_min() const { return wgb::beta_min(guide_, charge_); }

private:
    Waveguide guide_;
    Spin spin_;
    double charge_;
    double w_sup_ = 0.0;
};

struct AbsenceMargin {
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
};

/// Both sides of the emptiness condition at (N, beta):
///   lhs = T_beta(N) + e^2 N (N - 1) / (2 beta sqrt 7)
///   rhs = ||W|| N + (pi / 2a)^2 N + e^2 / (18 beta sqrt 2)
inline AbsenceMargin absence_margin(const ChargedProblem& p, long long n_particles, double beta) {
    require(n_particles >= 2, "the emptiness condition needs N >= 2");
    if (!(beta >= p.beta_min()))
        throw InputError("beta = " + std::to_string(beta) + " is below beta_min = " + std::to_string(p.beta_min()));
    const double e2 = p.charge() * p.charge();
    const double n = static_cast<double>(n_particles);
    AbsenceMargin m;
    m.lhs = t_beta(p.guide(), n_particles, beta, p.spin()) + e2 * n * (n - 1.0) / (2.0 * beta * std::sqrt(7.0));
    m.rhs = p.w_sup() * n + p.guide().threshold() * n + e2 / (18.0 * beta * std::numbers::sqrt2);
    m.margin = m.lhs - m.rhs;
    return m;
}

/// Coefficient of e^2 in the margin at fixed (N, beta).
inline double margin_charge_slope(long long n_particles, double beta) {
    const double n = static_cast<double>(n_particles);
    return n * (n - 1.0) / (2.0 * beta * std::sqrt(7.0)) - 1.0 / (18.0 * beta * std::numbers::sqrt2);
}

struct BetaSearchConfig {
    int points = 400;    ///< log-spaced grid size
    double span = 1e6;   ///< grid runs from beta_min to beta_min * span
    bool refine = true;  ///< golden-section polish around the best grid point
};

struct EmptinessCertificate {
    long long N = 0;
    double beta = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    double beta_min = 0.0;
    Spin spin;
    double charge = 0.0;
};

inline std::vector<double> beta_grid(double beta_lo, const BetaSearchConfig& cfg) {
    require(cfg.points >= 2 && cfg.span > 1.0, "beta grid needs >= 2 points and span > 1");
    std::vector<double> grid(cfg.points);
    const double log_span = std::log(cfg.span);
    for (int i = 0; i < cfg.points; ++i)
        grid[i] = i == 0 ? beta_lo : beta_lo * std::exp(log_span * i / (cfg.points - 1));
    return grid;
}

struct MarginSample {
    double beta;
    double margin;
};

inline std::vector<MarginSample> margin_curve(const ChargedProblem& p, long long n_particles,
                                              const BetaSearchConfig& cfg = {}) {
    std::vector<MarginSample> out;
    for (double beta : beta_grid(p.beta_min(), cfg)) out.push_back({beta, absence_margin(p, n_particles, beta).margin});
    return out;
}

/// Searches beta for the largest margin; returns a certificate when it is nonnegative.
inline std::optional<EmptinessCertificate> emptiness_certificate(const ChargedProblem& p, long long n_particles,
                                                                 const BetaSearchConfig& cfg = {}) {
    require(n_particles >= 2, "the emptiness condition needs N >= 2");
    const auto curve = margin_curve(p, n_particles, cfg);
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i].margin > curve[best].margin) best = i;
    double beta = curve[best].beta;
    double margin = curve[best].margin;
    if (cfg.refine) {
        const double lo = curve[best == 0 ? 0 : best - 1].beta;
        const double hi = curve[std::min(best + 1, curve.size() - 1)].beta;
        const auto polished = numerics::golden_section_max(
            [&](double x) { return absence_margin(p, n_particles, std::max(x, lo)).margin; }, lo, hi);
        if (polished.max > margin) beta = std::max(polished.argmax, lo);
    }
    const AbsenceMargin m = absence_margin(p, n_particles, beta);
    if (!(m.margin >= 0.0)) return std::nullopt;
    EmptinessCertificate c;
    c.N = n_particles;
    c.beta = beta;
    c.lhs = m.lhs;
    c.rhs = m.rhs;
    c.margin = m.margin;
    c.beta_min = p.beta_min();
    c.spin = p.spin();
    c.charge = p.charge();
    return c;
}

struct ScanEntry {
    long long N = 0;
    std::optional<EmptinessCertificate> certificate;
};

struct ChargedScanReport {
    long long n_lo = 2;
    long long n_hi = 1; ///< empty when n_hi < n_lo
    std::vector<ScanEntry> entries;
    std::optional<long long> min_unbindable_N;
    bool upward_closed = true; ///< every N above min_unbindable_N in range is certified
};

inline void summarize_scan(ChargedScanReport& r) {
    r.min_unbindable_N.reset();
    r.upward_closed = true;
    for (const auto& e : r.entries) {
        if (e.certificate && !r.min_unbindable_N) r.min_unbindable_N = e.N;
        if (!e.certificate && r.min_unbindable_N) r.upward_closed = false;
    }
}

/// Certifies each N in [n_lo, n_hi] independently. `threads` = 0 uses the hardware count;
/// output does not depend on scheduling.
inline ChargedScanReport scan_unbindable(const ChargedProblem& p, long long n_lo, long long n_hi,
                                         const BetaSearchConfig& cfg = {}, unsigned threads = 1) {
    ChargedScanReport r;
    r.n_lo = n_lo;
    r.n_hi = n_hi;
    if (n_hi < n_lo) return r;
    require(n_lo >= 2 && n_hi <= 10000, "N range must lie within [2, 10000]");
    const std::size_t count = static_cast<std::size_t>(n_hi - n_lo + 1);
    r.entries.resize(count);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> failures(count);
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            r.entries[i].N = n_lo + static_cast<long long>(i);
            try {
                r.entries[i].certificate = emptiness_certificate(p, r.entries[i].N, cfg);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
    summarize_scan(r);
    return r;
}

} // namespace wgb
