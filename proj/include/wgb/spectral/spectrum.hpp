#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/waveguide.hpp"
#include "wgb/spectral/eigensolver.hpp"
#include "wgb/spectral/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace wgb::spectral {

/// One eigenvalue tracked across the coarse/fine grid pair.
struct EigenLevel {
    double coarse = 0.0;
    double fine = 0.0;
    double extrapolated = 0.0;
    double error = 0.0; ///< estimated error, >= 0
};

struct SpectralResult {
    double a = 0.0;                   ///< halfwidth
    double threshold = 0.0;           ///< (pi / 2a)^2
    GridSpec coarse;
    GridSpec fine;
    std::vector<EigenLevel> levels;   ///< lowest levels, at least one
    std::vector<double> eigenvalues;  ///< extrapolated levels below the threshold, ascending
    std::vector<double> errors;       ///< matching error estimates
    int raw_count = 0;                ///< levels with extrapolated value < threshold
    int conservative_count = 0;       ///< levels with extrapolated value + error < threshold
    std::vector<double> s_trunc_history;
};

/// Richardson extrapolation of the k lowest levels over a grid and its refinement.
///
/// Each level is extrapolated through its distance to the discrete transverse
/// threshold of its own grid, which removes the dominant transverse
/// discretization error before the h^2 extrapolation. The error estimate is the
/// fine-grid correction |gap_fine - gap_coarse| / 3, a bound on the fine-grid error
/// that overestimates the error of the extrapolated value.
inline EigenLevel richardson_level(double coarse_value, double fine_value, double a, int coarse_n_u) {
    const double t = std::numbers::pi / (2.0 * a);
    const double gap_c = discrete_threshold(a, coarse_n_u) - coarse_value;
    const double gap_f = discrete_threshold(a, 2 * coarse_n_u + 1) - fine_value;
    const double gap_x = (4.0 * gap_f - gap_c) / 3.0;
    return {coarse_value, fine_value, t * t - gap_x, std::abs(gap_f - gap_c) / 3.0};
}

inline std::vector<EigenLevel> richardson_levels(const Waveguide& guide, const GridSpec& coarse, int k,
                                                 const EigenSolverConfig& eig = {}) {
    const auto lc = lowest_eigenvalues(assemble_h1(guide, coarse), k, eig);
    const auto lf = lowest_eigenvalues(assemble_h1(guide, coarse.refined()), k, eig);
    std::vector<EigenLevel> out(k);
    for (int i = 0; i < k; ++i) out[i] = richardson_level(lc[i], lf[i], guide.a(), coarse.n_u);
    return out;
}

/// Fills the below-threshold list and both counts from the levels.
inline void summarize_levels(SpectralResult& r) {
    r.eigenvalues.clear();
    r.errors.clear();
    r.raw_count = 0;
    r.conservative_count = 0;
    std::vector<EigenLevel> sorted = r.levels;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const EigenLevel& x, const EigenLevel& y) { return x.extrapolated < y.extrapolated; });
    for (const auto& level : sorted) {
        if (level.extrapolated < r.threshold) {
            ++r.raw_count;
            r.eigenvalues.push_back(level.extrapolated);
            r.errors.push_back(level.error);
        }
        if (level.extrapolated + level.error < r.threshold) ++r.conservative_count;
    }
}

struct SpectrumConfig {
    int n_s = 256;               ///< coarse longitudinal nodes at the initial truncation
    int n_u = 32;                ///< coarse transverse nodes
    double s_trunc = 0.0;        ///< fixed half-length; 0 selects it adaptively
    double max_step = 0.0;       ///< cap on the coarse longitudinal step; 0 means b / 16
    double decay_lengths = 6.0;  ///< S_trunc >= b + decay_lengths / kappa
    int max_n_s = 2048;          ///< coarse longitudinal node cap for adaptive truncation
    int max_rounds = 8;
    EigenSolverConfig eig;
};

/// Default initial truncation, b + 10 (2a / pi).
inline double initial_truncation(const Waveguide& guide) {
    return guide.b() + 10.0 * (2.0 * guide.a() / std::numbers::pi);
}

namespace detail {

struct TruncationPlan {
    double h_cap;
    double s_max;
};

inline GridSpec grid_for(double s_trunc, const SpectrumConfig& cfg, const TruncationPlan& plan) {
    const int needed = static_cast<int>(std::ceil(2.0 * s_trunc / plan.h_cap)) - 1;
    return {s_trunc, std::clamp(needed, cfg.n_s, std::max(cfg.n_s, cfg.max_n_s)), cfg.n_u};
}

} // namespace detail

/// Counts bound states of the one-particle operator below (pi / 2a)^2.
///
/// With adaptive truncation the half-length starts at b + 10 (2a / pi) and is
/// reset to b + decay_lengths / kappa, kappa = sqrt(threshold - mu_1) measured on
/// the coarse grid, growing fourfold past b while no level lies below the
/// threshold. The longitudinal step never exceeds max_step. Dirichlet ends
/// only raise eigenvalues, so the conservative count is a lower bound for the
/// true number of bound states up to discretization error.
inline SpectralResult discrete_spectrum_count(const Waveguide& guide, const SpectrumConfig& cfg = {}) {
    const double b = guide.b();
    SpectralResult r;
    r.a = guide.a();
    r.threshold = guide.threshold();

    GridSpec coarse;
    if (cfg.s_trunc > 0.0) {
        coarse = {cfg.s_trunc, cfg.n_s, cfg.n_u};
        validate_grid(coarse, b);
        r.s_trunc_history.push_back(cfg.s_trunc);
    } else {
        const double s0 = initial_truncation(guide);
        const double h0 = 2.0 * s0 / (cfg.n_s + 1);
        detail::TruncationPlan plan{std::max(h0, cfg.max_step > 0.0 ? cfg.max_step : b / 16.0), 0.0};
        plan.s_max = 0.5 * (std::max(cfg.n_s, cfg.max_n_s) + 1) * plan.h_cap;
        double s = s0;
        for (int round = 0; round < cfg.max_rounds; ++round) {
            r.s_trunc_history.push_back(s);
            const GridSpec g = detail::grid_for(s, cfg, plan);
            const double mu = lowest_eigenvalues(assemble_h1(guide, g), 1, cfg.eig).front();
            const double gap = discrete_threshold(guide.a(), g.n_u) - mu;
            double next = gap > 0.0 ? b + cfg.decay_lengths / std::sqrt(gap) : b + 4.0 * (s - b);
            next = std::min(next, plan.s_max);
            if (gap > 0.0 && next <= s) {
                s = next;
                break;
            }
            if (next <= s) break; // at the cap without a level below threshold
            s = next;
        }
        if (r.s_trunc_history.back() != s) r.s_trunc_history.push_back(s);
        coarse = detail::grid_for(s, cfg, plan);
    }
    r.coarse = coarse;
    r.fine = coarse.refined();

    const double a = guide.a();
    const auto count_c = count_below(assemble_h1(guide, r.coarse), discrete_threshold(a, r.coarse.n_u));
    const auto count_f = count_below(assemble_h1(guide, r.fine), discrete_threshold(a, r.fine.n_u));
    const int k = static_cast<int>(std::max<long long>({1, count_c, count_f}));
    r.levels = richardson_levels(guide, r.coarse, k, cfg.eig);
    summarize_levels(r);
    return r;
}

} // namespace wgb::spectral
