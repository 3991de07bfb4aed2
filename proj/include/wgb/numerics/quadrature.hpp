#pragma once

#include "wgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wgb::numerics {

struct QuadratureConfig {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_depth = 30;
    int order = 10; ///< Gauss-Legendre points per panel
};

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendreRule(int n) : nodes(n), weights(n) {
        require(n >= 1, "Gauss-Legendre order must be positive");
        auto legendre = [n](double x) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
        };
        for (int i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
            for (int iter = 0; iter < 100; ++iter) {
                const auto [p, dp] = legendre(x);
                const double dx = p / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            const double dp = legendre(x).second;
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <class F>
    double apply(F&& f, double lo, double hi) const {
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
        return half * sum;
    }
};

/// Adaptive composite Gauss-Legendre integration.
///
/// Each panel is compared against the sum over its two halves; panels whose
/// difference exceeds their share of the global tolerance are bisected.
/// Breakpoints (kinks, support edges, spline knots) always start a new panel.
class AdaptiveIntegrator {
public:
    explicit AdaptiveIntegrator(QuadratureConfig cfg = {}) : cfg_(cfg), rule_(cfg.order) {
        require(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0, "quadrature tolerances must be positive");
        require(cfg.max_depth >= 1, "quadrature max_depth must be at least 1");
    }

    const QuadratureConfig& config() const noexcept { return cfg_; }

    template <class F>
    double integrate(F&& f, double lo, double hi, std::span<const double> breakpoints = {}) const {
        require(std::isfinite(lo) && std::isfinite(hi), "integration limits must be finite");
        require(lo <= hi, "integration requires lo <= hi");
        if (lo == hi) return 0.0;

        std::vector<double> edges{lo};
        std::vector<double> inner(breakpoints.begin(), breakpoints.end());
        std::sort(inner.begin(), inner.end());
        for (double x : inner)
            if (x > lo && x < hi && x > edges.back()) edges.push_back(x);
        edges.push_back(hi);

        std::vector<double> coarse(edges.size() - 1);
        double rough = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            coarse[i] = rule_.apply(f, edges[i], edges[i + 1]);
            rough += std::abs(coarse[i]);
        }
        const double tol = std::max(cfg_.abs_tol, cfg_.rel_tol * rough);
        const double length = hi - lo;

        bool exhausted = false;
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i)
            total += refine(f, edges[i], edges[i + 1], coarse[i], tol / length, 0, exhausted);
        if (exhausted)
            throw NumericalError("adaptive quadrature exceeded max_depth=" + std::to_string(cfg_.max_depth),
                                 total);
        return total;
    }

private:
    template <class F>
    double refine(F& f, double a, double b, double whole, double tol_density, int depth,
                  bool& exhausted) const {
        const double mid = 0.5 * (a + b);
        const double left = rule_.apply(f, a, mid);
        const double right = rule_.apply(f, mid, b);
        const double halves = left + right;
        if (std::abs(halves - whole) <= tol_density * (b - a)) return halves;
        if (depth + 1 >= cfg_.max_depth) {
            exhausted = true;
            return halves;
        }
        return refine(f, a, mid, left, tol_density, depth + 1, exhausted) +
               refine(f, mid, b, right, tol_density, depth + 1, exhausted);
    }

    QuadratureConfig cfg_;
    GaussLegendreRule rule_;
};

template <class F>
double integrate_1d(F&& f, double lo, double hi, const QuadratureConfig& cfg = {},
                    std::span<const double> breakpoints = {}) {
    return AdaptiveIntegrator(cfg).integrate(std::forward<F>(f), lo, hi, breakpoints);
}

/// Computes the double integral of f(s)|s-t|f(t) over [lo, hi]^2.
///
/// The kernel is only C^0 across s = t, so the square is split along the
/// diagonal. The two triangles carry equal mass, and the lower one is
/// integrated as an iterated integral
///   2 * int_lo^hi f(s) int_lo^s (s - t) f(t) dt ds,
/// whose inner and outer integrands are smooth on every breakpoint panel.
template <class F>
double integrate_kernel_abs(F&& f, double lo, double hi, const QuadratureConfig& cfg = {},
                            std::span<const double> breakpoints = {}) {
    require(lo <= hi, "integration requires lo <= hi");
    if (lo == hi) return 0.0;
    const double length = hi - lo;

    QuadratureConfig inner_cfg = cfg;
    inner_cfg.abs_tol = cfg.abs_tol * 0.1 / std::max(1.0, length);
    inner_cfg.rel_tol = cfg.rel_tol * 0.1;
    const AdaptiveIntegrator inner(inner_cfg);
    const AdaptiveIntegrator outer(cfg);

    auto lower_triangle = [&](double s) {
        const double fs = f(s);
        if (fs == 0.0 || s == lo) return 0.0;
        const double moment = inner.integrate([&](double t) { return (s - t) * f(t); }, lo, s, breakpoints);
        return fs * moment;
    };
    return 2.0 * outer.integrate(lower_triangle, lo, hi, breakpoints);
}

} // namespace wgb::numerics
