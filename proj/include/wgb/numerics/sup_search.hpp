#pragma once

#include "wgb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace wgb::numerics {

struct SupResult {
    double argmax = 0.0;
    double max = 0.0;
};

/// Golden-section maximization of a unimodal-in-bracket function on [lo, hi].
template <class F>
SupResult golden_section_max(F&& f, double lo, double hi, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
    for (int it = 0; it < max_iter && (b - a) > 1e-13 * scale; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? SupResult{x1, f1} : SupResult{x2, f2};
}

/// Estimates sup f on [lo, hi]: dense sampling, then golden-section refinement
/// inside the neighbour brackets of the `n_refine` largest samples.
template <class F>
SupResult sup_search(F&& f, double lo, double hi, int n_seed = 10000, int n_refine = 5) {
    require(n_seed >= 3, "sup_search needs at least 3 seed points");
    require(lo <= hi, "sup_search requires lo <= hi");
    if (lo == hi) return {lo, f(lo)};

    std::vector<double> xs(n_seed), ys(n_seed);
    const double step = (hi - lo) / (n_seed - 1);
    for (int i = 0; i < n_seed; ++i) {
        xs[i] = i + 1 == n_seed ? hi : lo + i * step;
        ys[i] = f(xs[i]);
    }
    std::vector<int> order(n_seed);
    std::iota(order.begin(), order.end(), 0);
    const int top = std::min(n_refine, n_seed);
    std::partial_sort(order.begin(), order.begin() + top, order.end(),
                      [&](int i, int j) { return ys[i] > ys[j] || (ys[i] == ys[j] && i < j); });

    SupResult best{xs[order[0]], ys[order[0]]};
    for (int r = 0; r < top; ++r) {
        const int i = order[r];
        const double a = xs[std::max(i - 1, 0)];
        const double b = xs[std::min(i + 1, n_seed - 1)];
        const SupResult refined = golden_section_max(f, a, b);
        if (refined.max > best.max) best = refined;
    }
    return best;
}

} // namespace wgb::numerics
