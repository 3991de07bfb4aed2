#pragma once

#include "wgb/errors.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

namespace wgb::numerics {

/// Dirichlet eigenvalues of the Laplacian on an L_s x L_u rectangle,
/// (m pi / L_s)^2 + (n pi / L_u)^2 with m, n >= 1, emitted in nondecreasing order.
///
/// Best-first expansion of the (m, n) lattice: popping (m, n) pushes
/// (m+1, n) and (m, n+1). Ties are broken by (m, n) so the order is reproducible.
class LatticeSpectrum {
public:
    struct Mode {
        double value;
        std::int64_t m;
        std::int64_t n;
    };

    LatticeSpectrum(double length_s, double length_u) : ks_(std::numbers::pi / length_s), ku_(std::numbers::pi / length_u) {
        require(length_s > 0.0 && length_u > 0.0 && std::isfinite(length_s) && std::isfinite(length_u),
                "rectangle side lengths must be positive and finite");
        push(1, 1);
    }

    Mode next() {
        const Mode top = heap_.top();
        heap_.pop();
        push(top.m + 1, top.n);
        push(top.m, top.n + 1);
        return top;
    }

    double eigenvalue(std::int64_t m, std::int64_t n) const {
        const double a = ks_ * static_cast<double>(m);
        const double b = ku_ * static_cast<double>(n);
        return a * a + b * b;
    }

private:
    struct Later {
        bool operator()(const Mode& x, const Mode& y) const {
            return std::tie(x.value, x.m, x.n) > std::tie(y.value, y.m, y.n);
        }
    };

    void push(std::int64_t m, std::int64_t n) {
        if (visited_.emplace(m, n).second) heap_.push({eigenvalue(m, n), m, n});
    }

    double ks_;
    double ku_;
    std::priority_queue<Mode, std::vector<Mode>, Later> heap_;
    std::set<std::pair<std::int64_t, std::int64_t>> visited_;
};

/// The k smallest Dirichlet eigenvalues of the L_s x L_u rectangle, ascending.
inline std::vector<double> k_smallest_lattice(double length_s, double length_u, std::size_t k) {
    require(k >= 1, "k_smallest_lattice needs k >= 1");
    LatticeSpectrum spectrum(length_s, length_u);
    std::vector<double> values;
    values.reserve(k);
    while (values.size() < k) values.push_back(spectrum.next().value);
    return values;
}

} // namespace wgb::numerics
