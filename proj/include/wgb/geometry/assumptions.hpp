#pragma once

#include "wgb/errors.hpp"
#include "wgb/geometry/waveguide.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <vector>

namespace wgb {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

enum class EmbeddingStatus { verified_at_resolution, skipped };

struct AssumptionReport {
    bool non_self_intersecting = false; ///< (i), resolution-limited
    bool thin_enough = false;           ///< (ii) a ||gamma|| < 1
    bool regular = false;               ///< (iii) gamma' and gamma'' bounded
    bool compact_support = false;       ///< (iv) gamma = 0 for |s| > b, 2b > a
    double gamma_sup = 0.0;
    double gamma1_sup = 0.0;
    double gamma2_sup = 0.0;
    double a_gamma_sup = 0.0;
    double min_clearance = 0.0;
    double resolution = 0.0;
    EmbeddingStatus embedding = EmbeddingStatus::skipped;

    bool all_pass() const { return non_self_intersecting && thin_enough && regular && compact_support; }
};

/// Sampled axis and boundary curves of the strip over s in [s_lo, s_hi].
struct StripPolylines {
    std::vector<double> s;
    std::vector<Point2> center;
    std::vector<Point2> upper; ///< Gamma + a n
    std::vector<Point2> lower; ///< Gamma - a n
};

/// Rebuilds the axis from theta(s) = int_0^s gamma and Gamma(s) = int_0^s (cos theta, sin theta),
/// anchored at Gamma(0) = 0, theta(0) = 0, on a uniform grid of step <= resolution.
inline StripPolylines reconstruct_strip(const Waveguide& guide, double s_lo, double s_hi, double resolution) {
    require(resolution > 0.0, "embedding resolution must be positive");
    require(s_lo < 0.0 && s_hi > 0.0, "strip window must contain s = 0");
    const auto& profile = guide.profile();
    // Two-point Gauss-Legendre on each substep; theta is integrated with the same rule.
    constexpr double g = 0.57735026918962576451;
    auto theta_increment = [&](double s0, double s1) {
        const double m = 0.5 * (s0 + s1), h = 0.5 * (s1 - s0);
        return h * (profile(m - g * h) + profile(m + g * h));
    };
    auto march = [&](double s_end, int steps) {
        std::vector<double> ss{0.0};
        std::vector<Point2> pts{{0.0, 0.0}};
        std::vector<double> thetas{0.0};
        const double h = s_end / steps;
        double theta = 0.0;
        Point2 p{};
        for (int i = 0; i < steps; ++i) {
            const double s0 = i * h, s1 = (i + 1 == steps) ? s_end : (i + 1) * h;
            const double m = 0.5 * (s0 + s1), hh = 0.5 * (s1 - s0);
            const double xa = m - g * hh, xb = m + g * hh;
            const double ta = theta + theta_increment(s0, xa);
            const double tb = theta + theta_increment(s0, xb);
            p.x += hh * (std::cos(ta) + std::cos(tb));
            p.y += hh * (std::sin(ta) + std::sin(tb));
            theta += theta_increment(s0, s1);
            ss.push_back(s1);
            pts.push_back(p);
            thetas.push_back(theta);
        }
        return std::tuple{ss, pts, thetas};
    };
    const int n_right = std::max(1, static_cast<int>(std::ceil(s_hi / resolution)));
    const int n_left = std::max(1, static_cast<int>(std::ceil(-s_lo / resolution)));
    auto [sr, pr, tr] = march(s_hi, n_right);
    auto [sl, pl, tl] = march(s_lo, n_left);

    StripPolylines out;
    const double a = guide.a();
    auto append = [&](double s, Point2 c, double theta) {
        const Point2 n{-std::sin(theta), std::cos(theta)};
        out.s.push_back(s);
        out.center.push_back(c);
        out.upper.push_back({c.x + a * n.x, c.y + a * n.y});
        out.lower.push_back({c.x - a * n.x, c.y - a * n.y});
    };
    for (std::size_t i = sl.size(); i-- > 1;) append(sl[i], pl[i], tl[i]);
    for (std::size_t i = 0; i < sr.size(); ++i) append(sr[i], pr[i], tr[i]);
    return out;
}

namespace detail {

inline double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

inline bool on_segment(Point2 p, Point2 a, Point2 b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

inline bool segments_intersect(Point2 p1, Point2 p2, Point2 q1, Point2 q2) {
    const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(p1, q1, q2)) return true;
    if (d2 == 0 && on_segment(p2, q1, q2)) return true;
    if (d3 == 0 && on_segment(q1, p1, p2)) return true;
    if (d4 == 0 && on_segment(q2, p1, p2)) return true;
    return false;
}

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double dx = a.x + t * vx - p.x, dy = a.y + t * vy - p.y;
    return std::hypot(dx, dy);
}

} // namespace detail

/// True when any two non-adjacent segments of the two boundary polylines meet.
inline bool boundaries_intersect(const StripPolylines& strip) {
    const std::array<const std::vector<Point2>*, 2> curves{&strip.upper, &strip.lower};
    for (std::size_t ci = 0; ci < 2; ++ci) {
        for (std::size_t cj = ci; cj < 2; ++cj) {
            const auto& A = *curves[ci];
            const auto& B = *curves[cj];
            for (std::size_t i = 0; i + 1 < A.size(); ++i) {
                const std::size_t j0 = ci == cj ? i + 2 : 0;
                for (std::size_t j = j0; j + 1 < B.size(); ++j)
                    if (detail::segments_intersect(A[i], A[i + 1], B[j], B[j + 1])) return true;
            }
        }
    }
    return false;
}

/// Smallest distance from a boundary vertex to the axis polyline; equals a for an embedded strip.
inline double min_clearance(const StripPolylines& strip) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto* side : {&strip.upper, &strip.lower})
        for (const Point2& p : *side)
            for (std::size_t k = 0; k + 1 < strip.center.size(); ++k)
                best = std::min(best, detail::point_segment_distance(p, strip.center[k], strip.center[k + 1]));
    return best;
}

struct AssumptionCheckConfig {
    double resolution = 0.0;        ///< polyline step; 0 picks min(a, b) / 20
    std::size_t max_segments = 20000; ///< per boundary; larger windows skip the embedding check
};

/// Checks the regularity assumptions. (ii)-(iv) follow from the sup norms and the
/// support; (i) is a polyline intersection test over the curved part plus
/// straight tails of length 2b + 4a, valid only at the sampled resolution.
inline AssumptionReport check_assumptions(const Waveguide& guide, AssumptionCheckConfig cfg = {}) {
    const double a = guide.a(), b = guide.b();
    if (cfg.resolution <= 0.0) cfg.resolution = std::min(a, b) / 20.0;

    AssumptionReport r;
    const Norms& n = guide.norms();
    r.gamma_sup = n.gamma_sup;
    r.gamma1_sup = n.gamma1_sup;
    r.gamma2_sup = n.gamma2_sup;
    r.a_gamma_sup = a * n.gamma_sup;
    r.resolution = cfg.resolution;
    r.thin_enough = r.a_gamma_sup < 1.0;
    r.regular = std::isfinite(n.gamma_sup) && std::isfinite(n.gamma1_sup) && std::isfinite(n.gamma2_sup);
    const CurvatureSample outside_right = guide.profile().eval(std::nextafter(b, 2.0 * b + 1.0));
    const CurvatureSample outside_left = guide.profile().eval(-std::nextafter(b, 2.0 * b + 1.0));
    r.compact_support = 2.0 * b > a && outside_right.gamma == 0.0 && outside_left.gamma == 0.0 &&
                        outside_right.d1 == 0.0 && outside_left.d1 == 0.0;

    const double tail = 2.0 * b + 4.0 * a;
    const double half = b + tail;
    const double segments = 2.0 * half / cfg.resolution;
    if (segments > static_cast<double>(cfg.max_segments)) {
        r.embedding = EmbeddingStatus::skipped;
        r.non_self_intersecting = true;
        r.min_clearance = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    const StripPolylines strip = reconstruct_strip(guide, -half, half, cfg.resolution);
    r.embedding = EmbeddingStatus::verified_at_resolution;
    r.non_self_intersecting = !boundaries_intersect(strip);
    r.min_clearance = min_clearance(strip);
    return r;
}

inline AssumptionReport check_assumptions(const Waveguide& guide, double resolution) {
    AssumptionCheckConfig cfg;
    cfg.resolution = resolution;
    return check_assumptions(guide, cfg);
}

} // namespace wgb
