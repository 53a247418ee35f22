#ifndef TABADV_ATTACKS_GEOMETRY_HPP
#define TABADV_ATTACKS_GEOMETRY_HPP

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace tabadv {

inline double l2_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double l2_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

/// L2 "sign": the gradient with immutable entries zeroed, scaled to unit
/// norm. An all-zero masked gradient stays zero.
inline std::vector<double> scaled_sign(std::span<const double> g, const std::vector<bool>& mutable_mask) {
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mutable_mask[i]) out[i] = g[i];
    }
    const double n = l2_norm(out);
    if (n > 0.0) {
        for (double& v : out) v /= n;
    }
    return out;
}

/// Projection onto the [0,1] box intersected with the L2 ball of radius
/// epsilon around x0: box clip, then radial shrink of the perturbation.
/// Immutable coordinates are reset to x0.
inline std::vector<double> project(std::span<const double> x0, std::span<const double> candidate, double epsilon,
                                   const std::vector<bool>& mutable_mask) {
    std::vector<double> out(candidate.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = mutable_mask[i] ? std::clamp(candidate[i], 0.0, 1.0) : x0[i];
    }
    const double n = l2_distance(out, x0);
    if (n > epsilon) {
        const double shrink = epsilon / n;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (mutable_mask[i]) out[i] = x0[i] + (out[i] - x0[i]) * shrink;
        }
    }
    return out;
}

/// Slack on the L2 budget when validating candidates.
inline constexpr double budget_tol = 1e-6;

inline bool in_box(std::span<const double> x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
}

inline bool in_ball(std::span<const double> x0, std::span<const double> x, double epsilon, double slack = budget_tol) {
    return l2_distance(x, x0) <= epsilon + slack;
}

} // namespace tabadv

#endif
