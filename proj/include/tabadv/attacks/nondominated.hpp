#ifndef TABADV_ATTACKS_NONDOMINATED_HPP
#define TABADV_ATTACKS_NONDOMINATED_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace tabadv {

/// a dominates b when it is no worse everywhere and better somewhere (minimisation).
template <std::size_t N>
bool dominates(const std::array<double, N>& a, const std::array<double, N>& b) {
    bool better = false;
    for (std::size_t k = 0; k < N; ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) better = true;
    }
    return better;
}

/// Front index of every point (0 = non-dominated), by fast non-dominated sorting.
template <std::size_t N>
std::vector<std::size_t> nondominated_ranks(std::span<const std::array<double, N>> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dom_count(n, 0);
    std::vector<std::size_t> rank(n, 0);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dominates(points[i], points[j])) {
                dominated[i].push_back(j);
                ++dom_count[j];
            } else if (dominates(points[j], points[i])) {
                dominated[j].push_back(i);
                ++dom_count[i];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dom_count[i] == 0) front.push_back(i);
    }
    std::size_t r = 0;
    while (!front.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : front) {
            rank[i] = r;
            for (std::size_t j : dominated[i]) {
                if (--dom_count[j] == 0) next.push_back(j);
            }
        }
        front = std::move(next);
        ++r;
    }
    return rank;
}

/// Survivor selection guided by a single aspiration point at the ideal
/// origin: whole fronts in rank order; the front that overflows is cut by
/// (feasible first, normalised distance to the origin, index).
template <std::size_t N>
std::vector<std::size_t> select_survivors(std::span<const std::array<double, N>> points,
                                          const std::vector<bool>& feasible, std::size_t count) {
    const std::size_t n = points.size();
    const auto rank = nondominated_ranks(points);
    std::array<double, N> scale{};
    for (const auto& p : points) {
        for (std::size_t k = 0; k < N; ++k) scale[k] = std::max(scale[k], std::abs(p[k]));
    }
    std::vector<double> dist(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double v = scale[k] > 0.0 ? points[i][k] / scale[k] : 0.0;
            s += v * v / static_cast<double>(N);
        }
        dist[i] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rank[a] != rank[b]) return rank[a] < rank[b];
        if (feasible[a] != feasible[b]) return static_cast<bool>(feasible[a]);
        if (dist[a] != dist[b]) return dist[a] < dist[b];
        return a < b;
    });
    order.resize(std::min(count, n));
    return order;
}

} // namespace tabadv

#endif
