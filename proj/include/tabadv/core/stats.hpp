#ifndef TABADV_CORE_STATS_HPP
#define TABADV_CORE_STATS_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>

namespace tabadv {

struct Summary {
    double mean = 0.0;
    double stddev = 0.0;
    double ci95 = 0.0; ///< half-width of the 95% Student-t interval
    std::size_t n = 0;
};

/// Two-sided 97.5% quantile of Student's t with `df` degrees of freedom.
inline double t_quantile_975(std::size_t df) {
    static constexpr std::array<double, 30> table{
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    if (df == 0) {
        return 0.0;
    }
    return df <= table.size() ? table[df - 1] : 1.960;
}

inline Summary summarize(std::span<const double> values) {
    Summary s;
    s.n = values.size();
    if (s.n == 0) {
        return s;
    }
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
    if (s.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - s.mean) * (v - s.mean);
        }
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
        s.ci95 = t_quantile_975(s.n - 1) * s.stddev / std::sqrt(static_cast<double>(s.n));
    }
    return s;
}

} // namespace tabadv

#endif
