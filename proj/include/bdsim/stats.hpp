#ifndef BDSIM_STATS_HPP
#define BDSIM_STATS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "bdsim/errors.hpp"

namespace bdsim::stats {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Indices sorted ascending by key, ties kept in index order.
inline std::vector<std::size_t> argsort(const std::vector<double>& key) {
    std::vector<std::size_t> idx(key.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    return idx;
}

// Average-rank percentile in [0,1]; equal values get equal percentiles.
inline std::vector<double> percentile_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<double> out(n, 0.0);
    if (n < 2) return out;
    const auto idx = argsort(values);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k)
            out[idx[k]] = avg_rank / static_cast<double>(n - 1);
        i = j + 1;
    }
    return out;
}

// Weight-balanced quantile groups: units sorted ascending by key, assigned
// greedily so that group weights approximate total/n_groups and every group
// is nonempty. Ties in key broken by index, so the split is deterministic.
inline std::vector<int> quantile_groups(const std::vector<double>& key,
                                        const std::vector<double>& weight, int n_groups) {
    const std::size_t n = key.size();
    if (n_groups < 1) throw ConfigError("quantile_groups: n_groups must be >= 1");
    if (static_cast<std::size_t>(n_groups) > n)
        throw ConfigError("quantile_groups: fewer units than groups");
    const double total = std::accumulate(weight.begin(), weight.end(), 0.0);
    const auto idx = argsort(key);
    std::vector<int> group(n, 0);
    int g = 0;
    double cum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        group[idx[i]] = g;
        cum += weight[idx[i]];
        if (g < n_groups - 1) {
            const std::size_t remaining = n - i - 1;
            const bool boundary_hit =
                cum >= total * static_cast<double>(g + 1) / static_cast<double>(n_groups);
            const bool must_advance = remaining == static_cast<std::size_t>(n_groups - 1 - g);
            if (boundary_hit || must_advance) ++g;
        }
    }
    return group;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(percentile_ranks(x), percentile_ranks(y));
}

// In-place z-scoring; constant columns become all zeros.
inline void standardize(std::vector<double>& v) {
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    for (double& x : v) x = sd > 0.0 ? (x - m) / sd : 0.0;
}

}  // namespace bdsim::stats

#endif
