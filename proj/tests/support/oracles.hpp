#pragma once

// Independent reference implementations used to check the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <span>
#include <vector>

#include "routechoice/features.hpp"
#include "routechoice/geo.hpp"
#include "routechoice/random.hpp"

namespace oracle {

// Great-circle distance via 3-D chord length.
inline double chord_distance_km(routechoice::GeoPoint a, routechoice::GeoPoint b, double r = 6371.0) {
    auto xyz = [](routechoice::GeoPoint p) {
        const double la = p.lat * std::numbers::pi / 180.0, lo = p.lon * std::numbers::pi / 180.0;
        return std::array<double, 3>{std::cos(la) * std::cos(lo), std::cos(la) * std::sin(lo), std::sin(la)};
    };
    const auto u = xyz(a), v = xyz(b);
    const double c = std::sqrt((u[0] - v[0]) * (u[0] - v[0]) + (u[1] - v[1]) * (u[1] - v[1]) + (u[2] - v[2]) * (u[2] - v[2]));
    return 2.0 * r * std::asin(std::min(1.0, c / 2.0));
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double euclid(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// Silhouette straight from the definition; labels < 0 skipped, singletons 0.
inline double silhouette_mean(const routechoice::FeatureMatrix& x, std::span<const int> labels) {
    double total = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        if (labels[i] < 0) continue;
        std::map<int, std::pair<double, std::size_t>> per;
        for (std::size_t j = 0; j < x.rows(); ++j) {
            if (j == i || labels[j] < 0) continue;
            auto& e = per[labels[j]];
            e.first += euclid(x.row(i), x.row(j));
            e.second += 1;
        }
        ++count;
        auto own = per.find(labels[i]);
        if (own == per.end()) continue;  // singleton
        const double a = own->second.first / static_cast<double>(own->second.second);
        double b = std::numeric_limits<double>::infinity();
        for (const auto& [l, e] : per) {
            if (l != labels[i]) b = std::min(b, e.first / static_cast<double>(e.second));
        }
        total += (b - a) / std::max(a, b);
    }
    return total / static_cast<double>(count);
}

// Adjusted Rand index of two labelings (every label value is its own class).
inline double adjusted_rand(std::span<const int> a, std::span<const int> b) {
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        joint[{a[i], b[i]}] += 1;
        ra[a[i]] += 1;
        rb[b[i]] += 1;
    }
    auto c2 = [](double n) { return n * (n - 1) / 2; };
    double sj = 0, sa = 0, sb = 0;
    for (const auto& [k, v] : joint) sj += c2(v);
    for (const auto& [k, v] : ra) sa += c2(v);
    for (const auto& [k, v] : rb) sb += c2(v);
    const double expected = sa * sb / c2(static_cast<double>(a.size()));
    const double max_index = (sa + sb) / 2;
    return (sj - expected) / (max_index - expected);
}

// Share of samples on which `pred` agrees with `truth` under the best
// one-to-one relabelling (exhaustive over permutations of pred labels).
inline double best_agreement(std::span<const int> truth, std::span<const int> pred) {
    std::vector<int> tl(truth.begin(), truth.end()), pl(pred.begin(), pred.end());
    std::sort(tl.begin(), tl.end());
    tl.erase(std::unique(tl.begin(), tl.end()), tl.end());
    std::sort(pl.begin(), pl.end());
    pl.erase(std::unique(pl.begin(), pl.end()), pl.end());
    while (pl.size() < tl.size()) pl.push_back(std::numeric_limits<int>::min() + static_cast<int>(pl.size()));
    std::map<std::pair<int, int>, std::size_t> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) ++joint[{truth[i], pred[i]}];
    std::size_t best = 0;
    std::vector<int> perm = pl;
    do {
        std::size_t hits = 0;
        for (std::size_t k = 0; k < tl.size(); ++k) {
            auto it = joint.find({tl[k], perm[k]});
            if (it != joint.end()) hits += it->second;
        }
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(truth.size());
}

// Brute-force DBSCAN properties.
inline std::vector<char> core_points(const routechoice::FeatureMatrix& x, double eps, std::size_t min_samples) {
    std::vector<char> core(x.rows(), 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        std::size_t n = 0;
        for (std::size_t j = 0; j < x.rows(); ++j) n += euclid(x.row(i), x.row(j)) <= eps;
        core[i] = n >= min_samples;
    }
    return core;
}

// Connected components of core points under the eps relation; -1 for non-core.
inline std::vector<int> core_components(const routechoice::FeatureMatrix& x, double eps, std::span<const char> core) {
    std::vector<int> comp(x.rows(), -1);
    int next = 0;
    for (std::size_t s = 0; s < x.rows(); ++s) {
        if (!core[s] || comp[s] >= 0) continue;
        std::vector<std::size_t> stack{s};
        comp[s] = next;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < x.rows(); ++j) {
                if (core[j] && comp[j] < 0 && euclid(x.row(i), x.row(j)) <= eps) {
                    comp[j] = next;
                    stack.push_back(j);
                }
            }
        }
        ++next;
    }
    return comp;
}

// Optimal 1-D k-means for k = 4: exhaustive over contiguous partitions of the
// sorted values. Returns ascending centroids.
inline std::array<double, 4> best_contiguous_kmeans4(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    std::vector<double> ps(n + 1, 0), ps2(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        ps[i + 1] = ps[i] + v[i];
        ps2[i + 1] = ps2[i] + v[i] * v[i];
    }
    auto sse = [&](std::size_t a, std::size_t b) {  // [a, b)
        const double m = static_cast<double>(b - a);
        const double s = ps[b] - ps[a];
        return ps2[b] - ps2[a] - s * s / m;
    };
    double best = std::numeric_limits<double>::infinity();
    std::array<std::size_t, 3> cut{};
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const double c = sse(0, i) + sse(i, j) + sse(j, k) + sse(k, n);
                if (c < best) {
                    best = c;
                    cut = {i, j, k};
                }
            }
        }
    }
    const std::array<std::size_t, 5> e{0, cut[0], cut[1], cut[2], n};
    std::array<double, 4> centroids{};
    for (std::size_t c = 0; c < 4; ++c) {
        centroids[c] = (ps[e[c + 1]] - ps[e[c]]) / static_cast<double>(e[c + 1] - e[c]);
    }
    return centroids;
}

// Logit with the last ("other") option pinned at zero, written out directly.
inline std::vector<double> logit(const std::array<double, 3>& beta, const std::vector<std::array<double, 3>>& x) {
    std::vector<double> e;
    double denom = 1.0;
    for (const auto& xi : x) {
        e.push_back(std::exp(beta[0] * xi[0] + beta[1] * xi[1] + beta[2] * xi[2]));
        denom += e.back();
    }
    std::vector<double> p;
    for (double v : e) p.push_back(v / denom);
    p.push_back(1.0 / denom);
    return p;
}

}  // namespace oracle
