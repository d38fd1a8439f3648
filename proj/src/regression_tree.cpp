#include "routechoice/regression_tree.hpp"

#include <algorithm>
#include <map>
#include <limits>
#include <numeric>

#include "routechoice/error.hpp"
#include "routechoice/random.hpp"

namespace routechoice {

namespace {

struct Builder {
    const FeatureMatrix& x;
    std::span<const double> y;
    int max_depth;
    std::vector<RegressionTree::Node> nodes;

    int build(std::vector<std::size_t> rows, int depth) {
        double sum = 0.0;
        for (auto r : rows) sum += y[r];
        const double mean = sum / static_cast<double>(rows.size());
        double sse = 0.0;
        for (auto r : rows) sse += (y[r] - mean) * (y[r] - mean);

        const int id = static_cast<int>(nodes.size());
        nodes.push_back({-1, 0.0, mean, -1, -1});
        if (depth >= max_depth || rows.size() < 2 || sse <= 1e-14) return id;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_gain = 1e-12 * std::max(1.0, sse);
        for (std::size_t f = 0; f < x.cols(); ++f) {
            std::vector<std::size_t> order = rows;
            std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x(a, f) < x(b, f); });
            double left_sum = 0.0, left_sq = 0.0;
            double total_sq = 0.0;
            for (auto r : order) total_sq += y[r] * y[r];
            for (std::size_t i = 0; i + 1 < order.size(); ++i) {
                left_sum += y[order[i]];
                left_sq += y[order[i]] * y[order[i]];
                const double lo = x(order[i], f), hi = x(order[i + 1], f);
                if (!(lo < hi)) continue;
                const double nl = static_cast<double>(i + 1);
                const double nr = static_cast<double>(order.size() - i - 1);
                const double right_sum = sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double child_sse = (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
                const double gain = sse - child_sse;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (lo + hi);
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto r : rows) {
            (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(r);
        }
        const int l = build(std::move(left), depth + 1);
        const int rr = build(std::move(right), depth + 1);
        nodes[static_cast<std::size_t>(id)].feature = best_feature;
        nodes[static_cast<std::size_t>(id)].threshold = best_threshold;
        nodes[static_cast<std::size_t>(id)].left = l;
        nodes[static_cast<std::size_t>(id)].right = rr;
        return id;
    }
};

int subtree_depth(const std::vector<RegressionTree::Node>& nodes, int id) {
    const auto& n = nodes[static_cast<std::size_t>(id)];
    if (n.feature < 0) return 0;
    return 1 + std::max(subtree_depth(nodes, n.left), subtree_depth(nodes, n.right));
}

}  // namespace

RegressionTree RegressionTree::fit(const FeatureMatrix& x, std::span<const double> y, int max_depth) {
    if (x.rows() == 0 || x.rows() != y.size()) throw InvalidInput("regression tree: empty or mismatched training set");
    if (max_depth < 0) throw InvalidInput("regression tree: negative depth");
    Builder b{x, y, max_depth, {}};
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), 0);
    b.build(std::move(rows), 0);
    return RegressionTree(std::move(b.nodes));
}

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes_.empty()) throw InvalidInput("regression tree: not fitted");
    int id = 0;
    while (nodes_[static_cast<std::size_t>(id)].feature >= 0) {
        const auto& n = nodes_[static_cast<std::size_t>(id)];
        id = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return nodes_[static_cast<std::size_t>(id)].value;
}

int RegressionTree::depth() const { return nodes_.empty() ? 0 : subtree_depth(nodes_, 0); }

DepthSearch select_tree_depth(const FeatureMatrix& x, std::span<const double> y, std::span<const std::size_t> groups,
                              std::uint64_t seed, int max_depth) {
    if (x.rows() != y.size() || x.rows() != groups.size()) throw InvalidInput("depth search: size mismatch");
    std::vector<std::size_t> ids(groups.begin(), groups.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const std::size_t k = std::min<std::size_t>(5, ids.size());

    DepthSearch out;
    if (k < 2) {
        out.best_depth = 1;
        return out;
    }
    Rng rng(seed);
    for (std::size_t i = ids.size(); i > 1; --i) std::swap(ids[i - 1], ids[rng.index(i)]);
    std::map<std::size_t, std::size_t> fold_of;
    for (std::size_t i = 0; i < ids.size(); ++i) fold_of[ids[i]] = i % k;

    double best = -std::numeric_limits<double>::infinity();
    for (int depth = 1; depth <= max_depth; ++depth) {
        double score_sum = 0.0;
        for (std::size_t fold = 0; fold < k; ++fold) {
            FeatureMatrix train_x;
            std::vector<double> train_y;
            std::vector<std::size_t> test_rows;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                if (fold_of[groups[r]] == fold) {
                    test_rows.push_back(r);
                } else {
                    train_x.append_row(x.row(r));
                    train_y.push_back(y[r]);
                }
            }
            const auto tree = RegressionTree::fit(train_x, train_y, depth);
            double sse = 0.0;
            for (auto r : test_rows) {
                const double e = tree.predict(x.row(r)) - y[r];
                sse += e * e;
            }
            score_sum += -sse / static_cast<double>(std::max<std::size_t>(1, test_rows.size()));
        }
        const double mean = score_sum / static_cast<double>(k);
        out.mean_scores.push_back(mean);
        if (mean > best + 1e-12) {
            best = mean;
            out.best_depth = depth;
        }
    }
    return out;
}

}  // namespace routechoice
