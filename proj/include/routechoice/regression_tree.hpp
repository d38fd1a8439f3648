#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "routechoice/features.hpp"

namespace routechoice {

inline constexpr int kMaxTreeDepth = 5;

// CART regression tree: variance-reduction splits of the form x[f] <= t,
// mean-valued leaves, at least one sample per leaf.
class RegressionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;

        friend bool operator==(const Node&, const Node&) = default;
    };

    RegressionTree() = default;
    explicit RegressionTree(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}

    static RegressionTree fit(const FeatureMatrix& x, std::span<const double> y, int max_depth);

    double predict(std::span<const double> x) const;
    int depth() const;  // 0 for a single leaf
    const std::vector<Node>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

private:
    std::vector<Node> nodes_;
};

struct DepthSearch {
    int best_depth = 1;
    std::vector<double> mean_scores;  // index d-1: mean over folds of -MSE
};

// Grid search over depths 1..max_depth with k-fold cross-validation where
// folds are drawn over groups (rows sharing a group id stay together).
// k = min(5, number of groups); ties go to the smaller depth.
DepthSearch select_tree_depth(const FeatureMatrix& x, std::span<const double> y, std::span<const std::size_t> groups,
                              std::uint64_t seed, int max_depth = kMaxTreeDepth);

}  // namespace routechoice
