#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "routechoice/clustering.hpp"
#include "routechoice/regression_tree.hpp"

namespace routechoice {

// Explanatory variables of one route option. Length and charges are scaled
// with the training bounds to [-1, 1]; congestion is the regulated-flight rate.
struct RouteOption {
    int route = 0;
    double x_length = 0.0;
    double x_charges = 0.0;
    double x_congestion = 0.0;

    std::array<double, 3> x() const { return {x_length, x_charges, x_congestion}; }
    friend bool operator==(const RouteOption&, const RouteOption&) = default;
};

using Betas = std::array<double, 3>;
inline constexpr double kBetaLower = -10.0;
inline constexpr double kBetaUpper = 0.0;
inline constexpr double kConsideredShare = 0.05;

// Multinomial logit with the "other" option pinned at exponent 0:
// P_i = exp(A_i) / (1 + sum_j exp(A_j)), A_i = beta . x_i.
// Returns one probability per option followed by P_other.
std::vector<double> logit_probabilities(const Betas& betas, std::span<const RouteOption> options);

struct MultinomialFit {
    Betas betas{};
    double residual = 0.0;  // ||P(beta) - target||_2
    std::size_t iterations = 0;
    bool converged = false;
};

// Minimises ||P(beta) - target|| over [-10, 0]^3 from several seeded starts.
// `target` holds one share per option followed by the "other" share.
MultinomialFit fit_multinomial(std::span<const double> target, std::span<const RouteOption> options,
                               std::uint64_t seed, std::size_t starts = 5);

// Tree training set: one row per (flight, option) with that option's
// variables and target 1 when the flight flew it.
struct TreeFit {
    RegressionTree tree;
    int depth = 1;
    std::vector<double> cv_scores;
};

// `chosen` holds the route id flown by each flight of the segment (kOther allowed).
TreeFit fit_tree(std::span<const int> chosen, std::span<const RouteOption> options, std::uint64_t seed);

// Clamp raw outputs to [0, 1]; "other" takes the remainder, or 0 with the
// rest rescaled when the raw sum exceeds one.
std::vector<double> tree_predict_renormalize(std::span<const double> raw);

// Empirical shares of `counts`; uniform when all counts are zero.
std::vector<double> null_model(std::span<const std::size_t> counts);

// Routes (ascending id) whose share among `labels` exceeds `threshold`,
// followed by kOther which is always present.
std::vector<int> considered_routes(std::span<const int> labels, double threshold = kConsideredShare);

// Share of each id in `routes` among `labels`; kOther collects everything not
// listed among the non-other ids.
std::vector<double> route_shares(std::span<const int> labels, std::span<const int> routes);

struct MultinomialModel {
    Betas betas{};
};
struct TreeModel {
    RegressionTree tree;
    int depth = 1;
};
struct ConstantModel {
    int route = kOther;
};
struct UniformModel {};
struct NullModel {
    std::map<int, double> shares;  // route id -> share, kOther included
};

using ChoiceModel = std::variant<MultinomialModel, TreeModel, ConstantModel, UniformModel, NullModel>;

// Probability per option followed by P_other; always a simplex vector.
std::vector<double> predict(const ChoiceModel& model, std::span<const RouteOption> options);
std::string variant_name(const ChoiceModel& model);

}  // namespace routechoice
