#include "routechoice/choice.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "routechoice/bounded_minimizer.hpp"
#include "routechoice/error.hpp"
#include "routechoice/random.hpp"

namespace routechoice {

std::vector<double> logit_probabilities(const Betas& betas, std::span<const RouteOption> options) {
    std::vector<double> a(options.size());
    double shift = 0.0;  // exponent of "other"
    for (std::size_t i = 0; i < options.size(); ++i) {
        const auto x = options[i].x();
        for (double v : x) {
            if (!std::isfinite(v)) throw InvalidInput("non-finite route variable");
        }
        a[i] = betas[0] * x[0] + betas[1] * x[1] + betas[2] * x[2];
        shift = std::max(shift, a[i]);
    }
    std::vector<double> p(options.size() + 1);
    double denom = std::exp(-shift);
    for (std::size_t i = 0; i < options.size(); ++i) {
        p[i] = std::exp(a[i] - shift);
        denom += p[i];
    }
    p.back() = std::exp(-shift);
    for (double& v : p) v /= denom;
    return p;
}

namespace {

// 0.5 * ||P(beta) - target||^2 and its analytic gradient.
double residual_objective(std::span<const double> beta, std::span<double> grad, std::span<const double> target,
                          std::span<const RouteOption> options) {
    const Betas b{beta[0], beta[1], beta[2]};
    const auto p = logit_probabilities(b, options);
    const std::size_t n = options.size();
    std::array<double, 3> xbar{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto x = options[i].x();
        for (std::size_t k = 0; k < 3; ++k) xbar[k] += p[i] * x[k];
    }
    double value = 0.0;
    std::array<double, 3> g{};
    for (std::size_t i = 0; i <= n; ++i) {
        const double r = p[i] - target[i];
        value += 0.5 * r * r;
        const std::array<double, 3> x = i < n ? options[i].x() : std::array<double, 3>{0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < 3; ++k) g[k] += r * p[i] * (x[k] - xbar[k]);
    }
    std::copy(g.begin(), g.end(), grad.begin());
    return value;
}

double residual_norm(const Betas& b, std::span<const double> target, std::span<const RouteOption> options) {
    const auto p = logit_probabilities(b, options);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - target[i]) * (p[i] - target[i]);
    return std::sqrt(s);
}

}  // namespace

MultinomialFit fit_multinomial(std::span<const double> target, std::span<const RouteOption> options,
                               std::uint64_t seed, std::size_t starts) {
    if (options.empty()) throw InvalidInput("multinomial fit needs at least one route option");
    if (target.size() != options.size() + 1) throw InvalidInput("target must have one share per option plus other");

    const BoxBounds box{{kBetaLower, kBetaLower, kBetaLower}, {kBetaUpper, kBetaUpper, kBetaUpper}};
    const Objective objective = [&](std::span<const double> x, std::span<double> g) {
        return residual_objective(x, g, target, options);
    };
    Rng rng(seed);
    MultinomialFit best;
    bool have = false;
    for (std::size_t s = 0; s < std::max<std::size_t>(1, starts); ++s) {
        std::vector<double> x0 = s == 0 ? std::vector<double>{-1.0, -1.0, -1.0}
                                        : std::vector<double>{rng.uniform(kBetaLower, kBetaUpper),
                                                              rng.uniform(kBetaLower, kBetaUpper),
                                                              rng.uniform(kBetaLower, kBetaUpper)};
        const auto r = minimize_box(objective, std::move(x0), box);
        MultinomialFit fit;
        fit.betas = {r.x[0], r.x[1], r.x[2]};
        fit.residual = residual_norm(fit.betas, target, options);
        fit.iterations = r.iterations;
        fit.converged = r.converged;
        if (!have || fit.residual < best.residual - 1e-15) {
            best = fit;
            have = true;
        }
    }
    return best;
}

TreeFit fit_tree(std::span<const int> chosen, std::span<const RouteOption> options, std::uint64_t seed) {
    if (options.empty()) throw InvalidInput("tree fit needs at least one route option");
    if (chosen.empty()) throw InvalidInput("tree fit needs at least one flight");
    FeatureMatrix x;
    std::vector<double> y;
    std::vector<std::size_t> groups;
    for (std::size_t f = 0; f < chosen.size(); ++f) {
        for (const auto& o : options) {
            const auto v = o.x();
            x.append_row(v);
            y.push_back(chosen[f] == o.route ? 1.0 : 0.0);
            groups.push_back(f);
        }
    }
    const auto search = select_tree_depth(x, y, groups, seed);
    TreeFit out;
    out.depth = search.best_depth;
    out.cv_scores = search.mean_scores;
    out.tree = RegressionTree::fit(x, y, out.depth);
    return out;
}

std::vector<double> tree_predict_renormalize(std::span<const double> raw) {
    std::vector<double> p(raw.size() + 1, 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        p[i] = std::isfinite(raw[i]) ? std::clamp(raw[i], 0.0, 1.0) : 0.0;
        sum += p[i];
    }
    if (sum <= 1.0) {
        p.back() = 1.0 - sum;
    } else {
        for (std::size_t i = 0; i < raw.size(); ++i) p[i] /= sum;
        p.back() = 0.0;
    }
    return p;
}

std::vector<double> null_model(std::span<const std::size_t> counts) {
    std::vector<double> p(counts.size(), 0.0);
    if (counts.empty()) return p;
    std::size_t total = 0;
    for (auto c : counts) total += c;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        p[i] = total == 0 ? 1.0 / static_cast<double>(counts.size())
                          : static_cast<double>(counts[i]) / static_cast<double>(total);
    }
    return p;
}

std::vector<int> considered_routes(std::span<const int> labels, double threshold) {
    std::map<int, std::size_t> counts;
    for (int l : labels) ++counts[l];
    std::vector<int> out;
    for (const auto& [route, c] : counts) {
        if (route != kOther && static_cast<double>(c) > threshold * static_cast<double>(labels.size())) {
            out.push_back(route);
        }
    }
    out.push_back(kOther);
    return out;
}

std::vector<double> route_shares(std::span<const int> labels, std::span<const int> routes) {
    std::vector<double> out(routes.size(), 0.0);
    if (labels.empty()) return out;
    const double n = static_cast<double>(labels.size());
    for (int l : labels) {
        auto it = std::find(routes.begin(), routes.end(), l);
        if (it == routes.end() || l == kOther) it = std::find(routes.begin(), routes.end(), kOther);
        if (it != routes.end()) out[static_cast<std::size_t>(it - routes.begin())] += 1.0 / n;
    }
    return out;
}

namespace {

struct Predictor {
    std::span<const RouteOption> options;

    std::vector<double> operator()(const MultinomialModel& m) const { return logit_probabilities(m.betas, options); }

    std::vector<double> operator()(const TreeModel& m) const {
        std::vector<double> raw;
        for (const auto& o : options) raw.push_back(m.tree.predict(o.x()));
        return tree_predict_renormalize(raw);
    }

    std::vector<double> operator()(const ConstantModel& m) const {
        std::vector<double> p(options.size() + 1, 0.0);
        for (std::size_t i = 0; i < options.size(); ++i) {
            if (options[i].route == m.route && m.route != kOther) {
                p[i] = 1.0;
                return p;
            }
        }
        p.back() = 1.0;
        return p;
    }

    std::vector<double> operator()(const UniformModel&) const {
        return std::vector<double>(options.size() + 1, 1.0 / static_cast<double>(options.size() + 1));
    }

    std::vector<double> operator()(const NullModel& m) const {
        std::vector<double> p(options.size() + 1, 0.0);
        for (std::size_t i = 0; i < options.size(); ++i) {
            auto it = m.shares.find(options[i].route);
            p[i] = it == m.shares.end() ? 0.0 : std::clamp(it->second, 0.0, 1.0);
        }
        return tree_predict_renormalize(std::span<const double>(p.data(), options.size()));
    }
};

}  // namespace

std::vector<double> predict(const ChoiceModel& model, std::span<const RouteOption> options) {
    return std::visit(Predictor{options}, model);
}

std::string variant_name(const ChoiceModel& model) {
    static constexpr const char* names[] = {"multinomial", "tree", "constant", "uniform", "null"};
    return names[model.index()];
}

}  // namespace routechoice
