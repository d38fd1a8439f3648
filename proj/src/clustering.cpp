#include "routechoice/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "routechoice/error.hpp"
#include "routechoice/kernels.hpp"
#include "routechoice/log.hpp"

namespace routechoice {

namespace {

constexpr int kUnclassified = -2;

// Relabels cluster ids so that 0 is the largest; equal sizes keep their
// original (scan) order.
std::vector<int> relabel_by_size(std::vector<int> labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    std::vector<int> order(static_cast<std::size_t>(k));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return sizes[static_cast<std::size_t>(a)] > sizes[static_cast<std::size_t>(b)];
    });
    std::vector<int> remap(static_cast<std::size_t>(k), kNoise);
    int next = 0;
    for (int old : order) {
        if (sizes[static_cast<std::size_t>(old)] > 0) remap[static_cast<std::size_t>(old)] = next++;
    }
    for (int& l : labels) {
        if (l >= 0) l = remap[static_cast<std::size_t>(l)];
    }
    return labels;
}

std::size_t count_clusters(std::span<const int> labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return static_cast<std::size_t>(k);
}

ClusterAttempt evaluate(const FeatureMatrix& x, std::span<const int> labels, std::size_t min_samples,
                        double floor, const ClusteringConfig& config) {
    ClusterAttempt a;
    a.min_samples = min_samples;
    a.silhouette_floor = floor;
    a.n_clusters = count_clusters(labels);
    std::vector<std::size_t> sizes(a.n_clusters, 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    a.largest_cluster = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
    if (a.n_clusters >= 2) a.silhouette = silhouette_mean(x, labels);
    a.silhouette_ok = a.silhouette && *a.silhouette >= floor;
    a.count_ok = a.n_clusters >= config.min_clusters;
    a.dominance_ok = static_cast<double>(a.largest_cluster) < config.max_dominance * static_cast<double>(labels.size());
    return a;
}

// Ranks failed attempts: more criteria met first, then higher silhouette.
bool better_than(const ClusterAttempt& a, const ClusterAttempt& b) {
    const int ma = a.silhouette_ok + a.count_ok + a.dominance_ok;
    const int mb = b.silhouette_ok + b.count_ok + b.dominance_ok;
    if (ma != mb) return ma > mb;
    const double sa = a.silhouette.value_or(-2.0);
    const double sb = b.silhouette.value_or(-2.0);
    return sa > sb;
}

}  // namespace

NormalizationBounds NormalizationBounds::fit(const FeatureMatrix& raw) {
    NormalizationBounds b;
    b.min.assign(raw.cols(), std::numeric_limits<double>::infinity());
    b.max.assign(raw.cols(), -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        for (std::size_t k = 0; k < raw.cols(); ++k) {
            b.min[k] = std::min(b.min[k], raw(i, k));
            b.max[k] = std::max(b.max[k], raw(i, k));
        }
    }
    return b;
}

std::vector<double> NormalizationBounds::apply(std::span<const double> raw) const {
    if (empty()) return {raw.begin(), raw.end()};
    std::vector<double> out(raw.size());
    for (std::size_t k = 0; k < raw.size(); ++k) {
        const double range = max[k] - min[k];
        out[k] = range > 0.0 ? (raw[k] - min[k]) / range : 0.0;
    }
    return out;
}

FeatureMatrix NormalizationBounds::apply(const FeatureMatrix& raw) const {
    FeatureMatrix out(raw.rows(), raw.cols());
    for (std::size_t i = 0; i < raw.rows(); ++i) {
        const auto v = apply(raw.row(i));
        std::copy(v.begin(), v.end(), out.row(i).begin());
    }
    return out;
}

std::vector<int> dbscan(const FeatureMatrix& features, double eps, std::size_t min_samples) {
    if (features.empty()) throw InvalidInput("dbscan: empty feature list");
    if (!(eps > 0.0)) throw InvalidInput("dbscan: eps must be positive");
    if (min_samples < 1) throw InvalidInput("dbscan: min_samples must be >= 1");

    const auto neighbours = kernels::omp::region_queries(features, eps);
    const std::size_t n = features.rows();
    std::vector<char> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = neighbours[i].size() >= min_samples;

    std::vector<int> labels(n, kUnclassified);
    int cluster = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] != kUnclassified || !core[i]) continue;
        labels[i] = cluster;
        std::deque<std::size_t> frontier{i};
        while (!frontier.empty()) {
            const std::size_t p = frontier.front();
            frontier.pop_front();
            for (std::size_t q : neighbours[p]) {
                if (labels[q] != kUnclassified) continue;
                labels[q] = cluster;
                if (core[q]) frontier.push_back(q);
            }
        }
        ++cluster;
    }
    for (int& l : labels) {
        if (l == kUnclassified) l = kNoise;
    }
    return relabel_by_size(std::move(labels));
}

double silhouette_mean(const FeatureMatrix& features, std::span<const int> labels) {
    if (labels.size() != features.rows()) throw InvalidInput("silhouette: label count mismatch");
    const auto k = static_cast<int>(count_clusters(labels));
    std::vector<char> present(static_cast<std::size_t>(k), 0);
    for (int l : labels) {
        if (l >= 0) present[static_cast<std::size_t>(l)] = 1;
    }
    if (std::count(present.begin(), present.end(), 1) < 2) {
        throw UndefinedMetric("silhouette needs at least two clusters");
    }
    const auto s = kernels::omp::silhouette_values(features, labels, k);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (labels[i] < 0) continue;
        sum += s[i];
        ++count;
    }
    return sum / static_cast<double>(count);
}

double ClusteringConfig::delta(std::size_t n) const {
    if (n == 0) return 1.0;
    return std::clamp(delta_constant / static_cast<double>(n), 0.0, 1.0);
}

std::size_t ClusteringConfig::initial_min_samples(std::size_t n) const {
    if (min_samples0) return *min_samples0;
    return std::max<std::size_t>(1, (n + 9) / 10);
}

RouteClusterModel iterative_cluster(const FeatureMatrix& features, const ClusteringConfig& config) {
    const std::size_t n = features.rows();
    if (n < 8) throw InsufficientData("route clustering needs at least 8 trajectories, got " + std::to_string(n));
    if (!(config.eps0 > 0.0)) throw ConfigError("eps0 must be positive");

    std::size_t min_samples = config.initial_min_samples(n);
    double floor = config.initial_silhouette_floor(n);

    RouteClusterModel model;
    model.features = features;
    model.eps = config.eps0;
    std::optional<std::size_t> best;
    std::vector<int> best_labels;

    for (std::size_t it = 0; it < std::max<std::size_t>(1, config.max_iterations); ++it) {
        auto labels = dbscan(features, config.eps0, min_samples);
        const ClusterAttempt attempt = evaluate(features, labels, min_samples, floor, config);
        model.history.push_back(attempt);
        if (!best || better_than(attempt, model.history[*best])) {
            best = model.history.size() - 1;
            best_labels = labels;
        }
        if (attempt.accepted()) {
            best = model.history.size() - 1;
            best_labels = std::move(labels);
            break;
        }
        floor /= 2.0;
        min_samples = std::max<std::size_t>(2, min_samples - 1);
    }

    const ClusterAttempt& chosen = model.history[*best];
    model.warning = !chosen.accepted();
    if (model.warning) {
        warn("route clustering did not meet the acceptance criteria after " +
             std::to_string(model.history.size()) + " iterations; keeping the best attempt");
    }
    model.min_samples = chosen.min_samples;
    model.dbscan_labels = best_labels;
    model.labels = std::move(best_labels);
    model.route_count = chosen.n_clusters;
    return model;
}

RouteClusterModel apply_noise_rule(RouteClusterModel model, double share) {
    const std::size_t n = model.labels.size();
    std::vector<std::size_t> sizes(model.route_count, 0);
    for (int l : model.labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    std::vector<int> keep(model.route_count, kOther);
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (static_cast<double>(sizes[c]) >= share * static_cast<double>(n)) keep[c] = static_cast<int>(c);
    }
    for (int& l : model.labels) {
        if (l >= 0) l = keep[static_cast<std::size_t>(l)];
    }
    model.labels = relabel_by_size(std::move(model.labels));
    model.route_count = count_clusters(model.labels);
    return model;
}

int classify_route(const RouteClusterModel& model, std::span<const double> feature) {
    FeatureMatrix q(feature.size(), std::vector<double>(feature.begin(), feature.end()));
    return classify_routes(model, q).front();
}

std::vector<int> classify_routes(const RouteClusterModel& model, const FeatureMatrix& normalised) {
    if (model.features.empty()) throw InvalidInput("classify_route: empty model");
    if (normalised.rows() > 0 && normalised.cols() != model.features.cols()) {
        throw InvalidInput("classify_route: feature dimension mismatch");
    }
    std::vector<char> eligible(model.features.rows());
    for (std::size_t i = 0; i < eligible.size(); ++i) eligible[i] = model.dbscan_labels[i] != kNoise;
    const auto hits = kernels::omp::nearest_rows(model.features, eligible, normalised);
    std::vector<int> out(hits.size(), kOther);
    for (std::size_t i = 0; i < hits.size(); ++i) {
        if (hits[i].index < model.features.rows() && hits[i].distance <= model.eps) {
            out[i] = model.labels[hits[i].index];
        }
    }
    return out;
}

RouteData extract_route_data(std::span<const FlightRecord> flights, const ChargingZoneSet& zones,
                             const AiracCalendar& calendar) {
    std::vector<std::vector<GeoPoint>> paths(flights.size());
    for (std::size_t i = 0; i < flights.size(); ++i) {
        paths[i].reserve(flights[i].trajectory.size());
        for (const auto& p : flights[i].trajectory) paths[i].push_back(p.position);
    }
    const auto profiles = kernels::omp::zone_profiles(paths, zones);

    RouteData data;
    data.raw_features = FeatureMatrix(flights.size(), zones.size() + 1);
    data.length_km.resize(flights.size());
    data.orthodrome_km.resize(flights.size());
    data.charges.resize(flights.size());
    data.regulated.resize(flights.size());
    for (std::size_t i = 0; i < flights.size(); ++i) {
        const auto zone_km = profiles[i].as_vector(zones);
        const double charges =
            route_charges(profiles[i], zones, calendar.id_of(flights[i].date), 1.0).total;
        auto row = data.raw_features.row(i);
        std::copy(zone_km.begin(), zone_km.end(), row.begin());
        row[zones.size()] = charges;
        data.length_km[i] = profiles[i].total_km;
        data.orthodrome_km[i] = profiles[i].orthodrome_km;
        data.charges[i] = charges;
        data.regulated[i] = flights[i].regulated;
    }
    return data;
}

RouteClusterModel cluster_routes(const FeatureMatrix& raw_features, const ClusteringConfig& config) {
    auto bounds = NormalizationBounds::fit(raw_features);
    auto model = iterative_cluster(bounds.apply(raw_features), config);
    model.bounds = std::move(bounds);
    return apply_noise_rule(std::move(model), config.noise_share);
}

std::map<int, RouteProperties> route_properties(std::span<const int> labels, std::size_t route_count,
                                                const RouteData& data) {
    if (labels.size() != data.size()) throw InvalidInput("route_properties: label count mismatch");
    struct Acc {
        std::size_t n = 0, regulated = 0;
        double length = 0.0, orthodrome = 0.0, charges = 0.0;
        std::vector<double> zone_km;
    };
    std::map<int, Acc> acc;
    const std::size_t zones = data.zone_count();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto& a = acc[labels[i]];
        if (a.zone_km.empty()) a.zone_km.assign(zones, 0.0);
        ++a.n;
        a.regulated += data.regulated[i] ? 1 : 0;
        a.length += data.length_km[i];
        a.orthodrome += data.orthodrome_km[i];
        a.charges += data.charges[i];
        const auto row = data.raw_features.row(i);
        for (std::size_t z = 0; z < zones; ++z) a.zone_km[z] += row[z];
    }
    std::map<int, RouteProperties> out;
    for (std::size_t r = 0; r < route_count; ++r) {
        if (!acc.contains(static_cast<int>(r))) {
            throw InvalidInput("route " + std::to_string(r) + " has no flights");
        }
    }
    for (auto& [route, a] : acc) {
        const double n = static_cast<double>(a.n);
        RouteProperties p;
        p.n_flights = a.n;
        p.avg_length_nm = a.length / n / kKmPerNauticalMile;
        p.avg_charges_eur = a.charges / n;
        p.regulated_rate = static_cast<double>(a.regulated) / n;
        p.avg_length_ratio = a.orthodrome > 0.0 ? a.length / a.orthodrome : 1.0;
        for (double& z : a.zone_km) z /= n;
        p.mean_zone_km = std::move(a.zone_km);
        out.emplace(route, std::move(p));
    }
    return out;
}

}  // namespace routechoice
