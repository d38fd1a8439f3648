#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routechoice/airac.hpp"
#include "routechoice/dataset.hpp"
#include "routechoice/features.hpp"
#include "routechoice/zones.hpp"

namespace routechoice {

inline constexpr int kNoise = -1;  // DBSCAN noise label
inline constexpr int kOther = -1;  // route id of the "other" bucket

// Per-component min-max scaling to [0, 1]; zero-range components map to 0.
struct NormalizationBounds {
    std::vector<double> min;
    std::vector<double> max;

    static NormalizationBounds fit(const FeatureMatrix& raw);
    std::vector<double> apply(std::span<const double> raw) const;
    FeatureMatrix apply(const FeatureMatrix& raw) const;
    bool empty() const { return min.empty(); }
};

// Plain DBSCAN with Euclidean distance. A core sample has at least
// min_samples neighbours within eps, itself included. Clusters are grown in
// scan order (a border point reachable from two clusters keeps the first),
// then relabelled 0..K-1 by descending size.
std::vector<int> dbscan(const FeatureMatrix& features, double eps, std::size_t min_samples);

// Mean silhouette over non-noise samples; noise is ignored entirely.
// Throws UndefinedMetric with fewer than two clusters.
double silhouette_mean(const FeatureMatrix& features, std::span<const int> labels);

struct ClusteringConfig {
    double eps0 = 0.3;
    std::optional<std::size_t> min_samples0;  // default ceil(N / 10)
    double delta_constant = 100.0;  // delta = min(1, c / N)
    std::size_t min_clusters = 4;
    double max_dominance = 0.5;
    double noise_share = 0.05;
    std::size_t max_iterations = 50;

    double delta(std::size_t n) const;
    double initial_silhouette_floor(std::size_t n) const { return 0.75 - delta(n); }
    std::size_t initial_min_samples(std::size_t n) const;
};

struct ClusterAttempt {
    std::size_t min_samples = 0;
    double silhouette_floor = 0.0;
    std::optional<double> silhouette;  // empty when fewer than two clusters
    std::size_t n_clusters = 0;
    std::size_t largest_cluster = 0;
    bool silhouette_ok = false;
    bool count_ok = false;
    bool dominance_ok = false;

    bool accepted() const { return silhouette_ok && count_ok && dominance_ok; }
};

struct RouteClusterModel {
    FeatureMatrix features;  // normalised fitted samples
    NormalizationBounds bounds;
    std::vector<int> dbscan_labels;  // densest-first, kNoise for noise
    std::vector<int> labels;  // route ids after the noise rule, kOther for the bucket
    double eps = 0.3;
    std::size_t min_samples = 0;
    std::size_t route_count = 0;
    std::vector<ClusterAttempt> history;
    bool warning = false;  // no attempt met every acceptance criterion

    std::size_t size() const { return labels.size(); }
};

// Runs DBSCAN on already-normalised features, relaxing the silhouette floor
// (halved) and min_samples (minus one, floor 2) until the result has a mean
// silhouette above the floor, at least min_clusters clusters and no cluster
// holding max_dominance of the samples. eps stays fixed.
RouteClusterModel iterative_cluster(const FeatureMatrix& features, const ClusteringConfig& config);

// Clusters below `share` of all samples join the noise in the "other" bucket;
// survivors are re-indexed densest-first.
RouteClusterModel apply_noise_rule(RouteClusterModel model, double share = 0.05);

// Nearest fitted non-noise sample; its route if within eps, kOther otherwise.
// `feature` must already be normalised with model.bounds.
int classify_route(const RouteClusterModel& model, std::span<const double> feature);
std::vector<int> classify_routes(const RouteClusterModel& model, const FeatureMatrix& normalised);

// Geometry and cost summary of every flight, shared by clustering and choice modelling.
struct RouteData {
    FeatureMatrix raw_features;  // per-zone km in zone-set order, then charges at WF = 1
    std::vector<double> length_km;
    std::vector<double> orthodrome_km;
    std::vector<double> charges;  // EUR at WF = 1, flight's own AIRAC rates
    std::vector<char> regulated;

    std::size_t size() const { return length_km.size(); }
    std::size_t zone_count() const { return raw_features.cols() == 0 ? 0 : raw_features.cols() - 1; }
};

RouteData extract_route_data(std::span<const FlightRecord> flights, const ChargingZoneSet& zones,
                             const AiracCalendar& calendar);

// Normalise raw features, run the iterative loop, apply the noise rule.
RouteClusterModel cluster_routes(const FeatureMatrix& raw_features, const ClusteringConfig& config);

struct RouteProperties {
    std::size_t n_flights = 0;
    double avg_length_nm = 0.0;
    double avg_charges_eur = 0.0;  // WF = 1
    double regulated_rate = 0.0;
    double avg_length_ratio = 1.0;  // mean length / mean orthodrome
    std::vector<double> mean_zone_km;  // geometric centroid, used to match clusterings
};

// Keyed by route id; kOther appears when any flight is in the bucket.
// Throws InvalidInput if some route 0..route_count-1 has no flights.
std::map<int, RouteProperties> route_properties(std::span<const int> labels, std::size_t route_count,
                                                const RouteData& data);

}  // namespace routechoice
