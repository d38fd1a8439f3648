#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routechoice/airac.hpp"
#include "routechoice/choice.hpp"
#include "routechoice/clustering.hpp"
#include "routechoice/dataset.hpp"
#include "routechoice/segmentation.hpp"
#include "routechoice/zones.hpp"

namespace routechoice {

enum class ModelFamily { multinomial, tree, null };
enum class ClusterMatching { positional, nearest_centroid };

struct ExperimentConfig {
    std::vector<std::string> origins;  // empty accepts any airport
    std::vector<std::string> destinations;
    std::vector<std::string> training_airacs;
    std::vector<std::string> testing_airacs;  // first one is re-clustered, the rest evaluated
    double split_ratio = 0.7;
    std::uint64_t split_seed = 42;
    std::uint64_t seed = 1;  // k-means, multi-start and cross-validation
    ModelFamily model = ModelFamily::multinomial;
    ClusteringConfig clustering;
    ClusterMatching matching = ClusterMatching::positional;
    Date airac_epoch = AiracCalendar::default_epoch();

    AiracCalendar calendar() const { return AiracCalendar(airac_epoch); }
};

// Throws ConfigError on invalid JSON or violated invariants (fewer than two
// testing AIRACs, overlapping periods).
ExperimentConfig parse_experiment_config(const std::string& text);
std::string experiment_config_to_json(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

std::string model_family_name(ModelFamily f);

struct ExperimentData {
    std::vector<FlightRecord> training;
    std::vector<FlightRecord> validation;
    std::vector<FlightRecord> testing;
};

// Filters flights to the OD pair, splits the training period and collects
// the testing period.
ExperimentData prepare_datasets(const ExperimentConfig& config, std::span<const FlightRecord> flights);

// Training-set bounds mapping route length and charges to [-1, 1].
struct VariableScaling {
    double length_min = 0.0, length_max = 0.0;
    double charges_min = 0.0, charges_max = 0.0;

    static VariableScaling fit(const RouteData& training);
    double length(double km) const;
    double charges(double eur) const;
};

struct RouteSet {
    RouteClusterModel clusters;
    std::map<int, RouteProperties> properties;
    std::vector<RouteOption> options;  // routes 0..K-1
};

RouteSet build_route_set(RouteClusterModel clusters, const RouteData& data, const VariableScaling& scaling);

struct SegmentModel {
    SegmentKey key;
    std::string airline_label;
    std::size_t n_flights = 0;
    double avg_arrival = 0.0;  // wrapped hours
    std::vector<int> considered;  // route ids, kOther last
    std::vector<double> actual_shares;  // over `considered`
    ChoiceModel model = UniformModel{};
    std::optional<double> score;  // norm of error; empty for constant and uniform models
};

using GroupShares = std::map<std::string, std::map<int, double>>;

struct TrainedBundle {
    ExperimentConfig config;
    RouteSet routes;
    VariableScaling scaling;
    Segmentation segmentation;
    std::vector<SegmentModel> segments;  // indexed by SegmentKey::index()
    ChoiceModel pooled = UniformModel{};  // fitted on every training flight; fallback at test time
    GroupShares null_shares;  // training route shares per report group
};

// Report groups: "all", "class0".."class3", "early", "midday", "late".
std::vector<std::string> report_groups();
bool group_contains(const std::string& group, std::size_t time_class);

TrainedBundle train_pipeline(const ExperimentConfig& config, std::span<const FlightRecord> training,
                             const ChargingZoneSet& zones, const CaskTable& cask);

// Options of `considered` (kOther skipped) looked up in `all`.
std::vector<RouteOption> segment_options(std::span<const int> considered, std::span<const RouteOption> all);

// Sum over segments of size x predicted probabilities; entries 0..K-1 are
// routes and entry K is "other". `flight_segments` holds each flight's
// segment index.
std::vector<double> predict_counts(std::span<const SegmentModel> segments, std::span<const RouteOption> options,
                                   std::span<const std::size_t> flight_segments, std::size_t route_count);

struct GroupReport {
    std::string group;
    std::size_t n_flights = 0;
    std::vector<double> actual;  // K routes then other
    std::vector<double> predicted;
    std::vector<double> null_predicted;
    std::optional<double> pearson_model;  // empty when undefined
    std::optional<double> pearson_null;
};

struct SegmentScore {
    std::size_t segment = 0;
    std::size_t n_flights = 0;
    std::string model;
    std::optional<double> norm_of_error;
};

struct PredictionReport {
    std::string stage;  // "validation" or "test"
    std::string model_family;
    std::size_t route_count = 0;
    std::vector<GroupReport> groups;
    std::vector<SegmentScore> segments;
    bool clustering_warning = false;
    std::vector<int> route_matching;  // test route -> trained route (-1 none); empty for validation

    const GroupReport& group(const std::string& name) const;
};

PredictionReport validate(const TrainedBundle& bundle, std::span<const FlightRecord> validation,
                          const ChargingZoneSet& zones);

// Re-clusters the first testing AIRAC, refreshes route variables and
// per-segment option sets, then predicts the remaining AIRACs.
PredictionReport test(const TrainedBundle& bundle, std::span<const FlightRecord> testing, const ChargingZoneSet& zones,
                      const CaskTable& cask);

// Matches each route of a new clustering to a trained route.
std::vector<int> match_routes(const std::map<int, RouteProperties>& trained, std::size_t trained_count,
                              const std::map<int, RouteProperties>& fresh, std::size_t fresh_count,
                              ClusterMatching method);

// route,group,actual,predicted,null_predicted
std::string report_csv(const PredictionReport& report);
std::string report_summary_json(const PredictionReport& report);

// Per-segment training rows: segment, flights, airline, arrival time,
// considered routes, actual probability vector, norm of error, model.
std::string training_table_csv(const TrainedBundle& bundle);
// Per-route properties of a clustering (flights, length, charges, congestion).
std::string route_table_csv(const RouteSet& routes);

}  // namespace routechoice
