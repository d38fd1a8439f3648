#include "routechoice/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "json.hpp"
#include "routechoice/error.hpp"
#include "routechoice/io.hpp"
#include "routechoice/metrics.hpp"

namespace routechoice {

using nlohmann::json;

// ---------------------------------------------------------------- config

std::string model_family_name(ModelFamily f) {
    switch (f) {
        case ModelFamily::multinomial: return "multinomial";
        case ModelFamily::tree: return "tree";
        case ModelFamily::null: return "null";
    }
    return "?";
}

namespace {

ModelFamily parse_family(const std::string& s) {
    if (s == "multinomial") return ModelFamily::multinomial;
    if (s == "tree") return ModelFamily::tree;
    if (s == "null") return ModelFamily::null;
    throw ConfigError("unknown model family '" + s + "'");
}

ClusterMatching parse_matching(const std::string& s) {
    if (s == "positional") return ClusterMatching::positional;
    if (s == "nearest_centroid") return ClusterMatching::nearest_centroid;
    throw ConfigError("unknown cluster matching '" + s + "'");
}

}  // namespace

void validate_config(const ExperimentConfig& c) {
    if (c.training_airacs.empty()) throw ConfigError("config: training_airacs is empty");
    if (c.testing_airacs.size() < 2) throw ConfigError("config: testing_airacs needs at least two cycles");
    const AiracCalendar cal = c.calendar();
    std::set<std::string> train;
    for (const auto& id : c.training_airacs) {
        try {
            (void)cal.cycle(id);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        train.insert(id);
    }
    for (const auto& id : c.testing_airacs) {
        try {
            (void)cal.cycle(id);
        } catch (const InvalidInput& e) {
            throw ConfigError(std::string("config: ") + e.what());
        }
        if (train.contains(id)) throw ConfigError("config: AIRAC " + id + " is in both training and testing");
    }
    if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) throw ConfigError("config: split ratio must be in (0, 1)");
    if (!(c.clustering.eps0 > 0.0)) throw ConfigError("config: eps0 must be positive");
}

ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig c;
    try {
        const json j = json::parse(text);
        c.origins = j.value("origins", std::vector<std::string>{});
        c.destinations = j.value("destinations", std::vector<std::string>{});
        c.training_airacs = j.at("training_airacs").get<std::vector<std::string>>();
        c.testing_airacs = j.at("testing_airacs").get<std::vector<std::string>>();
        if (j.contains("split")) {
            c.split_ratio = j.at("split").value("ratio", 0.7);
            c.split_seed = j.at("split").value("seed", std::uint64_t{42});
        }
        c.seed = j.value("seed", std::uint64_t{1});
        c.model = parse_family(j.value("model", std::string("multinomial")));
        c.matching = parse_matching(j.value("cluster_matching", std::string("positional")));
        if (j.contains("airac_epoch")) c.airac_epoch = parse_date(j.at("airac_epoch").get<std::string>());
        if (j.contains("clustering")) {
            const auto& k = j.at("clustering");
            c.clustering.eps0 = k.value("eps0", 0.3);
            if (k.contains("min_samples0")) c.clustering.min_samples0 = k.at("min_samples0").get<std::size_t>();
            c.clustering.delta_constant = k.value("delta_constant", 100.0);
            c.clustering.min_clusters = k.value("min_clusters", std::size_t{4});
            c.clustering.max_dominance = k.value("max_dominance", 0.5);
            c.clustering.noise_share = k.value("noise_share", 0.05);
            c.clustering.max_iterations = k.value("max_iterations", std::size_t{50});
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    validate_config(c);
    return c;
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
    nlohmann::ordered_json j;
    j["origins"] = c.origins;
    j["destinations"] = c.destinations;
    j["training_airacs"] = c.training_airacs;
    j["testing_airacs"] = c.testing_airacs;
    j["split"] = {{"ratio", c.split_ratio}, {"seed", c.split_seed}};
    j["seed"] = c.seed;
    j["model"] = model_family_name(c.model);
    j["cluster_matching"] = c.matching == ClusterMatching::positional ? "positional" : "nearest_centroid";
    j["airac_epoch"] = format_date(c.airac_epoch);
    nlohmann::ordered_json k;
    k["eps0"] = c.clustering.eps0;
    if (c.clustering.min_samples0) k["min_samples0"] = *c.clustering.min_samples0;
    k["delta_constant"] = c.clustering.delta_constant;
    k["min_clusters"] = c.clustering.min_clusters;
    k["max_dominance"] = c.clustering.max_dominance;
    k["noise_share"] = c.clustering.noise_share;
    k["max_iterations"] = c.clustering.max_iterations;
    j["clustering"] = k;
    return j.dump(2) + "\n";
}

ExperimentData prepare_datasets(const ExperimentConfig& config, std::span<const FlightRecord> flights) {
    const AiracCalendar cal = config.calendar();
    const std::set<std::string> train(config.training_airacs.begin(), config.training_airacs.end());
    const std::set<std::string> testing(config.testing_airacs.begin(), config.testing_airacs.end());
    auto accepts = [](const std::vector<std::string>& set, const std::string& code) {
        return set.empty() || std::find(set.begin(), set.end(), code) != set.end();
    };
    std::vector<FlightRecord> training_period;
    ExperimentData data;
    for (const auto& f : flights) {
        if (!accepts(config.origins, f.origin) || !accepts(config.destinations, f.destination)) continue;
        const std::string id = cal.id_of(f.date);
        if (train.contains(id)) {
            training_period.push_back(f);
        } else if (testing.contains(id)) {
            data.testing.push_back(f);
        }
    }
    if (!training_period.empty()) {
        auto [t, v] = split_train_validation(training_period, config.split_ratio, config.split_seed);
        data.training = std::move(t);
        data.validation = std::move(v);
    }
    return data;
}

// ---------------------------------------------------------------- route variables

namespace {

double scale_to_unit(double v, double lo, double hi) { return hi > lo ? 2.0 * (v - lo) / (hi - lo) - 1.0 : 0.0; }

}  // namespace

VariableScaling VariableScaling::fit(const RouteData& training) {
    if (training.size() == 0) throw InsufficientData("no training flights for variable scaling");
    VariableScaling s;
    const auto [lmin, lmax] = std::minmax_element(training.length_km.begin(), training.length_km.end());
    const auto [cmin, cmax] = std::minmax_element(training.charges.begin(), training.charges.end());
    s.length_min = *lmin;
    s.length_max = *lmax;
    s.charges_min = *cmin;
    s.charges_max = *cmax;
    return s;
}

double VariableScaling::length(double km) const { return scale_to_unit(km, length_min, length_max); }
double VariableScaling::charges(double eur) const { return scale_to_unit(eur, charges_min, charges_max); }

RouteSet build_route_set(RouteClusterModel clusters, const RouteData& data, const VariableScaling& scaling) {
    RouteSet set;
    set.properties = route_properties(clusters.labels, clusters.route_count, data);
    for (std::size_t r = 0; r < clusters.route_count; ++r) {
        const auto& p = set.properties.at(static_cast<int>(r));
        set.options.push_back(RouteOption{static_cast<int>(r), scaling.length(p.avg_length_nm * kKmPerNauticalMile),
                                          scaling.charges(p.avg_charges_eur), p.regulated_rate});
    }
    set.clusters = std::move(clusters);
    return set;
}

std::vector<RouteOption> segment_options(std::span<const int> considered, std::span<const RouteOption> all) {
    std::vector<RouteOption> out;
    for (int r : considered) {
        if (r == kOther) continue;
        auto it = std::find_if(all.begin(), all.end(), [r](const RouteOption& o) { return o.route == r; });
        if (it == all.end()) throw InvalidInput("route " + std::to_string(r) + " has no option variables");
        out.push_back(*it);
    }
    return out;
}

// ---------------------------------------------------------------- training

std::vector<std::string> report_groups() {
    return {"all", "class0", "class1", "class2", "class3", "early", "midday", "late"};
}

bool group_contains(const std::string& group, std::size_t time_class) {
    if (group == "all") return true;
    if (group.rfind("class", 0) == 0) return std::to_string(time_class) == group.substr(5);
    return group == time_group_name(time_group(time_class));
}

namespace {

struct FitResult {
    std::vector<int> considered;
    std::vector<double> shares;
    ChoiceModel model = UniformModel{};
    std::optional<double> score;
};

std::map<int, double> share_map(std::span<const int> considered, std::span<const double> shares) {
    std::map<int, double> m;
    for (std::size_t i = 0; i < considered.size(); ++i) m[considered[i]] = shares[i];
    return m;
}

// Empty -> uniform over every route; one route and negligible "other" ->
// constant; otherwise the family's model on the considered routes.
FitResult fit_choice(std::span<const int> labels, std::span<const RouteOption> all, ModelFamily family,
                     std::uint64_t seed) {
    FitResult out;
    if (labels.empty()) {
        for (const auto& o : all) out.considered.push_back(o.route);
        out.considered.push_back(kOther);
        out.shares.assign(out.considered.size(), 0.0);
        return out;
    }
    out.considered = considered_routes(labels);
    out.shares = route_shares(labels, out.considered);
    const std::size_t routes = out.considered.size() - 1;
    const double other_share = out.shares.back();
    if (family == ModelFamily::null) {
        out.model = NullModel{share_map(out.considered, out.shares)};
        out.score = 0.0;
        return out;
    }
    if (routes == 0) {
        out.model = ConstantModel{kOther};
        return out;
    }
    if (routes == 1 && other_share <= kConsideredShare) {
        out.model = ConstantModel{out.considered.front()};
        return out;
    }
    const auto opts = segment_options(out.considered, all);
    if (family == ModelFamily::multinomial) {
        const auto fit = fit_multinomial(out.shares, opts, seed);
        out.model = MultinomialModel{fit.betas};
        out.score = fit.residual;
    } else {
        std::vector<int> chosen(labels.begin(), labels.end());
        for (int& c : chosen) {
            if (std::find(out.considered.begin(), out.considered.end(), c) == out.considered.end()) c = kOther;
        }
        auto fit = fit_tree(chosen, opts, seed);
        out.model = TreeModel{std::move(fit.tree), fit.depth};
        out.score = norm_of_error(out.shares, predict(out.model, opts));
    }
    return out;
}

std::map<int, double> group_route_shares(std::span<const int> labels, std::size_t route_count) {
    std::vector<std::size_t> counts(route_count + 1, 0);
    for (int l : labels) ++counts[l == kOther ? route_count : static_cast<std::size_t>(l)];
    const auto p = null_model(counts);
    std::map<int, double> out;
    for (std::size_t r = 0; r < route_count; ++r) out[static_cast<int>(r)] = p[r];
    out[kOther] = p[route_count];
    return out;
}

template <typename F>
void parallel_for_each_index(std::size_t n, F&& body) {
    std::vector<std::exception_ptr> errors(n);
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        try {
            body(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::size_t route_index(int label, std::size_t route_count) {
    return label == kOther ? route_count : static_cast<std::size_t>(label);
}

}  // namespace

TrainedBundle train_pipeline(const ExperimentConfig& config, std::span<const FlightRecord> training,
                             const ChargingZoneSet& zones, const CaskTable& cask) {
    if (training.empty()) throw InsufficientData("no training flights");
    TrainedBundle b;
    b.config = config;
    const RouteData data = extract_route_data(training, zones, config.calendar());
    b.scaling = VariableScaling::fit(data);
    b.routes = build_route_set(cluster_routes(data.raw_features, config.clustering), data, b.scaling);
    b.segmentation = fit_segmentation(training, cask, config.seed);

    const auto& labels = b.routes.clusters.labels;
    const std::size_t n_segments = b.segmentation.segment_count();
    std::vector<std::vector<int>> seg_labels(n_segments);
    std::vector<std::vector<double>> seg_hours(n_segments);
    std::vector<std::size_t> time_class(training.size());
    for (std::size_t i = 0; i < training.size(); ++i) {
        const SegmentKey key = b.segmentation.assign(training[i]);
        seg_labels[key.index()].push_back(labels[i]);
        seg_hours[key.index()].push_back(wrap_hour(training[i].arrival_time));
        time_class[i] = key.time_class;
    }

    b.segments.resize(n_segments);
    parallel_for_each_index(n_segments, [&](std::size_t s) {
        SegmentModel& m = b.segments[s];
        m.key = SegmentKey{s / kTimeClasses, s % kTimeClasses};
        m.airline_label = b.segmentation.airlines.class_label[m.key.airline_class];
        m.n_flights = seg_labels[s].size();
        if (m.n_flights > 0) {
            double sum = 0.0;
            for (double h : seg_hours[s]) sum += h;
            m.avg_arrival = sum / static_cast<double>(m.n_flights);
        }
        auto fit = fit_choice(seg_labels[s], b.routes.options, config.model, config.seed + s);
        m.considered = std::move(fit.considered);
        m.actual_shares = std::move(fit.shares);
        m.model = std::move(fit.model);
        m.score = fit.score;
    });

    auto pooled = fit_choice(labels, b.routes.options, config.model, config.seed + n_segments);
    b.pooled = std::move(pooled.model);

    for (const auto& g : report_groups()) {
        std::vector<int> in_group;
        for (std::size_t i = 0; i < training.size(); ++i) {
            if (group_contains(g, time_class[i])) in_group.push_back(labels[i]);
        }
        b.null_shares[g] = group_route_shares(in_group, b.routes.clusters.route_count);
    }
    return b;
}

// ---------------------------------------------------------------- prediction

std::vector<double> predict_counts(std::span<const SegmentModel> segments, std::span<const RouteOption> options,
                                   std::span<const std::size_t> flight_segments, std::size_t route_count) {
    std::vector<std::size_t> sizes(segments.size(), 0);
    for (auto s : flight_segments) {
        if (s >= segments.size()) throw InvalidInput("flight assigned to unknown segment");
        ++sizes[s];
    }
    std::vector<double> counts(route_count + 1, 0.0);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (sizes[s] == 0) continue;
        const auto& seg = segments[s];
        const auto opts = segment_options(seg.considered, options);
        const auto p = predict(seg.model, opts);
        const double n = static_cast<double>(sizes[s]);
        for (std::size_t i = 0; i < opts.size(); ++i) counts[route_index(opts[i].route, route_count)] += n * p[i];
        counts[route_count] += n * p.back();
    }
    return counts;
}

const GroupReport& PredictionReport::group(const std::string& name) const {
    for (const auto& g : groups) {
        if (g.group == name) return g;
    }
    throw InvalidInput("report has no group " + name);
}

namespace {

std::optional<double> safe_pearson(std::span<const double> a, std::span<const double> b) {
    try {
        return pearson(a, b);
    } catch (const UndefinedMetric&) {
        return std::nullopt;
    }
}

// Shared by validation and testing once every flight has an actual route and
// a segment.
PredictionReport build_report(const std::string& stage, ModelFamily family, std::span<const SegmentModel> segments,
                              std::span<const RouteOption> options, std::size_t route_count,
                              std::span<const int> actual, std::span<const std::size_t> flight_segment,
                              const GroupShares& null_shares) {
    PredictionReport rep;
    rep.stage = stage;
    rep.model_family = model_family_name(family);
    rep.route_count = route_count;
    for (const auto& g : report_groups()) {
        GroupReport gr;
        gr.group = g;
        gr.actual.assign(route_count + 1, 0.0);
        std::vector<std::size_t> segs;
        for (std::size_t i = 0; i < actual.size(); ++i) {
            if (!group_contains(g, flight_segment[i] % kTimeClasses)) continue;
            gr.actual[route_index(actual[i], route_count)] += 1.0;
            segs.push_back(flight_segment[i]);
        }
        gr.n_flights = segs.size();
        gr.predicted = predict_counts(segments, options, segs, route_count);
        gr.null_predicted.assign(route_count + 1, 0.0);
        const auto& shares = null_shares.at(g);
        for (std::size_t r = 0; r <= route_count; ++r) {
            auto it = shares.find(r == route_count ? kOther : static_cast<int>(r));
            if (it != shares.end()) gr.null_predicted[r] = static_cast<double>(gr.n_flights) * it->second;
        }
        gr.pearson_model = safe_pearson(gr.actual, gr.predicted);
        gr.pearson_null = safe_pearson(gr.actual, gr.null_predicted);
        rep.groups.push_back(std::move(gr));
    }
    std::vector<std::vector<int>> seg_actual(segments.size());
    for (std::size_t i = 0; i < actual.size(); ++i) seg_actual[flight_segment[i]].push_back(actual[i]);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        SegmentScore sc;
        sc.segment = s;
        sc.n_flights = seg_actual[s].size();
        sc.model = variant_name(segments[s].model);
        if (sc.n_flights > 0) {
            const auto opts = segment_options(segments[s].considered, options);
            sc.norm_of_error =
                norm_of_error(route_shares(seg_actual[s], segments[s].considered), predict(segments[s].model, opts));
        }
        rep.segments.push_back(std::move(sc));
    }
    return rep;
}

std::vector<int> classify_flights(const RouteClusterModel& clusters, std::span<const FlightRecord> flights,
                                  const ChargingZoneSet& zones, const AiracCalendar& calendar) {
    if (flights.empty()) return {};
    const RouteData data = extract_route_data(flights, zones, calendar);
    return classify_routes(clusters, clusters.bounds.apply(data.raw_features));
}

}  // namespace

PredictionReport validate(const TrainedBundle& bundle, std::span<const FlightRecord> validation,
                          const ChargingZoneSet& zones) {
    const auto actual = classify_flights(bundle.routes.clusters, validation, zones, bundle.config.calendar());
    std::vector<std::size_t> seg(validation.size());
    for (std::size_t i = 0; i < validation.size(); ++i) seg[i] = bundle.segmentation.assign(validation[i]).index();
    auto rep = build_report("validation", bundle.config.model, bundle.segments, bundle.routes.options,
                            bundle.routes.clusters.route_count, actual, seg, bundle.null_shares);
    rep.clustering_warning = bundle.routes.clusters.warning;
    return rep;
}

std::vector<int> match_routes(const std::map<int, RouteProperties>& trained, std::size_t trained_count,
                              const std::map<int, RouteProperties>& fresh, std::size_t fresh_count,
                              ClusterMatching method) {
    std::vector<int> out(fresh_count, -1);
    if (method == ClusterMatching::positional) {
        for (std::size_t r = 0; r < fresh_count; ++r) {
            if (r < trained_count) out[r] = static_cast<int>(r);
        }
        return out;
    }
    struct Pair {
        double d;
        std::size_t fresh, trained;
    };
    std::vector<Pair> pairs;
    for (std::size_t f = 0; f < fresh_count; ++f) {
        const auto& a = fresh.at(static_cast<int>(f)).mean_zone_km;
        for (std::size_t t = 0; t < trained_count; ++t) {
            const auto& b = trained.at(static_cast<int>(t)).mean_zone_km;
            if (a.size() != b.size()) throw InvalidInput("route matching: zone sets differ");
            pairs.push_back({std::sqrt(squared_distance(a, b)), f, t});
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.d < y.d; });
    std::vector<char> used(trained_count, 0);
    for (const auto& p : pairs) {
        if (out[p.fresh] >= 0 || used[p.trained]) continue;
        out[p.fresh] = static_cast<int>(p.trained);
        used[p.trained] = 1;
    }
    return out;
}

namespace {

bool has_parameters(const ChoiceModel& m) {
    return std::holds_alternative<MultinomialModel>(m) || std::holds_alternative<TreeModel>(m) ||
           std::holds_alternative<NullModel>(m);
}

NullModel remap_null(const NullModel& trained, std::span<const int> matching) {
    NullModel out;
    double assigned = 0.0;
    for (std::size_t r = 0; r < matching.size(); ++r) {
        if (matching[r] < 0) continue;
        auto it = trained.shares.find(matching[r]);
        if (it == trained.shares.end()) continue;
        out.shares[static_cast<int>(r)] = it->second;
        assigned += it->second;
    }
    out.shares[kOther] = std::max(0.0, 1.0 - assigned);
    return out;
}

// Rebuilds a segment's option set from the re-clustering AIRAC and carries
// the trained parameters (or the pooled ones) over to the new routes.
SegmentModel update_segment(const SegmentModel& trained, std::span<const int> labels,
                            std::span<const RouteOption> options, const ChoiceModel& pooled,
                            std::span<const int> matching) {
    SegmentModel m;
    m.key = trained.key;
    m.airline_label = trained.airline_label;
    m.n_flights = labels.size();
    if (labels.empty()) {
        for (const auto& o : options) m.considered.push_back(o.route);
        m.considered.push_back(kOther);
        m.actual_shares.assign(m.considered.size(), 0.0);
        m.model = UniformModel{};
        return m;
    }
    m.considered = considered_routes(labels);
    m.actual_shares = route_shares(labels, m.considered);
    const std::size_t routes = m.considered.size() - 1;
    if (routes == 0) {
        m.model = ConstantModel{kOther};
    } else if (routes == 1 && m.actual_shares.back() <= kConsideredShare) {
        m.model = ConstantModel{m.considered.front()};
    } else {
        const ChoiceModel& source = has_parameters(trained.model) ? trained.model : pooled;
        if (const auto* null = std::get_if<NullModel>(&source)) {
            m.model = remap_null(*null, matching);
        } else if (has_parameters(source)) {
            m.model = source;
        } else {
            m.model = UniformModel{};
        }
    }
    return m;
}

}  // namespace

PredictionReport test(const TrainedBundle& bundle, std::span<const FlightRecord> testing, const ChargingZoneSet& zones,
                      const CaskTable& cask) {
    const auto& config = bundle.config;
    const AiracCalendar cal = config.calendar();
    const std::string& cluster_airac = config.testing_airacs.front();
    std::vector<FlightRecord> cluster_set, eval_set;
    for (const auto& f : testing) {
        const auto id = cal.id_of(f.date);
        if (id == cluster_airac) {
            cluster_set.push_back(f);
        } else if (std::find(config.testing_airacs.begin() + 1, config.testing_airacs.end(), id) !=
                   config.testing_airacs.end()) {
            eval_set.push_back(f);
        }
    }
    if (cluster_set.size() < 8) {
        throw InsufficientData("AIRAC " + cluster_airac + " has " + std::to_string(cluster_set.size()) +
                               " flights; too few to re-cluster");
    }

    const RouteData cluster_data = extract_route_data(cluster_set, zones, cal);
    const RouteSet fresh =
        build_route_set(cluster_routes(cluster_data.raw_features, config.clustering), cluster_data, bundle.scaling);
    const std::size_t k = fresh.clusters.route_count;
    const auto matching = match_routes(bundle.routes.properties, bundle.routes.clusters.route_count, fresh.properties,
                                       k, config.matching);

    Segmentation seg = bundle.segmentation;
    seg.cask = cask;
    std::vector<std::vector<int>> seg_labels(bundle.segments.size());
    for (std::size_t i = 0; i < cluster_set.size(); ++i) {
        seg_labels[seg.assign(cluster_set[i]).index()].push_back(fresh.clusters.labels[i]);
    }
    std::vector<SegmentModel> segments(bundle.segments.size());
    for (std::size_t s = 0; s < segments.size(); ++s) {
        segments[s] = update_segment(bundle.segments[s], seg_labels[s], fresh.options, bundle.pooled, matching);
    }

    GroupShares null_shares;
    for (const auto& [group, shares] : bundle.null_shares) {
        null_shares[group] = remap_null(NullModel{shares}, matching).shares;
    }

    const auto actual = classify_flights(fresh.clusters, eval_set, zones, cal);
    std::vector<std::size_t> flight_seg(eval_set.size());
    for (std::size_t i = 0; i < eval_set.size(); ++i) flight_seg[i] = seg.assign(eval_set[i]).index();
    auto rep = build_report("test", config.model, segments, fresh.options, k, actual, flight_seg, null_shares);
    rep.clustering_warning = fresh.clusters.warning;
    rep.route_matching = matching;
    return rep;
}

// ---------------------------------------------------------------- reports

namespace {

std::string route_name(std::size_t r, std::size_t route_count) {
    return r == route_count ? "other" : std::to_string(r);
}

std::string join_routes(std::span<const int> routes) {
    std::string out;
    for (int r : routes) {
        if (!out.empty()) out += ' ';
        out += r == kOther ? "other" : std::to_string(r);
    }
    return out;
}

}  // namespace

std::string report_csv(const PredictionReport& report) {
    std::string out = "route,group,actual,predicted,null_predicted\n";
    for (const auto& g : report.groups) {
        for (std::size_t r = 0; r <= report.route_count; ++r) {
            out += route_name(r, report.route_count) + "," + g.group + "," + format_fixed(g.actual[r], 0) + "," +
                   format_fixed(g.predicted[r], 6) + "," + format_fixed(g.null_predicted[r], 6) + "\n";
        }
    }
    return out;
}

std::string report_summary_json(const PredictionReport& report) {
    auto opt = [](const std::optional<double>& v) -> nlohmann::ordered_json {
        return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json("n/a");
    };
    nlohmann::ordered_json j;
    j["stage"] = report.stage;
    j["model_family"] = report.model_family;
    j["route_count"] = report.route_count;
    j["clustering_warning"] = report.clustering_warning;
    if (!report.route_matching.empty()) j["route_matching"] = report.route_matching;
    nlohmann::ordered_json groups = nlohmann::ordered_json::array();
    for (const auto& g : report.groups) {
        groups.push_back({{"group", g.group},
                          {"n_flights", g.n_flights},
                          {"pearson_model", opt(g.pearson_model)},
                          {"pearson_null", opt(g.pearson_null)}});
    }
    j["groups"] = groups;
    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (const auto& s : report.segments) {
        segs.push_back({{"segment", s.segment},
                        {"n_flights", s.n_flights},
                        {"model", s.model},
                        {"norm_of_error", opt(s.norm_of_error)}});
    }
    j["segments"] = segs;
    return j.dump(2) + "\n";
}

std::string training_table_csv(const TrainedBundle& bundle) {
    const std::size_t k = bundle.routes.clusters.route_count;
    std::string out = "segment,n_flights,airline,avg_arrival_time,routes_considered,actual_probability_vector,"
                      "norm_of_error,model\n";
    for (std::size_t s = 0; s < bundle.segments.size(); ++s) {
        const auto& m = bundle.segments[s];
        std::vector<double> full(k + 1, 0.0);
        for (std::size_t i = 0; i < m.considered.size(); ++i) {
            full[route_index(m.considered[i], k)] = m.actual_shares[i];
        }
        std::string vec;
        for (double v : full) vec += (vec.empty() ? "" : " ") + format_fixed(v, 4);
        out += std::to_string(s) + "," + std::to_string(m.n_flights) + "," + m.airline_label + "," +
               (m.n_flights ? format_fixed(m.avg_arrival, 2) : std::string{}) + "," + join_routes(m.considered) + "," +
               vec + "," + (m.score ? format_fixed(*m.score, 4) : std::string{}) + "," + variant_name(m.model) + "\n";
    }
    return out;
}

std::string route_table_csv(const RouteSet& routes) {
    std::string out = "route,n_flights,avg_length_nm,avg_charges_eur,regulated_rate,avg_length_ratio\n";
    auto row = [&](const std::string& name, const RouteProperties& p) {
        out += name + "," + std::to_string(p.n_flights) + "," + format_fixed(p.avg_length_nm, 1) + "," +
               format_fixed(p.avg_charges_eur, 2) + "," + format_fixed(p.regulated_rate, 4) + "," +
               format_fixed(p.avg_length_ratio, 4) + "\n";
    };
    for (std::size_t r = 0; r < routes.clusters.route_count; ++r) {
        row(std::to_string(r), routes.properties.at(static_cast<int>(r)));
    }
    if (auto it = routes.properties.find(kOther); it != routes.properties.end()) row("other", it->second);
    return out;
}

}  // namespace routechoice
