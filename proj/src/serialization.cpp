#include "routechoice/serialization.hpp"

#include "json.hpp"
#include "routechoice/error.hpp"

namespace routechoice {

using ojson = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;

ojson matrix_json(const FeatureMatrix& m) { return {{"cols", m.cols()}, {"data", m.data()}}; }

FeatureMatrix matrix_from(const ojson& j) {
    const auto cols = j.at("cols").get<std::size_t>();
    auto data = j.at("data").get<std::vector<double>>();
    if (cols == 0 ? !data.empty() : data.size() % cols != 0) throw DataError("feature matrix has a ragged shape");
    return FeatureMatrix(cols, std::move(data));
}

ojson cluster_json(const RouteClusterModel& m) {
    ojson history = ojson::array();
    for (const auto& a : m.history) {
        ojson h;
        h["min_samples"] = a.min_samples;
        h["silhouette_floor"] = a.silhouette_floor;
        h["silhouette"] = a.silhouette ? ojson(*a.silhouette) : ojson(nullptr);
        h["n_clusters"] = a.n_clusters;
        h["largest_cluster"] = a.largest_cluster;
        h["silhouette_ok"] = a.silhouette_ok;
        h["count_ok"] = a.count_ok;
        h["dominance_ok"] = a.dominance_ok;
        history.push_back(h);
    }
    ojson j;
    j["eps"] = m.eps;
    j["min_samples"] = m.min_samples;
    j["route_count"] = m.route_count;
    j["warning"] = m.warning;
    j["bounds"] = {{"min", m.bounds.min}, {"max", m.bounds.max}};
    j["features"] = matrix_json(m.features);
    j["dbscan_labels"] = m.dbscan_labels;
    j["labels"] = m.labels;
    j["history"] = history;
    return j;
}

RouteClusterModel cluster_from(const ojson& j) {
    RouteClusterModel m;
    m.eps = j.at("eps").get<double>();
    m.min_samples = j.at("min_samples").get<std::size_t>();
    m.route_count = j.at("route_count").get<std::size_t>();
    m.warning = j.at("warning").get<bool>();
    m.bounds.min = j.at("bounds").at("min").get<std::vector<double>>();
    m.bounds.max = j.at("bounds").at("max").get<std::vector<double>>();
    m.features = matrix_from(j.at("features"));
    m.dbscan_labels = j.at("dbscan_labels").get<std::vector<int>>();
    m.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& h : j.at("history")) {
        ClusterAttempt a;
        a.min_samples = h.at("min_samples").get<std::size_t>();
        a.silhouette_floor = h.at("silhouette_floor").get<double>();
        if (!h.at("silhouette").is_null()) a.silhouette = h.at("silhouette").get<double>();
        a.n_clusters = h.at("n_clusters").get<std::size_t>();
        a.largest_cluster = h.at("largest_cluster").get<std::size_t>();
        a.silhouette_ok = h.at("silhouette_ok").get<bool>();
        a.count_ok = h.at("count_ok").get<bool>();
        a.dominance_ok = h.at("dominance_ok").get<bool>();
        m.history.push_back(a);
    }
    const std::size_t n = m.labels.size();
    if (m.features.rows() != n || m.dbscan_labels.size() != n) throw DataError("cluster model sizes disagree");
    if (m.bounds.min.size() != m.features.cols() || m.bounds.max.size() != m.features.cols()) {
        throw DataError("cluster model bounds do not match the feature width");
    }
    for (int l : m.labels) {
        if (l != kOther && (l < 0 || static_cast<std::size_t>(l) >= m.route_count)) {
            throw DataError("cluster model label out of range");
        }
    }
    return m;
}

ojson segmentation_json(const Segmentation& s) {
    ojson j;
    j["time_classes"] = {{"centroids", s.time.centroids},
                         {"boundaries", s.time.boundaries},
                         {"degenerate", s.time.degenerate}};
    ojson airlines;
    for (const auto& [code, cls] : s.airlines.airline_class) airlines[code] = cls;
    j["airline_classes"] = {{"airlines", airlines},
                            {"class_cask", s.airlines.class_cask},
                            {"class_label", s.airlines.class_label}};
    ojson cask;
    for (const auto& [code, v] : s.cask.entries()) cask[code] = v;
    j["cask"] = cask.is_null() ? ojson::object() : cask;
    return j;
}

Segmentation segmentation_from(const ojson& j) {
    Segmentation s;
    const auto& t = j.at("time_classes");
    s.time.centroids = t.at("centroids").get<std::array<double, kTimeClasses>>();
    s.time.boundaries = t.at("boundaries").get<std::array<double, kTimeClasses - 1>>();
    s.time.degenerate = t.at("degenerate").get<bool>();
    const auto& a = j.at("airline_classes");
    for (const auto& [code, cls] : a.at("airlines").items()) s.airlines.airline_class[code] = cls.get<std::size_t>();
    s.airlines.class_cask = a.at("class_cask").get<std::vector<double>>();
    s.airlines.class_label = a.at("class_label").get<std::vector<std::string>>();
    if (s.airlines.class_cask.size() != s.airlines.class_label.size() || s.airlines.class_cask.empty()) {
        throw DataError("segmentation has inconsistent airline classes");
    }
    for (const auto& [code, cls] : s.airlines.airline_class) {
        if (cls >= s.airlines.class_count()) throw DataError("airline " + code + " maps to an unknown class");
    }
    std::map<std::string, double> cask;
    for (const auto& [code, v] : j.at("cask").items()) cask[code] = v.get<double>();
    s.cask = CaskTable(std::move(cask));
    return s;
}

ojson tree_json(const RegressionTree& tree) {
    ojson nodes = ojson::array();
    for (const auto& n : tree.nodes()) nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
    return nodes;
}

RegressionTree tree_from(const ojson& j) {
    std::vector<RegressionTree::Node> nodes;
    for (const auto& n : j) {
        RegressionTree::Node node;
        node.feature = n.at(0).get<int>();
        node.threshold = n.at(1).get<double>();
        node.value = n.at(2).get<double>();
        node.left = n.at(3).get<int>();
        node.right = n.at(4).get<int>();
        nodes.push_back(node);
    }
    const auto count = static_cast<int>(nodes.size());
    for (const auto& n : nodes) {
        if (n.feature >= 3 || (n.feature >= 0 && (n.left < 0 || n.left >= count || n.right < 0 || n.right >= count))) {
            throw DataError("regression tree has a dangling node");
        }
    }
    return RegressionTree(std::move(nodes));
}

ojson shares_json(const std::map<int, double>& shares) {
    ojson j = ojson::array();
    for (const auto& [route, share] : shares) j.push_back({route, share});
    return j;
}

std::map<int, double> shares_from(const ojson& j) {
    std::map<int, double> out;
    for (const auto& e : j) out[e.at(0).get<int>()] = e.at(1).get<double>();
    return out;
}

ojson choice_json(const ChoiceModel& model) {
    ojson j;
    j["type"] = variant_name(model);
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MultinomialModel>) {
                j["betas"] = m.betas;
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                j["depth"] = m.depth;
                j["nodes"] = tree_json(m.tree);
            } else if constexpr (std::is_same_v<T, ConstantModel>) {
                j["route"] = m.route;
            } else if constexpr (std::is_same_v<T, NullModel>) {
                j["shares"] = shares_json(m.shares);
            }
        },
        model);
    return j;
}

ChoiceModel choice_from(const ojson& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == variant_name(MultinomialModel{})) return MultinomialModel{j.at("betas").get<Betas>()};
    if (type == variant_name(TreeModel{})) return TreeModel{tree_from(j.at("nodes")), j.at("depth").get<int>()};
    if (type == variant_name(ConstantModel{})) return ConstantModel{j.at("route").get<int>()};
    if (type == variant_name(UniformModel{})) return UniformModel{};
    if (type == variant_name(NullModel{})) return NullModel{shares_from(j.at("shares"))};
    throw DataError("unknown choice model type '" + type + "'");
}

template <typename F>
auto guarded(const std::string& what, const std::string& text, F&& f) {
    try {
        return f(ojson::parse(text));
    } catch (const ojson::exception& e) {
        throw DataError(what + ": " + e.what());
    }
}

}  // namespace

std::string cluster_model_to_json(const RouteClusterModel& model) { return cluster_json(model).dump() + "\n"; }

RouteClusterModel cluster_model_from_json(const std::string& text) {
    return guarded("cluster model", text, [](const ojson& j) { return cluster_from(j); });
}

std::string segmentation_to_json(const Segmentation& seg) { return segmentation_json(seg).dump(2) + "\n"; }

Segmentation segmentation_from_json(const std::string& text) {
    return guarded("segmentation", text, [](const ojson& j) { return segmentation_from(j); });
}

std::string choice_model_to_json(const ChoiceModel& model) { return choice_json(model).dump() + "\n"; }

ChoiceModel choice_model_from_json(const std::string& text) {
    return guarded("choice model", text, [](const ojson& j) { return choice_from(j); });
}

std::string bundle_to_json(const TrainedBundle& b) {
    ojson j;
    j["format_version"] = kFormatVersion;
    j["config"] = ojson::parse(experiment_config_to_json(b.config));
    j["scaling"] = {{"length_min", b.scaling.length_min},
                    {"length_max", b.scaling.length_max},
                    {"charges_min", b.scaling.charges_min},
                    {"charges_max", b.scaling.charges_max}};
    j["clusters"] = cluster_json(b.routes.clusters);
    ojson props = ojson::array();
    for (const auto& [route, p] : b.routes.properties) {
        props.push_back({{"route", route},
                         {"n_flights", p.n_flights},
                         {"avg_length_nm", p.avg_length_nm},
                         {"avg_charges_eur", p.avg_charges_eur},
                         {"regulated_rate", p.regulated_rate},
                         {"avg_length_ratio", p.avg_length_ratio},
                         {"mean_zone_km", p.mean_zone_km}});
    }
    j["route_properties"] = props;
    ojson options = ojson::array();
    for (const auto& o : b.routes.options) options.push_back({o.route, o.x_length, o.x_charges, o.x_congestion});
    j["route_options"] = options;
    j["segmentation"] = segmentation_json(b.segmentation);
    ojson segs = ojson::array();
    for (const auto& s : b.segments) {
        ojson e;
        e["airline_class"] = s.key.airline_class;
        e["time_class"] = s.key.time_class;
        e["airline_label"] = s.airline_label;
        e["n_flights"] = s.n_flights;
        e["avg_arrival"] = s.avg_arrival;
        e["considered"] = s.considered;
        e["actual_shares"] = s.actual_shares;
        e["score"] = s.score ? ojson(*s.score) : ojson(nullptr);
        e["model"] = choice_json(s.model);
        segs.push_back(e);
    }
    j["segments"] = segs;
    j["pooled"] = choice_json(b.pooled);
    ojson null_shares;
    for (const auto& [group, shares] : b.null_shares) null_shares[group] = shares_json(shares);
    j["null_shares"] = null_shares;
    return j.dump(1) + "\n";
}

TrainedBundle bundle_from_json(const std::string& text) {
    return guarded("bundle", text, [](const ojson& j) {
        if (j.at("format_version").get<int>() != kFormatVersion) throw DataError("bundle: unsupported format version");
        TrainedBundle b;
        try {
            b.config = parse_experiment_config(j.at("config").dump());
        } catch (const ConfigError& e) {
            throw DataError(std::string("bundle: ") + e.what());
        }
        const auto& sc = j.at("scaling");
        b.scaling.length_min = sc.at("length_min").get<double>();
        b.scaling.length_max = sc.at("length_max").get<double>();
        b.scaling.charges_min = sc.at("charges_min").get<double>();
        b.scaling.charges_max = sc.at("charges_max").get<double>();
        b.routes.clusters = cluster_from(j.at("clusters"));
        for (const auto& p : j.at("route_properties")) {
            RouteProperties r;
            r.n_flights = p.at("n_flights").get<std::size_t>();
            r.avg_length_nm = p.at("avg_length_nm").get<double>();
            r.avg_charges_eur = p.at("avg_charges_eur").get<double>();
            r.regulated_rate = p.at("regulated_rate").get<double>();
            r.avg_length_ratio = p.at("avg_length_ratio").get<double>();
            r.mean_zone_km = p.at("mean_zone_km").get<std::vector<double>>();
            b.routes.properties[p.at("route").get<int>()] = std::move(r);
        }
        for (const auto& o : j.at("route_options")) {
            b.routes.options.push_back(
                RouteOption{o.at(0).get<int>(), o.at(1).get<double>(), o.at(2).get<double>(), o.at(3).get<double>()});
        }
        b.segmentation = segmentation_from(j.at("segmentation"));
        for (const auto& e : j.at("segments")) {
            SegmentModel s;
            s.key = SegmentKey{e.at("airline_class").get<std::size_t>(), e.at("time_class").get<std::size_t>()};
            s.airline_label = e.at("airline_label").get<std::string>();
            s.n_flights = e.at("n_flights").get<std::size_t>();
            s.avg_arrival = e.at("avg_arrival").get<double>();
            s.considered = e.at("considered").get<std::vector<int>>();
            s.actual_shares = e.at("actual_shares").get<std::vector<double>>();
            if (!e.at("score").is_null()) s.score = e.at("score").get<double>();
            s.model = choice_from(e.at("model"));
            b.segments.push_back(std::move(s));
        }
        if (b.segments.size() != b.segmentation.segment_count()) throw DataError("bundle: segment count mismatch");
        b.pooled = choice_from(j.at("pooled"));
        for (const auto& [group, shares] : j.at("null_shares").items()) b.null_shares[group] = shares_from(shares);
        for (const auto& g : report_groups()) {
            if (!b.null_shares.contains(g)) throw DataError("bundle: missing null shares for group " + g);
        }
        return b;
    });
}

}  // namespace routechoice
