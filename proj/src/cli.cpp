#include "routechoice/cli.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "routechoice/airac.hpp"
#include "routechoice/clustering.hpp"
#include "routechoice/dataset.hpp"
#include "routechoice/error.hpp"
#include "routechoice/io.hpp"
#include "routechoice/kernels.hpp"
#include "routechoice/log.hpp"
#include "routechoice/pipeline.hpp"
#include "routechoice/segmentation.hpp"
#include "routechoice/serialization.hpp"
#include "routechoice/synth.hpp"
#include "routechoice/version.hpp"
#include "routechoice/zones.hpp"

namespace routechoice {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
    std::string spec, flights, zones, cask, config, model, out, airac;
    std::uint64_t seed = 1;
    int threads = 0;
};

// Collects input hashes, seeds and stage timings for the run manifest.
class Run {
public:
    Run(std::string command, const std::vector<std::string>& args) : command_(std::move(command)), args_(args) {}

    std::string read(const std::string& role, const std::string& path) {
        std::string text = read_text_file(path);
        inputs_.push_back({{"role", role}, {"path", path}, {"bytes", text.size()}, {"fnv1a64", hex64(fnv1a64(text))}});
        return text;
    }

    template <typename F>
    auto timed(const std::string& stage, F&& f) {
        const auto t0 = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(f())>) {
            f();
            record(stage, t0);
        } else {
            auto result = f();
            record(stage, t0);
            return result;
        }
    }

    void seed(const std::string& name, std::uint64_t value) { seeds_[name] = value; }

    void commit(OutputSet& outputs, const fs::path& dir) {
        ojson files = ojson::array();
        for (const auto& [path, content] : outputs.files()) {
            files.push_back({{"path", path.filename().string()},
                             {"bytes", content.size()},
                             {"fnv1a64", hex64(fnv1a64(content))}});
        }
        ojson m;
        m["tool"] = "routechoice";
        m["version"] = kVersion;
        m["command"] = command_;
        m["args"] = args_;
        m["inputs"] = inputs_;
        m["seeds"] = seeds_.is_null() ? ojson::object() : seeds_;
        m["threads"] = kernels::thread_count();
        m["openmp"] = kernels::openmp_enabled();
        m["outputs"] = files;
        m["timings_ms"] = timings_.is_null() ? ojson::object() : timings_;
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        m["created_utc"] = stamp;
        outputs.add(dir / "manifest.json", m.dump(2) + "\n");
        outputs.commit();
    }

private:
    void record(const std::string& stage, std::chrono::steady_clock::time_point t0) {
        const auto dt = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
        timings_[stage] = std::round(dt.count() * 1000.0) / 1000.0;
    }

    std::string command_;
    std::vector<std::string> args_;
    ojson inputs_ = ojson::array();
    ojson seeds_;
    ojson timings_;
};

std::string flight_labels_csv(std::span<const FlightRecord> flights, std::span<const int> labels) {
    std::vector<std::pair<std::string, int>> rows;
    for (std::size_t i = 0; i < flights.size(); ++i) rows.emplace_back(flights[i].flight_id, labels[i]);
    return labels_to_csv(rows);
}

void cmd_synth(const Options& o, Run& run) {
    const SynthSpec spec = parse_synth_spec(run.read("spec", o.spec));
    run.seed("generator", o.seed);
    const SynthOutput data = run.timed("generate", [&] { return synth_generate(spec, o.seed); });
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "flights.jsonl", flights_to_jsonl(data.flights));
    outputs.add(dir / "zones.json", zones_to_json(data.zones));
    outputs.add(dir / "cask.csv", cask_to_csv(data.cask));
    outputs.add(dir / "labels.csv", labels_to_csv(data.labels));
    run.commit(outputs, dir);
}

std::optional<ExperimentConfig> optional_config(const Options& o, Run& run) {
    if (o.config.empty()) return std::nullopt;
    return parse_experiment_config(run.read("config", o.config));
}

void cmd_cluster(const Options& o, Run& run) {
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto zones = parse_zones(run.read("zones", o.zones));
    const auto config = optional_config(o, run).value_or(ExperimentConfig{});
    if (flights.empty()) throw InsufficientData("no flights to cluster");
    const RouteData data = run.timed("features", [&] { return extract_route_data(flights, zones, config.calendar()); });
    const auto scaling = VariableScaling::fit(data);
    const RouteSet routes = run.timed("cluster", [&] {
        return build_route_set(cluster_routes(data.raw_features, config.clustering), data, scaling);
    });
    if (routes.clusters.warning) warn("clustering did not meet every acceptance criterion; kept the best attempt");
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "clusters.json", cluster_model_to_json(routes.clusters));
    outputs.add(dir / "routes.csv", route_table_csv(routes));
    outputs.add(dir / "labels.csv", flight_labels_csv(flights, routes.clusters.labels));
    run.commit(outputs, dir);
}

void cmd_segment(const Options& o, Run& run) {
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto cask = parse_cask(run.read("cask", o.cask), o.cask);
    run.seed("kmeans", o.seed);
    const Segmentation seg = run.timed("segment", [&] { return fit_segmentation(flights, cask, o.seed); });
    std::string csv = "flight_id,airline_class,time_class,segment\n";
    for (const auto& f : flights) {
        const auto key = seg.assign(f);
        csv += f.flight_id + "," + std::to_string(key.airline_class) + "," + std::to_string(key.time_class) + "," +
               std::to_string(key.index()) + "\n";
    }
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "segmentation.json", segmentation_to_json(seg));
    outputs.add(dir / "segments.csv", csv);
    run.commit(outputs, dir);
}

void cmd_train(const Options& o, Run& run) {
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto zones = parse_zones(run.read("zones", o.zones));
    const auto cask = parse_cask(run.read("cask", o.cask), o.cask);
    const auto config = parse_experiment_config(run.read("config", o.config));
    run.seed("split", config.split_seed);
    run.seed("model", config.seed);
    const auto data = prepare_datasets(config, flights);
    const TrainedBundle bundle = run.timed("train", [&] { return train_pipeline(config, data.training, zones, cask); });
    if (bundle.routes.clusters.warning) warn("clustering did not meet every acceptance criterion; kept the best attempt");
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "bundle.json", bundle_to_json(bundle));
    outputs.add(dir / "training_table.csv", training_table_csv(bundle));
    outputs.add(dir / "routes.csv", route_table_csv(bundle.routes));
    run.commit(outputs, dir);
}

fs::path bundle_path(const std::string& model) {
    const fs::path p(model);
    return fs::is_directory(p) ? p / "bundle.json" : p;
}

void cmd_validate(const Options& o, Run& run) {
    const TrainedBundle bundle = bundle_from_json(run.read("model", bundle_path(o.model).string()));
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto zones = parse_zones(run.read("zones", o.zones));
    run.seed("split", bundle.config.split_seed);
    const auto data = prepare_datasets(bundle.config, flights);
    if (data.validation.empty()) throw InsufficientData("no validation flights in the training period");
    const auto report = run.timed("validate", [&] { return validate(bundle, data.validation, zones); });
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "validation_report.csv", report_csv(report));
    outputs.add(dir / "validation_summary.json", report_summary_json(report));
    run.commit(outputs, dir);
}

void cmd_test(const Options& o, Run& run) {
    const TrainedBundle bundle = bundle_from_json(run.read("model", bundle_path(o.model).string()));
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto zones = parse_zones(run.read("zones", o.zones));
    const auto cask = parse_cask(run.read("cask", o.cask), o.cask);
    const auto data = prepare_datasets(bundle.config, flights);
    const auto report = run.timed("test", [&] { return test(bundle, data.testing, zones, cask); });
    if (report.clustering_warning) warn("test-period clustering did not meet every acceptance criterion");
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "test_report.csv", report_csv(report));
    outputs.add(dir / "test_summary.json", report_summary_json(report));
    run.commit(outputs, dir);
}

void cmd_charges(const Options& o, Run& run, std::ostream& out) {
    const auto flights = parse_flights(run.read("flights", o.flights), o.flights);
    const auto zones = parse_zones(run.read("zones", o.zones));
    const auto calendar = AiracCalendar(AiracCalendar::default_epoch());
    (void)calendar.cycle(o.airac);
    std::string csv = "flight_id,weight_factor";
    for (const auto& z : zones.zones()) csv += "," + z.id;
    csv += ",total_eur\n";
    run.timed("charges", [&] {
        for (const auto& f : flights) {
            const auto profile = zone_distance_profile(f.trajectory, zones);
            const auto c = route_charges(profile, zones, o.airac, weight_factor(f.aircraft_mtow));
            csv += f.flight_id + "," + format_fixed(c.weight_factor, 6);
            for (const auto& z : zones.zones()) {
                auto it = c.charge_by_zone.find(z.id);
                csv += "," + format_fixed(it == c.charge_by_zone.end() ? 0.0 : it->second, 4);
            }
            csv += "," + format_fixed(c.total, 4) + "\n";
        }
    });
    if (o.out.empty()) {
        out << csv;
        return;
    }
    const fs::path dir(o.out);
    OutputSet outputs;
    outputs.add(dir / "charges.csv", csv);
    run.commit(outputs, dir);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Route choice modelling for pre-tactical traffic forecasting", "routechoice"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    app.fallthrough();
    Options o;
    app.add_option("--threads", o.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--spec", o.spec, "generator spec JSON")->required();
    synth->add_option("--seed", o.seed, "generator seed")->required();
    synth->add_option("--out", o.out, "output directory")->required();

    auto* cluster = app.add_subcommand("cluster", "cluster flight trajectories into routes");
    cluster->add_option("--flights", o.flights)->required();
    cluster->add_option("--zones", o.zones)->required();
    cluster->add_option("--config", o.config, "experiment config (clustering parameters)");
    cluster->add_option("--out", o.out)->required();

    auto* segment = app.add_subcommand("segment", "fit airline and arrival-time segments");
    segment->add_option("--flights", o.flights)->required();
    segment->add_option("--cask", o.cask)->required();
    segment->add_option("--seed", o.seed, "k-means seed");
    segment->add_option("--out", o.out)->required();

    auto* train = app.add_subcommand("train", "train route choice models");
    train->add_option("--flights", o.flights)->required();
    train->add_option("--zones", o.zones)->required();
    train->add_option("--cask", o.cask)->required();
    train->add_option("--config", o.config)->required();
    train->add_option("--out", o.out)->required();

    auto* validate_cmd = app.add_subcommand("validate", "score a trained bundle on the validation split");
    validate_cmd->add_option("--model", o.model, "bundle file or training output directory")->required();
    validate_cmd->add_option("--flights", o.flights)->required();
    validate_cmd->add_option("--zones", o.zones)->required();
    validate_cmd->add_option("--out", o.out)->required();

    auto* test_cmd = app.add_subcommand("test", "re-cluster the testing period and score predictions");
    test_cmd->add_option("--model", o.model)->required();
    test_cmd->add_option("--flights", o.flights)->required();
    test_cmd->add_option("--zones", o.zones)->required();
    test_cmd->add_option("--cask", o.cask)->required();
    test_cmd->add_option("--out", o.out)->required();

    auto* charges = app.add_subcommand("charges", "per-flight en-route charges for one AIRAC");
    charges->add_option("--flights", o.flights)->required();
    charges->add_option("--zones", o.zones)->required();
    charges->add_option("--airac", o.airac)->required();
    charges->add_option("--out", o.out, "output directory (default: CSV on stdout)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << "run with --help for usage\n";
        return 2;
    }

    if (o.threads > 0) kernels::set_thread_count(o.threads);
    auto* sub = app.get_subcommands().front();
    Run run(sub->get_name(), args);
    const WarningSink previous = set_warning_sink([&err](std::string_view m) { err << "warning: " << m << "\n"; });
    int code = 0;
    try {
        if (sub == synth) cmd_synth(o, run);
        else if (sub == cluster) cmd_cluster(o, run);
        else if (sub == segment) cmd_segment(o, run);
        else if (sub == train) cmd_train(o, run);
        else if (sub == validate_cmd) cmd_validate(o, run);
        else if (sub == test_cmd) cmd_test(o, run);
        else cmd_charges(o, run, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        code = 1;
    }
    set_warning_sink(previous);
    if (o.threads > 0) kernels::set_thread_count(0);
    return code;
}

}  // namespace routechoice
