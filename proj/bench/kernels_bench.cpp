// Serial reference kernels against their OpenMP versions on the corridor
// fixture's features. Run with --benchmark_filter to pick a kernel.

#include <benchmark/benchmark.h>

#include "routechoice/clustering.hpp"
#include "routechoice/io.hpp"
#include "routechoice/kernels.hpp"
#include "routechoice/synth.hpp"

using namespace routechoice;

namespace {

struct Workload {
    SynthOutput data;
    FeatureMatrix features;
    std::vector<int> labels;
    std::vector<char> eligible;
    std::vector<std::vector<GeoPoint>> paths;
};

const Workload& workload() {
    static const Workload w = [] {
        Workload x;
        auto spec = parse_synth_spec(read_text_file(std::string(ROUTECHOICE_FIXTURES) + "/four_corridors.json"));
        spec.periods.front().flights = 4000;
        x.data = synth_generate(spec, 7);
        const auto rd = extract_route_data(x.data.flights, x.data.zones, AiracCalendar());
        x.features = NormalizationBounds::fit(rd.raw_features).apply(rd.raw_features);
        x.labels = dbscan(x.features, 0.3, 40);
        for (int l : x.labels) x.eligible.push_back(l >= 0);
        for (const auto& f : x.data.flights) {
            std::vector<GeoPoint> p;
            for (const auto& t : f.trajectory) p.push_back(t.position);
            x.paths.push_back(std::move(p));
        }
        return x;
    }();
    return w;
}

int cluster_count(const std::vector<int>& labels) {
    int k = 0;
    for (int l : labels) k = std::max(k, l + 1);
    return k;
}

template <auto Kernel>
void region_queries(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w.features, 0.3));
}

template <auto Kernel>
void silhouette_values(benchmark::State& state) {
    const auto& w = workload();
    const int k = cluster_count(w.labels);
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w.features, w.labels, k));
}

template <auto Kernel>
void nearest_rows(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w.features, w.eligible, w.features));
}

template <auto Kernel>
void zone_profiles(benchmark::State& state) {
    const auto& w = workload();
    for (auto _ : state) benchmark::DoNotOptimize(Kernel(w.paths, w.data.zones));
}

}  // namespace

BENCHMARK(region_queries<kernels::serial::region_queries>)->Name("region_queries/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(region_queries<kernels::omp::region_queries>)->Name("region_queries/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(silhouette_values<kernels::serial::silhouette_values>)->Name("silhouette/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(silhouette_values<kernels::omp::silhouette_values>)->Name("silhouette/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(nearest_rows<kernels::serial::nearest_rows>)->Name("nearest_rows/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(nearest_rows<kernels::omp::nearest_rows>)->Name("nearest_rows/omp")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(zone_profiles<kernels::serial::zone_profiles>)->Name("zone_profiles/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(zone_profiles<kernels::omp::zone_profiles>)->Name("zone_profiles/omp")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
