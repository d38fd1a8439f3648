#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "routechoice/error.hpp"
#include "routechoice/log.hpp"
#include "routechoice/random.hpp"
#include "routechoice/segmentation.hpp"
#include "support/oracles.hpp"

using namespace routechoice;

namespace {

std::vector<double> bumps(const std::vector<double>& means, double sd, std::size_t per, Rng& rng) {
    std::vector<double> h;
    for (double m : means) {
        for (std::size_t i = 0; i < per; ++i) {
            double v = rng.normal(m, sd);
            if (v >= 24.0) v -= 24.0;
            h.push_back(v);
        }
    }
    return h;
}

FlightRecord flight(const std::string& airline, double arrival) {
    FlightRecord f;
    f.airline = airline;
    f.arrival_time = arrival;
    return f;
}

}  // namespace

TEST_CASE("hour wrapping") {
    CHECK(wrap_hour(1.3) == doctest::Approx(25.3));
    CHECK(wrap_hour(4.0) == 4.0);
    CHECK(wrap_hour(23.5) == 23.5);
    CHECK(wrap_hour(25.3) == doctest::Approx(25.3));
    CHECK(wrap_hour(0.0) == 24.0);
}

TEST_CASE("arrival-time k-means") {
    SUBCASE("four bumps split at the gaps and match the exhaustive optimum") {
        Rng rng(1);
        const auto hours = bumps({9.0, 13.0, 17.5, 23.0}, 0.6, 50, rng);
        const auto m = fit_time_classes(hours, 42);
        CHECK_FALSE(m.degenerate);
        std::vector<double> wrapped;
        for (double h : hours) wrapped.push_back(wrap_hour(h));
        const auto best = oracle::best_contiguous_kmeans4(wrapped);
        for (std::size_t c = 0; c < 4; ++c) CHECK(m.centroids[c] == doctest::Approx(best[c]).epsilon(1e-9));
        CHECK(m.boundaries[0] > 10.0);
        CHECK(m.boundaries[0] < 12.0);
        CHECK(m.boundaries[1] > 14.5);
        CHECK(m.boundaries[1] < 16.0);
        CHECK(m.boundaries[2] > 19.0);
        CHECK(m.boundaries[2] < 21.5);
    }
    SUBCASE("late bump spanning midnight stays one class") {
        Rng rng(2);
        const auto hours = bumps({8.0, 12.0, 16.0, 24.5}, 0.7, 40, rng);
        const auto m = fit_time_classes(hours, 1);
        CHECK(m.classify(23.8) == 3);
        CHECK(m.classify(1.0) == 3);
        CHECK(m.centroids[3] > 24.0);
    }
    SUBCASE("training flights keep their k-means cluster") {
        Rng rng(3);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> hours;
            for (int i = 0; i < 80; ++i) hours.push_back(rng.uniform(0.0, 24.0));
            const auto m = fit_time_classes(hours, trial);
            std::array<double, 4> sum{};
            std::array<int, 4> count{};
            for (double h : hours) {
                const auto c = m.classify(h);
                const double w = wrap_hour(h);
                for (std::size_t k = 0; k < 4; ++k) {
                    CHECK(std::abs(w - m.centroids[c]) <= std::abs(w - m.centroids[k]));
                }
                sum[c] += w;
                ++count[c];
            }
            for (std::size_t c = 0; c < 4; ++c) {
                REQUIRE(count[c] > 0);
                CHECK(m.centroids[c] == doctest::Approx(sum[c] / count[c]).epsilon(1e-12));
            }
            CHECK(std::is_sorted(m.centroids.begin(), m.centroids.end()));
        }
    }
    SUBCASE("same seed, same classes") {
        Rng rng(4);
        std::vector<double> hours;
        for (int i = 0; i < 300; ++i) hours.push_back(rng.uniform(0.0, 24.0));
        const auto a = fit_time_classes(hours, 9), b = fit_time_classes(hours, 9);
        CHECK(a.centroids == b.centroids);
    }
    SUBCASE("fewer than four distinct values falls back to quantiles") {
        std::vector<std::string> warnings;
        auto prev = set_warning_sink([&](std::string_view m) { warnings.emplace_back(m); });
        const auto m = fit_time_classes(std::vector<double>{9.0, 9.0, 13.0, 18.0, 18.0}, 1);
        set_warning_sink(prev);
        CHECK(m.degenerate);
        CHECK(warnings.size() == 1);
        CHECK(m.classify(9.0) <= m.classify(13.0));
        CHECK(m.classify(13.0) <= m.classify(18.0));
    }
    CHECK_THROWS_AS(fit_time_classes(std::vector<double>{}, 1), InsufficientData);
}

TEST_CASE("time groups") {
    CHECK(time_group(0) == TimeGroup::early);
    CHECK(time_group(1) == TimeGroup::midday);
    CHECK(time_group(2) == TimeGroup::midday);
    CHECK(time_group(3) == TimeGroup::late);
    CHECK(std::string(time_group_name(TimeGroup::midday)) == "midday");
}

TEST_CASE("airline classes") {
    const CaskTable cask({{"EZY", 0.062}, {"IBE", 0.085}, {"RYR", 0.031}, {"NAX", 0.035}});
    const std::vector<std::string> trained{"IBE", "EZY", "RYR", "IBE", "XYZ"};
    const auto m = fit_airline_classes(trained, cask);
    REQUIRE(m.class_count() == 4);
    CHECK(m.class_label == std::vector<std::string>{"EZY", "IBE", "RYR", "UNKNOWN"});
    CHECK(m.class_cask[3] == kDefaultCask);

    CHECK(m.classify("EZY", cask) == 0);
    CHECK(m.classify("XYZ", cask) == 3);
    // Unseen airline with a class's exact CASK.
    CHECK(m.classify("NEW", CaskTable({{"NEW", 0.085}})) == 1);
    // Unseen low-cost carrier lands with the nearest low-cost class.
    CHECK(m.classify("NAX", cask) == 2);
    // Unseen airline without CASK uses the default value.
    CHECK(m.classify("ZZZ", cask) == 3);
    // Ties go to the lower class.
    AirlineClassModel tie;
    tie.class_cask = {0.75, 0.25};
    tie.class_label = {"A", "B"};
    CHECK(tie.nearest_cask_class(0.5) == 0);

    SUBCASE("nearest-CASK mapping is idempotent and order independent") {
        Rng rng(5);
        for (int i = 0; i < 200; ++i) {
            const double c = rng.uniform(0.0, 0.15);
            const auto k = m.nearest_cask_class(c);
            CHECK(m.nearest_cask_class(m.class_cask[k]) == k);
        }
        std::vector<std::string> shuffled{"RYR", "XYZ", "IBE", "EZY"};
        const auto m2 = fit_airline_classes(shuffled, cask);
        CHECK(m2.class_label == m.class_label);
        CHECK(m2.airline_class == m.airline_class);
    }
}

TEST_CASE("segmentation") {
    const CaskTable cask({{"EZY", 0.062}, {"IBE", 0.085}, {"RYR", 0.031}, {"VLG", 0.05}, {"BAW", 0.11},
                          {"AFR", 0.1}, {"KLM", 0.095}, {"TAP", 0.08}});
    std::vector<FlightRecord> training;
    Rng rng(6);
    for (const auto* a : {"EZY", "IBE", "RYR", "VLG", "BAW", "AFR", "KLM", "TAP"}) {
        for (int i = 0; i < 20; ++i) training.push_back(flight(a, rng.uniform(5.0, 23.0)));
    }
    const auto s = fit_segmentation(training, cask, 3);
    CHECK(s.segment_count() == 32);
    for (const auto& f : training) {
        const auto k = s.assign(f);
        CHECK(k.index() < s.segment_count());
        CHECK(s.assign(f) == k);
        CHECK(k.time_class == s.time.classify(f.arrival_time));
    }
    CHECK(s.assign(flight("IBE", 12.0)).airline_class == s.airlines.airline_class.at("IBE"));
}
