#include <cmath>

#include "doctest.h"
#include "routechoice/error.hpp"
#include "routechoice/geo.hpp"
#include "routechoice/kernels.hpp"
#include "routechoice/random.hpp"
#include "routechoice/zones.hpp"
#include "support/oracles.hpp"

using namespace routechoice;

namespace {

ChargingZone rect(const std::string& id, double lat0, double lat1, double lon0, double lon1,
                  std::map<std::string, double> rates) {
    return ChargingZone{id, {{{lat0, lon0}, {lat0, lon1}, {lat1, lon1}, {lat1, lon0}, {lat0, lon0}}}, std::move(rates)};
}

GeoPoint random_point(Rng& rng) { return {rng.uniform(-89.0, 89.0), rng.uniform(-179.0, 179.0)}; }

}  // namespace

TEST_CASE("great circle distances") {
    CHECK(great_circle_km({0, 0}, {0, 0}) == 0.0);
    CHECK(great_circle_km({0, 0}, {0, 1}) == doctest::Approx(6371.0 * std::numbers::pi / 180.0).epsilon(1e-12));
    CHECK(std::abs(great_circle_km({0, 0}, {0, 1}) - 111.195) < 1e-3);
    CHECK(std::abs(great_circle_km({90, 0}, {-90, 0}) - 20015.087) < 0.01);
    CHECK(great_circle_km({0, 0}, {0, 1}, 1.0) == doctest::Approx(std::numbers::pi / 180.0));
}

TEST_CASE("great circle matches chord oracle, is symmetric and obeys the triangle inequality") {
    Rng rng(3);
    for (int i = 0; i < 500; ++i) {
        const auto a = random_point(rng), b = random_point(rng), c = random_point(rng);
        const double ab = great_circle_km(a, b);
        CHECK(ab == doctest::Approx(oracle::chord_distance_km(a, b)).epsilon(1e-9));
        CHECK(ab == great_circle_km(b, a));
        CHECK(ab <= (great_circle_km(a, c) + great_circle_km(c, b)) * (1.0 + 1e-9));
    }
}

TEST_CASE("interpolation and destination stay on the great circle") {
    const GeoPoint a{41.3, 2.08}, b{51.47, -0.45};
    const double d = great_circle_km(a, b);
    const auto m = interpolate(a, b, 0.25);
    CHECK(great_circle_km(a, m) == doctest::Approx(0.25 * d).epsilon(1e-9));
    CHECK(great_circle_km(m, b) == doctest::Approx(0.75 * d).epsilon(1e-9));
    const auto p = destination_point(a, initial_bearing_deg(a, b), d);
    CHECK(great_circle_km(p, b) < 1e-6);
    const std::vector<GeoPoint> path{a, m, b};
    CHECK(path_length_km(path) == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("weight factor") {
    CHECK(weight_factor(50.0) == 1.0);
    CHECK(std::abs(weight_factor(80.0) - 1.2649) < 1e-4);
    CHECK(weight_factor(200.0) == 2.0);
    CHECK_THROWS_AS(weight_factor(0.0), InvalidInput);
    CHECK_THROWS_AS(weight_factor(-3.0), InvalidInput);
}

TEST_CASE("point validation") {
    CHECK_NOTHROW(validate_point({90, 180}));
    CHECK_THROWS_AS(validate_point({91, 0}), InvalidInput);
    CHECK_THROWS_AS(validate_point({0, 181}), InvalidInput);
    Trajectory t{{{0, 0}, 0, 10}, {{0, 1}, 0, 5}};
    CHECK_THROWS_AS(validate_trajectory(t), InvalidInput);
    CHECK_THROWS_AS(validate_trajectory(std::span(t).first(1)), InvalidInput);
}

TEST_CASE("point in polygon uses the even-odd rule") {
    // Square with a square hole.
    std::vector<std::vector<GeoPoint>> rings{{{0, 0}, {0, 10}, {10, 10}, {10, 0}, {0, 0}},
                                             {{4, 4}, {4, 6}, {6, 6}, {6, 4}, {4, 4}}};
    CHECK(point_in_rings({1, 1}, rings));
    CHECK_FALSE(point_in_rings({5, 5}, rings));
    CHECK_FALSE(point_in_rings({11, 5}, rings));
}

TEST_CASE("zone distance profile") {
    const ChargingZoneSet zones({rect("LE", 35, 44, -10, 4, {{"1601", 70.0}}), rect("LF", 44, 51, -5, 8, {{"1601", 60.0}})});

    SUBCASE("single containing zone") {
        const GeoPoint a{40, -3};
        const GeoPoint b = destination_point(a, 90.0, 300.0);
        const std::vector<GeoPoint> path{a, b};
        const auto p = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        REQUIRE(p.km_by_zone.size() == 1);
        CHECK(p.km_by_zone.at("LE") == doctest::Approx(300.0).epsilon(1e-9));
        CHECK(p.total_km == doctest::Approx(300.0).epsilon(1e-9));
    }
    SUBCASE("straddling two zones credits each segment to its midpoint zone") {
        // Two 40 km legs either side of the 44N boundary.
        const GeoPoint mid{44.0, 0.0};
        const GeoPoint south = destination_point(mid, 180.0, 40.0);
        const GeoPoint north = destination_point(mid, 0.0, 40.0);
        const std::vector<GeoPoint> path{south, mid, north};
        const auto p = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        CHECK(p.km_by_zone.at("LE") == doctest::Approx(great_circle_km(south, mid)).epsilon(1e-9));
        CHECK(p.km_by_zone.at("LF") == doctest::Approx(great_circle_km(mid, north)).epsilon(1e-9));
    }
    SUBCASE("open ocean") {
        const std::vector<GeoPoint> path{{30, -40}, {31, -38}};
        const auto p = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        CHECK(p.km_by_zone.empty());
        CHECK(p.total_km > 0.0);
    }
    SUBCASE("long segments are densified before attribution") {
        // One 1000+ km leg crossing the boundary: a single midpoint would give
        // everything to one zone.
        const std::vector<GeoPoint> path{{38, 0}, {48, 0}};
        const auto p = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        const double expect_le = great_circle_km({38, 0}, {44, 0});
        CHECK(std::abs(p.km_by_zone.at("LE") - expect_le) <= kMaxSegmentKm);
        CHECK(p.km_by_zone.at("LE") + p.km_by_zone.at("LF") == doctest::Approx(p.total_km).epsilon(1e-12));
    }
    SUBCASE("overlapping zones resolve to the first in file order") {
        const ChargingZoneSet overlap({rect("A", 0, 10, 0, 10, {{"x", 1.0}}), rect("B", 0, 10, 0, 10, {{"x", 1.0}})});
        CHECK(overlap.locate({5, 5}) == std::optional<std::size_t>(0));
    }
    CHECK_THROWS_AS(zone_distance_profile(std::span<const GeoPoint>(), zones), InvalidInput);
}

TEST_CASE("route charges") {
    const ChargingZoneSet zones({rect("Z", 0, 10, 0, 10, {{"1601", 100.0}, {"1602", 80.0}})});
    ZoneDistanceProfile p;
    p.km_by_zone["Z"] = 500.0;
    p.total_km = 500.0;
    CHECK(route_charges(p, zones, "1601", 1.0).total == doctest::Approx(500.0).epsilon(1e-15));
    CHECK(std::abs(route_charges(p, zones, "1601", weight_factor(80.0)).total - 632.46) < 0.01);
    CHECK(route_charges(p, zones, "1602", 1.0).total == doctest::Approx(400.0));
    CHECK(route_charges(ZoneDistanceProfile{}, zones, "1601", 1.0).total == 0.0);
    CHECK_THROWS_AS(route_charges(p, zones, "1701", 1.0), ConfigError);
}

TEST_CASE("charges are linear in weight factor and unit rates") {
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ChargingZone> zs, scaled;
        const double s = rng.uniform(0.1, 5.0);
        ZoneDistanceProfile p;
        for (int z = 0; z < 5; ++z) {
            const double rate = rng.uniform(20.0, 120.0);
            const std::string id = "Z" + std::to_string(z);
            zs.push_back(rect(id, z, z + 1, 0, 1, {{"p", rate}}));
            scaled.push_back(rect(id, z, z + 1, 0, 1, {{"p", rate * s}}));
            if (rng.bernoulli(0.7)) p.km_by_zone[id] = rng.uniform(0.0, 800.0);
        }
        const ChargingZoneSet a(zs), b(scaled);
        const double wf = rng.uniform(0.5, 2.5);
        const double base = route_charges(p, a, "p", wf).total;
        CHECK(route_charges(p, a, "p", 2.0 * wf).total == doctest::Approx(2.0 * base).epsilon(1e-12));
        CHECK(route_charges(p, b, "p", wf).total == doctest::Approx(s * base).epsilon(1e-12));
    }
}

TEST_CASE("profile zone distances never exceed the total") {
    std::vector<ChargingZone> grid;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            grid.push_back(rect("G" + std::to_string(r) + std::to_string(c), 38 + 4 * r, 42 + 4 * r, -8 + 4 * c,
                                -4 + 4 * c, {{"p", 50.0}}));
        }
    }
    const ChargingZoneSet zones(grid);
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<GeoPoint> path;
        for (int k = 0; k < 6; ++k) path.push_back({rng.uniform(36, 56), rng.uniform(-10, 10)});
        const auto p = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        double sum = 0.0;
        for (const auto& [id, km] : p.km_by_zone) sum += km;
        CHECK(sum <= p.total_km + 1e-6);
        CHECK(p.total_km == doctest::Approx(path_length_km(path)).epsilon(1e-12));
    }
}

TEST_CASE("zone file parsing") {
    const std::string text = R"({"type":"FeatureCollection","features":[
      {"type":"Feature","properties":{"id":"LE","unit_rates":{"1601":71.5}},
       "geometry":{"type":"Polygon","coordinates":[[[-10,35],[4,35],[4,44],[-10,44],[-10,35]]]}},
      {"type":"Feature","properties":{"id":"LF","unit_rates":{"1601":62.0}},
       "geometry":{"type":"MultiPolygon","coordinates":[[[[-5,44],[8,44],[8,51],[-5,51],[-5,44]]]]}}]})";
    const auto zones = parse_zones(text);
    REQUIRE(zones.size() == 2);
    CHECK(zones[0].id == "LE");
    CHECK(zones[0].unit_rate("1601") == 71.5);
    CHECK(zones.locate({40, -3}) == std::optional<std::size_t>(0));
    CHECK(zones.locate({47, 2}) == std::optional<std::size_t>(1));
    const auto again = parse_zones(zones_to_json(zones));
    CHECK(again.locate({47, 2}) == std::optional<std::size_t>(1));
    CHECK(again[1].unit_rates == zones[1].unit_rates);

    CHECK_THROWS_AS(parse_zones("{"), DataError);
    CHECK_THROWS_AS(parse_zones(R"({"type":"FeatureCollection","features":[{"properties":{"id":"X","unit_rates":{"1601":-1}},
        "geometry":{"type":"Polygon","coordinates":[[[0,0],[1,0],[1,1],[0,0]]]}}]})"),
                    DataError);
}

TEST_CASE("serial and parallel zone profiles agree bit for bit") {
    const ChargingZoneSet zones({rect("A", 30, 45, -10, 5, {{"p", 1.0}}), rect("B", 45, 60, -10, 5, {{"p", 1.0}})});
    Rng rng(9);
    std::vector<std::vector<GeoPoint>> paths(64);
    for (auto& p : paths) {
        for (int k = 0; k < 5; ++k) p.push_back({rng.uniform(32, 58), rng.uniform(-9, 4)});
    }
    const auto s = kernels::serial::zone_profiles(paths, zones);
    const auto o = kernels::omp::zone_profiles(paths, zones);
    REQUIRE(s.size() == o.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].km_by_zone == o[i].km_by_zone);
        CHECK(s[i].total_km == o[i].total_km);
    }
    paths[10].resize(1);
    CHECK_THROWS_AS(kernels::omp::zone_profiles(paths, zones), InvalidInput);
}
