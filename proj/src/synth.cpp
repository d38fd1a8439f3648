#include "routechoice/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "routechoice/error.hpp"
#include "routechoice/random.hpp"

namespace routechoice {

using nlohmann::json;

namespace {

GeoPoint point_from_json(const json& j) { return GeoPoint{j.at(0).get<double>(), j.at(1).get<double>()}; }

SynthSpec::Airport airport_from_json(const json& j) {
    return {j.at("code").get<std::string>(), GeoPoint{j.at("lat").get<double>(), j.at("lon").get<double>()}};
}

GeoPoint centroid(const std::vector<SynthSpec::Airport>& airports) {
    double lat = 0.0, lon = 0.0;
    for (const auto& a : airports) {
        lat += a.location.lat;
        lon += a.location.lon;
    }
    const double n = static_cast<double>(airports.size());
    return {lat / n, lon / n};
}

std::vector<GeoPoint> nominal_path(const SynthSpec& spec, std::size_t corridor) {
    std::vector<GeoPoint> path{centroid(spec.origins)};
    for (const auto& w : spec.corridors[corridor].waypoints) path.push_back(w);
    path.push_back(centroid(spec.destinations));
    return path;
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

std::string zone_id(int r, int c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "Z%02d%02d", r, c);
    return buf;
}

double period_rate_factor(const SynthSpec::Period& p, const std::string& zone) {
    auto it = p.rate_factors.find(zone);
    return it == p.rate_factors.end() ? 1.0 : it->second;
}

const SynthSpec::Period& find_period(const SynthSpec& spec, const std::string& id) {
    for (const auto& p : spec.periods) {
        if (p.airac == id) return p;
    }
    throw ConfigError("synthetic spec has no period " + id);
}

double regulated_rate(const SynthSpec& spec, const SynthSpec::Period& p, std::size_t corridor) {
    auto it = p.regulated_rates.find(corridor);
    return it == p.regulated_rates.end() ? spec.corridors[corridor].regulated_rate : it->second;
}

void validate_spec(const SynthSpec& spec) {
    if (spec.corridors.empty()) throw InvalidInput("synthetic spec declares no route families");
    if (spec.origins.empty() || spec.destinations.empty()) throw InvalidInput("synthetic spec needs airports");
    if (spec.airlines.empty()) throw InvalidInput("synthetic spec declares no airlines");
    if (spec.periods.empty()) throw InvalidInput("synthetic spec declares no periods");
    if (spec.zone_grid.rows < 1 || spec.zone_grid.cols < 1) throw InvalidInput("zone grid needs rows, cols >= 1");
    std::set<std::string> grid_ids;
    for (int r = 0; r < spec.zone_grid.rows; ++r) {
        for (int c = 0; c < spec.zone_grid.cols; ++c) grid_ids.insert(zone_id(r, c));
    }
    for (const auto& [id, rate] : spec.zone_grid.unit_rates) {
        if (!grid_ids.contains(id)) throw InvalidInput("unit_rates names unknown zone " + id);
        if (!(rate > 0.0)) throw InvalidInput("zone " + id + ": unit rate must be positive");
    }
    if (spec.noise_share < 0.0 || spec.noise_share >= 1.0) throw InvalidInput("noise_share must be in [0, 1)");
    for (const auto& a : spec.airlines) {
        if (!a.route_weights.empty() && a.route_weights.size() != spec.corridors.size()) {
            throw InvalidInput("airline " + a.code + ": route_weights must have one entry per corridor");
        }
        if (a.mtow <= 0.0) throw InvalidInput("airline " + a.code + ": mtow must be positive");
    }
}

// Arrival hour on the [4, 28) axis drawn from the bump mixture.
double draw_arrival_hour(const SynthSpec& spec, Rng& rng) {
    if (spec.arrival_bumps.empty()) return rng.uniform(4.0, 28.0);
    double total = 0.0;
    for (const auto& b : spec.arrival_bumps) total += b.weight;
    double u = rng.uniform() * total;
    std::size_t k = 0;
    for (; k + 1 < spec.arrival_bumps.size(); ++k) {
        if (u < spec.arrival_bumps[k].weight) break;
        u -= spec.arrival_bumps[k].weight;
    }
    const auto& b = spec.arrival_bumps[k];
    double h = rng.normal(b.mean, b.sd);
    h = 4.0 + std::fmod(std::fmod(h - 4.0, 24.0) + 24.0, 24.0);
    return h;
}

std::size_t draw_weighted(const std::vector<double>& weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        if (u < weights[i]) return i;
        u -= weights[i];
    }
    return weights.size() - 1;
}

Trajectory build_trajectory(const std::vector<GeoPoint>& waypoints, const SynthSpec& spec, double arrival_epoch_s) {
    std::vector<GeoPoint> dense{waypoints.front()};
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const double len = great_circle_km(waypoints[i - 1], waypoints[i]);
        const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(len / spec.point_spacing_km)));
        for (std::size_t k = 1; k <= n; ++k) {
            dense.push_back(interpolate(waypoints[i - 1], waypoints[i], static_cast<double>(k) / static_cast<double>(n)));
        }
    }
    for (auto& p : dense) {
        p.lat = round_to(p.lat, 1e5);
        p.lon = round_to(p.lon, 1e5);
    }
    std::vector<double> along(dense.size(), 0.0);
    for (std::size_t i = 1; i < dense.size(); ++i) along[i] = along[i - 1] + great_circle_km(dense[i - 1], dense[i]);
    const double total = along.back();
    const double speed_km_s = spec.cruise_speed_kt * kKmPerNauticalMile / 3600.0;
    const double departure = arrival_epoch_s - total / speed_km_s;
    Trajectory t;
    t.reserve(dense.size());
    for (std::size_t i = 0; i < dense.size(); ++i) {
        const double s = along[i];
        const double alt = 35000.0 * std::clamp(std::min(s, total - s) / 150.0, 0.0, 1.0);
        t.push_back(TrajectoryPoint{dense[i], std::round(alt), std::round(departure + s / speed_km_s)});
    }
    return t;
}

std::vector<GeoPoint> jittered_waypoints(const SynthSpec& spec, const std::vector<GeoPoint>& interior,
                                         const GeoPoint& origin, const GeoPoint& destination, double jitter_km,
                                         Rng& rng) {
    std::vector<GeoPoint> pts{origin};
    const double offset = rng.normal(0.0, jitter_km);
    for (std::size_t i = 0; i < interior.size(); ++i) {
        const GeoPoint& prev = i == 0 ? origin : interior[i - 1];
        const GeoPoint& next = i + 1 == interior.size() ? destination : interior[i + 1];
        const double bearing = initial_bearing_deg(prev, next) + 90.0;
        const double d = offset + rng.normal(0.0, jitter_km / 3.0);
        pts.push_back(destination_point(interior[i], bearing, d));
    }
    pts.push_back(destination);
    (void)spec;
    return pts;
}

}  // namespace

SynthSpec parse_synth_spec(const std::string& text) {
    SynthSpec spec;
    try {
        const json j = json::parse(text);
        const auto& g = j.at("zone_grid");
        spec.zone_grid.lat_min = g.at("lat_min").get<double>();
        spec.zone_grid.lat_max = g.at("lat_max").get<double>();
        spec.zone_grid.lon_min = g.at("lon_min").get<double>();
        spec.zone_grid.lon_max = g.at("lon_max").get<double>();
        spec.zone_grid.rows = g.at("rows").get<int>();
        spec.zone_grid.cols = g.at("cols").get<int>();
        spec.zone_grid.unit_rate_min = g.value("unit_rate_min", 50.0);
        spec.zone_grid.unit_rate_max = g.value("unit_rate_max", spec.zone_grid.unit_rate_min);
        if (g.contains("unit_rates")) spec.zone_grid.unit_rates = g.at("unit_rates").get<std::map<std::string, double>>();
        for (const auto& a : j.at("origins")) spec.origins.push_back(airport_from_json(a));
        for (const auto& a : j.at("destinations")) spec.destinations.push_back(airport_from_json(a));
        for (const auto& c : j.at("corridors")) {
            SynthSpec::Corridor corridor;
            for (const auto& w : c.at("waypoints")) corridor.waypoints.push_back(point_from_json(w));
            corridor.jitter_km = c.value("jitter_km", 10.0);
            corridor.regulated_rate = c.value("regulated_rate", 0.0);
            spec.corridors.push_back(std::move(corridor));
        }
        for (const auto& a : j.at("airlines")) {
            SynthSpec::Airline airline;
            airline.code = a.at("code").get<std::string>();
            airline.mtow = a.value("mtow", 78.0);
            if (a.contains("cask")) airline.cask = a.at("cask").get<double>();
            airline.weight = a.value("weight", 1.0);
            if (a.contains("route_weights")) airline.route_weights = a.at("route_weights").get<std::vector<double>>();
            if (a.contains("betas")) airline.betas = a.at("betas").get<std::array<double, 3>>();
            spec.airlines.push_back(std::move(airline));
        }
        for (const auto& p : j.at("periods")) {
            SynthSpec::Period period;
            period.airac = p.at("airac").get<std::string>();
            period.flights = p.at("flights").get<std::size_t>();
            if (p.contains("rate_factors")) {
                for (const auto& [zone, f] : p.at("rate_factors").items()) period.rate_factors[zone] = f.get<double>();
            }
            if (p.contains("regulated_rates")) {
                for (const auto& [c, r] : p.at("regulated_rates").items()) {
                    period.regulated_rates[std::stoul(c)] = r.get<double>();
                }
            }
            spec.periods.push_back(std::move(period));
        }
        if (j.contains("arrival_bumps")) {
            for (const auto& b : j.at("arrival_bumps")) {
                spec.arrival_bumps.push_back(
                    {b.at("mean").get<double>(), b.value("sd", 1.0), b.value("weight", 1.0)});
            }
        }
        spec.noise_share = j.value("noise_share", 0.0);
        if (j.contains("noise_box")) {
            const auto& b = j.at("noise_box");
            spec.noise_box = SynthSpec::NoiseBox{b.at("lat_min").get<double>(), b.at("lat_max").get<double>(),
                                                 b.at("lon_min").get<double>(), b.at("lon_max").get<double>()};
        }
        spec.noise_regulated_rate = j.value("noise_regulated_rate", 0.1);
        spec.base_period = j.value("base_period", std::string{});
        if (j.contains("airac_epoch")) spec.airac_epoch = parse_date(j.at("airac_epoch").get<std::string>());
        spec.cruise_speed_kt = j.value("cruise_speed_kt", 450.0);
        spec.point_spacing_km = j.value("point_spacing_km", 40.0);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("synthetic spec: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

ChargingZoneSet synth_zones(const SynthSpec& spec, std::uint64_t seed) {
    Rng rng(seed ^ 0x5a5a5a5aULL);
    const auto& g = spec.zone_grid;
    const double dlat = (g.lat_max - g.lat_min) / g.rows;
    const double dlon = (g.lon_max - g.lon_min) / g.cols;
    std::vector<ChargingZone> zones;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            ChargingZone z;
            z.id = zone_id(r, c);
            const double la0 = g.lat_min + r * dlat, la1 = la0 + dlat;
            const double lo0 = g.lon_min + c * dlon, lo1 = lo0 + dlon;
            z.rings.push_back({{la0, lo0}, {la0, lo1}, {la1, lo1}, {la1, lo0}, {la0, lo0}});
            // Always draw so that fixing one zone leaves the others unchanged.
            double base = round_to(rng.uniform(g.unit_rate_min, g.unit_rate_max), 100.0);
            if (auto it = g.unit_rates.find(z.id); it != g.unit_rates.end()) base = it->second;
            for (const auto& p : spec.periods) {
                z.unit_rates[p.airac] = round_to(base * period_rate_factor(p, z.id), 100.0);
            }
            zones.push_back(std::move(z));
        }
    }
    return ChargingZoneSet(std::move(zones));
}

std::vector<double> corridor_choice_probabilities(const SynthSpec& spec, const ChargingZoneSet& zones,
                                                  std::size_t airline, const std::string& period) {
    const std::string base = spec.base_period.empty() ? spec.periods.front().airac : spec.base_period;
    const std::size_t n = spec.corridors.size();
    std::vector<double> length(n), base_charges(n), charges(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto path = nominal_path(spec, i);
        const auto profile = zone_distance_profile(std::span<const GeoPoint>(path), zones);
        length[i] = profile.total_km;
        base_charges[i] = route_charges(profile, zones, base, 1.0).total;
        charges[i] = route_charges(profile, zones, period, 1.0).total;
    }
    auto scaler = [](const std::vector<double>& ref) {
        const auto [lo, hi] = std::minmax_element(ref.begin(), ref.end());
        const double min = *lo, range = *hi - *lo;
        return [min, range](double v) { return range > 0.0 ? 2.0 * (v - min) / range - 1.0 : 0.0; };
    };
    const auto len_x = scaler(length);
    const auto chg_x = scaler(base_charges);
    const auto& a = spec.airlines.at(airline);
    const auto& p = find_period(spec, period);
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = a.betas[0] * len_x(length[i]) + a.betas[1] * chg_x(charges[i]) +
               a.betas[2] * regulated_rate(spec, p, i);
    }
    const double umax = *std::max_element(u.begin(), u.end());
    std::vector<double> prob(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = a.route_weights.empty() ? 1.0 : a.route_weights[i];
        prob[i] = w * std::exp(u[i] - umax);
        total += prob[i];
    }
    if (total <= 0.0) throw InvalidInput("airline " + a.code + " has zero weight on every corridor");
    for (double& v : prob) v /= total;
    return prob;
}

SynthOutput synth_generate(const SynthSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    SynthOutput out;
    out.zones = synth_zones(spec, seed);
    std::map<std::string, double> cask;
    for (const auto& a : spec.airlines) {
        if (a.cask) cask[a.code] = *a.cask;
    }
    out.cask = CaskTable(std::move(cask));

    SynthSpec::NoiseBox box;
    if (spec.noise_box) {
        box = *spec.noise_box;
    } else {
        box = {90.0, -90.0, 180.0, -180.0};
        for (const auto& c : spec.corridors) {
            for (const auto& w : c.waypoints) {
                box.lat_min = std::min(box.lat_min, w.lat);
                box.lat_max = std::max(box.lat_max, w.lat);
                box.lon_min = std::min(box.lon_min, w.lon);
                box.lon_max = std::max(box.lon_max, w.lon);
            }
        }
    }

    const AiracCalendar calendar(spec.airac_epoch);
    std::vector<double> airline_weights;
    for (const auto& a : spec.airlines) airline_weights.push_back(a.weight);

    Rng rng(seed);
    for (const auto& period : spec.periods) {
        const AiracCycle cycle = calendar.cycle(period.airac);
        std::vector<std::vector<double>> probs;
        for (std::size_t a = 0; a < spec.airlines.size(); ++a) {
            probs.push_back(corridor_choice_probabilities(spec, out.zones, a, period.airac));
        }
        for (std::size_t k = 0; k < period.flights; ++k) {
            const std::size_t a = draw_weighted(airline_weights, rng);
            const auto& airline = spec.airlines[a];
            const auto& origin = spec.origins[rng.index(spec.origins.size())];
            const auto& dest = spec.destinations[rng.index(spec.destinations.size())];
            const auto day = static_cast<long long>(k * AiracCalendar::kCycleDays / period.flights);
            const Date date = cycle.start + std::chrono::days{day};
            const double hour = draw_arrival_hour(spec, rng);

            int label = -1;
            std::vector<GeoPoint> waypoints;
            bool regulated = false;
            if (rng.bernoulli(spec.noise_share)) {
                const GeoPoint w1{rng.uniform(box.lat_min, box.lat_max), rng.uniform(box.lon_min, box.lon_max)};
                const GeoPoint w2{rng.uniform(box.lat_min, box.lat_max), rng.uniform(box.lon_min, box.lon_max)};
                const bool w1_first = great_circle_km(origin.location, w1) <= great_circle_km(origin.location, w2);
                waypoints = {origin.location, w1_first ? w1 : w2, w1_first ? w2 : w1, dest.location};
                regulated = rng.bernoulli(spec.noise_regulated_rate);
            } else {
                const std::size_t c = draw_weighted(probs[a], rng);
                label = static_cast<int>(c);
                waypoints = jittered_waypoints(spec, spec.corridors[c].waypoints, origin.location, dest.location,
                                               spec.corridors[c].jitter_km, rng);
                regulated = rng.bernoulli(regulated_rate(spec, period, c));
            }

            FlightRecord f;
            char id[64];
            std::snprintf(id, sizeof id, "%s%s-%05zu", airline.code.c_str(), period.airac.c_str(), k);
            f.flight_id = id;
            f.airline = airline.code;
            f.aircraft_mtow = airline.mtow;
            f.origin = origin.code;
            f.destination = dest.code;
            f.date = date;
            f.arrival_time = round_to(std::fmod(hour, 24.0), 1e4);
            f.regulated = regulated;
            const double arrival_epoch =
                static_cast<double>(std::chrono::sys_seconds{date}.time_since_epoch().count()) + hour * 3600.0;
            f.trajectory = build_trajectory(waypoints, spec, arrival_epoch);
            out.labels.emplace_back(f.flight_id, label);
            out.flights.push_back(std::move(f));
        }
    }
    return out;
}

}  // namespace routechoice
