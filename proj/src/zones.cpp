#include "routechoice/zones.hpp"

#include <cmath>

#include "json.hpp"
#include "routechoice/error.hpp"
#include "routechoice/io.hpp"

namespace routechoice {

using nlohmann::json;

bool ChargingZone::contains(const GeoPoint& p) const { return point_in_rings(p, rings); }

double ChargingZone::unit_rate(const std::string& period) const {
    auto it = unit_rates.find(period);
    if (it == unit_rates.end()) {
        throw ConfigError("zone " + id + " has no unit rate for period " + period);
    }
    return it->second;
}

ChargingZoneSet::ChargingZoneSet(std::vector<ChargingZone> zones) : zones_(std::move(zones)) {
    for (const auto& z : zones_) {
        if (z.id.empty()) throw InvalidInput("zone with empty id");
        if (z.rings.empty()) throw InvalidInput("zone " + z.id + " has no polygon");
        for (const auto& ring : z.rings) {
            if (ring.size() < 4 || !(ring.front() == ring.back())) {
                throw InvalidInput("zone " + z.id + ": ring is not closed");
            }
            for (const auto& p : ring) validate_point(p);
        }
        for (const auto& [period, rate] : z.unit_rates) {
            if (!std::isfinite(rate) || rate <= 0.0) {
                throw InvalidInput("zone " + z.id + ": unit rate for " + period + " must be positive");
            }
        }
    }
}

std::optional<std::size_t> ChargingZoneSet::locate(const GeoPoint& p) const {
    for (std::size_t i = 0; i < zones_.size(); ++i) {
        if (zones_[i].contains(p)) return i;
    }
    return std::nullopt;
}

std::optional<std::size_t> ChargingZoneSet::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < zones_.size(); ++i) {
        if (zones_[i].id == id) return i;
    }
    return std::nullopt;
}

std::vector<double> ZoneDistanceProfile::as_vector(const ChargingZoneSet& zones) const {
    std::vector<double> out(zones.size(), 0.0);
    for (std::size_t i = 0; i < zones.size(); ++i) {
        auto it = km_by_zone.find(zones[i].id);
        if (it != km_by_zone.end()) out[i] = it->second;
    }
    return out;
}

ZoneDistanceProfile zone_distance_profile(std::span<const GeoPoint> path, const ChargingZoneSet& zones,
                                          double max_segment_km) {
    if (path.size() < 2) {
        throw InvalidInput("trajectory needs at least 2 points");
    }
    std::vector<double> per_zone(zones.size(), 0.0);
    ZoneDistanceProfile profile;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const GeoPoint& a = path[i - 1];
        const GeoPoint& b = path[i];
        const double len = great_circle_km(a, b);
        if (len <= 0.0) continue;
        const auto pieces = static_cast<std::size_t>(std::max(1.0, std::ceil(len / max_segment_km)));
        const double piece_len = len / static_cast<double>(pieces);
        for (std::size_t k = 0; k < pieces; ++k) {
            const double f = (static_cast<double>(k) + 0.5) / static_cast<double>(pieces);
            if (auto z = zones.locate(interpolate(a, b, f))) per_zone[*z] += piece_len;
        }
        profile.total_km += len;
    }
    for (std::size_t z = 0; z < zones.size(); ++z) {
        if (per_zone[z] > 0.0) profile.km_by_zone[zones[z].id] += per_zone[z];
    }
    profile.orthodrome_km = great_circle_km(path.front(), path.back());
    return profile;
}

ZoneDistanceProfile zone_distance_profile(std::span<const TrajectoryPoint> trajectory,
                                          const ChargingZoneSet& zones, double max_segment_km) {
    std::vector<GeoPoint> path;
    path.reserve(trajectory.size());
    for (const auto& p : trajectory) path.push_back(p.position);
    return zone_distance_profile(std::span<const GeoPoint>(path), zones, max_segment_km);
}

ChargeBreakdown route_charges(const ZoneDistanceProfile& profile, const ChargingZoneSet& zones,
                              const std::string& period, double wf) {
    if (!std::isfinite(wf) || wf <= 0.0) throw InvalidInput("weight factor must be positive");
    ChargeBreakdown out;
    out.weight_factor = wf;
    for (const auto& [id, km] : profile.km_by_zone) {
        auto idx = zones.index_of(id);
        if (!idx) throw ConfigError("zone " + id + " is not defined in the zone set");
        const double rate = zones[*idx].unit_rate(period);
        const double df = km / 100.0;
        const double charge = rate * df * wf;
        out.distance_factor[id] = df;
        out.charge_by_zone[id] = charge;
        out.total += charge;
    }
    return out;
}

namespace {

std::vector<GeoPoint> parse_ring(const json& ring) {
    std::vector<GeoPoint> out;
    for (const auto& c : ring) {
        if (!c.is_array() || c.size() < 2) throw DataError("zones: coordinate must be [lon, lat]");
        out.push_back(GeoPoint{c[1].get<double>(), c[0].get<double>()});
    }
    return out;
}

}  // namespace

ChargingZoneSet parse_zones(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("zones: invalid JSON: ") + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features")) {
        throw DataError("zones: expected a FeatureCollection");
    }
    std::vector<ChargingZone> zones;
    try {
        for (const auto& f : doc.at("features")) {
            ChargingZone z;
            const auto& props = f.at("properties");
            z.id = props.at("id").get<std::string>();
            for (const auto& [period, rate] : props.at("unit_rates").items()) {
                z.unit_rates[period] = rate.get<double>();
            }
            const auto& geom = f.at("geometry");
            const auto type = geom.at("type").get<std::string>();
            if (type == "Polygon") {
                for (const auto& ring : geom.at("coordinates")) z.rings.push_back(parse_ring(ring));
            } else if (type == "MultiPolygon") {
                for (const auto& poly : geom.at("coordinates")) {
                    for (const auto& ring : poly) z.rings.push_back(parse_ring(ring));
                }
            } else {
                throw DataError("zones: unsupported geometry type " + type);
            }
            zones.push_back(std::move(z));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("zones: ") + e.what());
    }
    try {
        return ChargingZoneSet(std::move(zones));
    } catch (const InvalidInput& e) {
        throw DataError(std::string("zones: ") + e.what());
    }
}

ChargingZoneSet load_zones(const std::filesystem::path& path) { return parse_zones(read_text_file(path)); }

std::string zones_to_json(const ChargingZoneSet& zones) {
    json features = json::array();
    for (const auto& z : zones.zones()) {
        json rings = json::array();
        for (const auto& ring : z.rings) {
            json coords = json::array();
            for (const auto& p : ring) coords.push_back({p.lon, p.lat});
            rings.push_back(std::move(coords));
        }
        json rates = json::object();
        for (const auto& [period, rate] : z.unit_rates) rates[period] = rate;
        features.push_back({{"type", "Feature"},
                            {"properties", {{"id", z.id}, {"unit_rates", rates}}},
                            {"geometry", {{"type", "Polygon"}, {"coordinates", rings}}}});
    }
    json doc{{"type", "FeatureCollection"}, {"features", features}};
    return doc.dump(1) + "\n";
}

}  // namespace routechoice
