#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "routechoice/geo.hpp"

namespace routechoice {

// One charging zone: polygon rings plus unit rates keyed by AIRAC period.
struct ChargingZone {
    std::string id;
    std::vector<std::vector<GeoPoint>> rings;  // each closed, first == last
    std::map<std::string, double> unit_rates;  // EUR per DF=1, WF=1

    bool contains(const GeoPoint& p) const;
    // Throws ConfigError naming the zone when no rate is published for `period`.
    double unit_rate(const std::string& period) const;
};

class ChargingZoneSet {
public:
    ChargingZoneSet() = default;
    explicit ChargingZoneSet(std::vector<ChargingZone> zones);

    std::span<const ChargingZone> zones() const { return zones_; }
    std::size_t size() const { return zones_.size(); }
    const ChargingZone& operator[](std::size_t i) const { return zones_[i]; }

    // First zone in file order containing p.
    std::optional<std::size_t> locate(const GeoPoint& p) const;
    std::optional<std::size_t> index_of(const std::string& id) const;

private:
    std::vector<ChargingZone> zones_;
};

struct ZoneDistanceProfile {
    std::map<std::string, double> km_by_zone;
    double total_km = 0.0;
    double orthodrome_km = 0.0;

    // Per-zone kilometres in zone-set order (zeros for zones not crossed).
    std::vector<double> as_vector(const ChargingZoneSet& zones) const;
};

struct ChargeBreakdown {
    std::map<std::string, double> charge_by_zone;  // EUR
    std::map<std::string, double> distance_factor;
    double weight_factor = 1.0;
    double total = 0.0;
};

inline constexpr double kMaxSegmentKm = 50.0;

// Segments longer than max_segment_km are subdivided along the great circle;
// each piece is credited to the zone containing its midpoint.
ZoneDistanceProfile zone_distance_profile(std::span<const TrajectoryPoint> trajectory,
                                          const ChargingZoneSet& zones,
                                          double max_segment_km = kMaxSegmentKm);
ZoneDistanceProfile zone_distance_profile(std::span<const GeoPoint> path, const ChargingZoneSet& zones,
                                          double max_segment_km = kMaxSegmentKm);

// C_z = UR_z * (km_z / 100) * wf. The flown kilometres inside each zone stand
// in for the entry-to-exit great-circle distance.
ChargeBreakdown route_charges(const ZoneDistanceProfile& profile, const ChargingZoneSet& zones,
                              const std::string& period, double wf);

// GeoJSON-like FeatureCollection, coordinates as [lon, lat].
ChargingZoneSet parse_zones(const std::string& text);
ChargingZoneSet load_zones(const std::filesystem::path& path);
std::string zones_to_json(const ChargingZoneSet& zones);

}  // namespace routechoice
