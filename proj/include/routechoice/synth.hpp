#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "routechoice/airac.hpp"
#include "routechoice/dataset.hpp"
#include "routechoice/geo.hpp"
#include "routechoice/zones.hpp"

namespace routechoice {

// Declarative description of a synthetic OD-pair dataset standing in for
// restricted flight-plan archives. See README for the JSON layout.
struct SynthSpec {
    struct ZoneGrid {
        double lat_min = 0.0, lat_max = 0.0, lon_min = 0.0, lon_max = 0.0;
        int rows = 1, cols = 1;
        double unit_rate_min = 50.0, unit_rate_max = 50.0;
        std::map<std::string, double> unit_rates;  // zone id -> fixed base rate, overrides the draw
    };
    struct Airport {
        std::string code;
        GeoPoint location;
    };
    struct Corridor {
        std::vector<GeoPoint> waypoints;  // interior waypoints between origin and destination
        double jitter_km = 10.0;  // sd of the per-flight lateral offset
        double regulated_rate = 0.0;
    };
    struct Airline {
        std::string code;
        double mtow = 78.0;
        std::optional<double> cask;  // omitted from cask.csv when unset
        double weight = 1.0;
        std::vector<double> route_weights;  // per corridor; empty = all 1
        std::array<double, 3> betas{0.0, 0.0, 0.0};  // length, charges, congestion
    };
    struct Period {
        std::string airac;
        std::size_t flights = 0;
        std::map<std::string, double> rate_factors;  // zone id -> multiplier on base rate
        std::map<std::size_t, double> regulated_rates;  // corridor -> override
    };
    struct ArrivalBump {
        double mean = 12.0, sd = 1.0, weight = 1.0;  // hours, on the [4, 28) axis
    };
    struct NoiseBox {
        double lat_min = 0.0, lat_max = 0.0, lon_min = 0.0, lon_max = 0.0;
    };

    ZoneGrid zone_grid;
    std::vector<Airport> origins;
    std::vector<Airport> destinations;
    std::vector<Corridor> corridors;
    std::vector<Airline> airlines;
    std::vector<Period> periods;
    std::vector<ArrivalBump> arrival_bumps;
    double noise_share = 0.0;
    std::optional<NoiseBox> noise_box;  // defaults to the corridor waypoint envelope
    double noise_regulated_rate = 0.1;
    std::string base_period;  // reference for the ground-truth normalisation; defaults to periods[0]
    Date airac_epoch = AiracCalendar::default_epoch();
    double cruise_speed_kt = 450.0;
    double point_spacing_km = 40.0;
};

SynthSpec parse_synth_spec(const std::string& text);

struct SynthOutput {
    std::vector<FlightRecord> flights;
    ChargingZoneSet zones;
    CaskTable cask;
    std::vector<std::pair<std::string, int>> labels;  // flight_id -> corridor, -1 for noise
};

SynthOutput synth_generate(const SynthSpec& spec, std::uint64_t seed);

// Ground-truth corridor choice probabilities for an airline in a period:
// P_i ∝ w_i · exp(β · x_i) with x normalised over corridors on the base period.
std::vector<double> corridor_choice_probabilities(const SynthSpec& spec, const ChargingZoneSet& zones,
                                                  std::size_t airline, const std::string& period);

ChargingZoneSet synth_zones(const SynthSpec& spec, std::uint64_t seed);

}  // namespace routechoice
