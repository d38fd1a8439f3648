#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "routechoice/airac.hpp"
#include "routechoice/geo.hpp"

namespace routechoice {

struct FlightRecord {
    std::string flight_id;
    std::string airline;  // ICAO designator
    double aircraft_mtow = 0.0;  // tonnes
    std::string origin;
    std::string destination;
    Date date{};
    double arrival_time = 0.0;  // local hours; may exceed 24 for next-day arrivals
    bool regulated = false;
    Trajectory trajectory;

    friend bool operator==(const FlightRecord&, const FlightRecord&) = default;
};

// Throws InvalidInput describing the first violated invariant.
void validate_flight(const FlightRecord& f);

// One JSON object per line. Errors name the file and line.
std::vector<FlightRecord> parse_flights(const std::string& text, const std::string& source = "flights");
std::vector<FlightRecord> load_flights(const std::filesystem::path& path);
std::string flight_to_json_line(const FlightRecord& f);
std::string flights_to_jsonl(std::span<const FlightRecord> flights);

inline constexpr double kDefaultCask = 0.07;  // EUR per available seat-km

// airline -> CASK, from annual reports.
class CaskTable {
public:
    CaskTable() = default;
    explicit CaskTable(std::map<std::string, double> entries);

    std::optional<double> find(const std::string& airline) const;
    // Falls back to the industry average for unknown airlines.
    double lookup_or_default(const std::string& airline) const { return find(airline).value_or(kDefaultCask); }
    const std::map<std::string, double>& entries() const { return entries_; }

private:
    std::map<std::string, double> entries_;
};

CaskTable parse_cask(const std::string& text, const std::string& source = "cask");
CaskTable load_cask(const std::filesystem::path& path);
std::string cask_to_csv(const CaskTable& table);

// Seeded random partition; |train| = round-half-up(ratio * N). Input order is
// preserved within each side.
std::pair<std::vector<FlightRecord>, std::vector<FlightRecord>> split_train_validation(
    std::span<const FlightRecord> flights, double ratio, std::uint64_t seed);

// Indices selected for training by split_train_validation, ascending.
std::vector<std::size_t> split_indices(std::size_t n, double ratio, std::uint64_t seed);

// Ground-truth corridor per flight for synthetic data (-1 = injected noise).
std::string labels_to_csv(const std::vector<std::pair<std::string, int>>& labels);
std::map<std::string, int> parse_labels(const std::string& text);

}  // namespace routechoice
