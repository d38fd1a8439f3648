#include "routechoice/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "routechoice/error.hpp"
#include "routechoice/io.hpp"
#include "routechoice/log.hpp"
#include "routechoice/random.hpp"

namespace routechoice {

using nlohmann::json;

namespace {

bool is_airport_code(const std::string& code) {
    return code.size() == 4 &&
           std::all_of(code.begin(), code.end(), [](unsigned char c) { return std::isupper(c) || std::isdigit(c); });
}

FlightRecord flight_from_json(const json& j) {
    FlightRecord f;
    f.flight_id = j.at("flight_id").get<std::string>();
    f.airline = j.at("airline").get<std::string>();
    f.aircraft_mtow = j.at("aircraft_mtow").get<double>();
    f.origin = j.at("origin").get<std::string>();
    f.destination = j.at("destination").get<std::string>();
    f.date = parse_date(j.at("date").get<std::string>());
    f.arrival_time = j.at("arrival_time").get<double>();
    f.regulated = j.at("regulated").get<bool>();
    for (const auto& p : j.at("trajectory")) {
        if (!p.is_array() || p.size() != 4) {
            throw InvalidInput("trajectory points must be [lat, lon, altitude_ft, time_s]");
        }
        f.trajectory.push_back(TrajectoryPoint{GeoPoint{p[0].get<double>(), p[1].get<double>()},
                                               p[2].get<double>(), p[3].get<double>()});
    }
    return f;
}

}  // namespace

void validate_flight(const FlightRecord& f) {
    if (f.flight_id.empty()) throw InvalidInput("empty flight_id");
    if (f.airline.empty()) throw InvalidInput("empty airline");
    if (!std::isfinite(f.aircraft_mtow) || f.aircraft_mtow <= 0.0) {
        throw InvalidInput("aircraft_mtow must be positive");
    }
    if (!is_airport_code(f.origin)) throw InvalidInput("bad origin airport code '" + f.origin + "'");
    if (!is_airport_code(f.destination)) {
        throw InvalidInput("bad destination airport code '" + f.destination + "'");
    }
    if (!std::isfinite(f.arrival_time)) throw InvalidInput("arrival_time must be finite");
    validate_trajectory(f.trajectory);
}

std::vector<FlightRecord> parse_flights(const std::string& text, const std::string& source) {
    std::vector<FlightRecord> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        try {
            FlightRecord f = flight_from_json(json::parse(line));
            validate_flight(f);
            out.push_back(std::move(f));
        } catch (const json::exception& e) {
            throw DataError(where + e.what());
        } catch (const InvalidInput& e) {
            throw DataError(where + e.what());
        }
    }
    if (out.empty()) warn(source + ": no flights");
    return out;
}

std::vector<FlightRecord> load_flights(const std::filesystem::path& path) {
    return parse_flights(read_text_file(path), path.string());
}

std::string flight_to_json_line(const FlightRecord& f) {
    json traj = json::array();
    for (const auto& p : f.trajectory) {
        traj.push_back({p.position.lat, p.position.lon, p.altitude_ft, p.time_s});
    }
    // ordered_json keeps the documented field order in files.
    nlohmann::ordered_json j;
    j["flight_id"] = f.flight_id;
    j["airline"] = f.airline;
    j["aircraft_mtow"] = f.aircraft_mtow;
    j["origin"] = f.origin;
    j["destination"] = f.destination;
    j["date"] = format_date(f.date);
    j["arrival_time"] = f.arrival_time;
    j["regulated"] = f.regulated;
    j["trajectory"] = traj;
    return j.dump();
}

std::string flights_to_jsonl(std::span<const FlightRecord> flights) {
    std::string out;
    for (const auto& f : flights) {
        out += flight_to_json_line(f);
        out += '\n';
    }
    return out;
}

CaskTable::CaskTable(std::map<std::string, double> entries) : entries_(std::move(entries)) {
    for (const auto& [airline, cask] : entries_) {
        if (!std::isfinite(cask) || cask <= 0.0) throw InvalidInput("CASK for " + airline + " must be positive");
    }
}

std::optional<double> CaskTable::find(const std::string& airline) const {
    auto it = entries_.find(airline);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

CaskTable parse_cask(const std::string& text, const std::string& source) {
    std::map<std::string, double> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (line_no == 1 && !fields.empty() && fields[0] == "airline") continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (fields.size() != 2 || fields[0].empty()) throw DataError(where + "expected airline,cask_eur");
        double v = 0.0;
        try {
            std::size_t used = 0;
            v = std::stod(fields[1], &used);
            if (used != fields[1].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw DataError(where + "invalid CASK '" + fields[1] + "'");
        }
        if (!std::isfinite(v) || v <= 0.0) throw DataError(where + "CASK must be positive");
        entries[fields[0]] = v;
    }
    return CaskTable(std::move(entries));
}

CaskTable load_cask(const std::filesystem::path& path) { return parse_cask(read_text_file(path), path.string()); }

std::string cask_to_csv(const CaskTable& table) {
    std::string out = "airline,cask_eur\n";
    for (const auto& [airline, cask] : table.entries()) out += airline + "," + format_fixed(cask, 4) + "\n";
    return out;
}

std::vector<std::size_t> split_indices(std::size_t n, double ratio, std::uint64_t seed) {
    if (!(ratio > 0.0 && ratio < 1.0)) throw InvalidInput("split ratio must be in (0, 1)");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.index(i)]);
    }
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n) + 0.5));
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(train.begin(), train.end());
    return train;
}

std::pair<std::vector<FlightRecord>, std::vector<FlightRecord>> split_train_validation(
    std::span<const FlightRecord> flights, double ratio, std::uint64_t seed) {
    const auto train_idx = split_indices(flights.size(), ratio, seed);
    std::vector<bool> is_train(flights.size(), false);
    for (auto i : train_idx) is_train[i] = true;
    std::pair<std::vector<FlightRecord>, std::vector<FlightRecord>> out;
    for (std::size_t i = 0; i < flights.size(); ++i) {
        (is_train[i] ? out.first : out.second).push_back(flights[i]);
    }
    return out;
}

std::string labels_to_csv(const std::vector<std::pair<std::string, int>>& labels) {
    std::string out = "flight_id,corridor\n";
    for (const auto& [id, c] : labels) out += id + "," + std::to_string(c) + "\n";
    return out;
}

std::map<std::string, int> parse_labels(const std::string& text) {
    std::map<std::string, int> out;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (first && fields[0] == "flight_id") {
            first = false;
            continue;
        }
        first = false;
        if (fields.size() != 2) throw DataError("labels: expected flight_id,corridor");
        out[fields[0]] = std::stoi(fields[1]);
    }
    return out;
}

}  // namespace routechoice
