#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "routechoice/dataset.hpp"

namespace routechoice {

inline constexpr std::size_t kTimeClasses = 4;
inline constexpr double kDayAnchorHour = 4.0;

// Maps a clock hour onto [4, 28): 01:18 becomes 25.3.
double wrap_hour(double hour);

struct TimeClassModel {
    std::array<double, kTimeClasses> centroids{};  // ascending, on the wrapped axis
    std::array<double, kTimeClasses - 1> boundaries{};  // midpoints between centroids
    bool degenerate = false;  // quantile fallback was used

    std::size_t classify(double hour) const;  // nearest centroid, ties to the lower class
};

// Seeded k-means++ then Lloyd iterations (cap 300) until assignments are
// stable. With fewer than four distinct wrapped values falls back to a
// quantile split and sets `degenerate`. Throws InsufficientData when empty.
TimeClassModel fit_time_classes(std::span<const double> arrival_hours, std::uint64_t seed);

// Report groups layered over the four time classes: the two central classes
// form "midday".
enum class TimeGroup { early, midday, late };
TimeGroup time_group(std::size_t time_class);
const char* time_group_name(TimeGroup g);

// One class per airline with a known CASK; airlines without one share a
// class represented by the default CASK.
struct AirlineClassModel {
    std::map<std::string, std::size_t> airline_class;
    std::vector<double> class_cask;
    std::vector<std::string> class_label;  // airline code, or "UNKNOWN" for the shared class

    std::size_t class_count() const { return class_cask.size(); }
    // Trained airline -> its class; otherwise nearest CASK (unknown CASK -> default),
    // ties to the lower class index.
    std::size_t classify(const std::string& airline, const CaskTable& cask) const;
    std::size_t nearest_cask_class(double cask) const;
};

AirlineClassModel fit_airline_classes(std::span<const std::string> airlines, const CaskTable& cask);

struct SegmentKey {
    std::size_t airline_class = 0;
    std::size_t time_class = 0;

    std::size_t index() const { return airline_class * kTimeClasses + time_class; }
    friend bool operator==(const SegmentKey&, const SegmentKey&) = default;
};

struct Segmentation {
    TimeClassModel time;
    AirlineClassModel airlines;
    CaskTable cask;  // snapshot used for unseen airlines

    std::size_t segment_count() const { return airlines.class_count() * kTimeClasses; }
    SegmentKey assign(const FlightRecord& flight) const;
};

Segmentation fit_segmentation(std::span<const FlightRecord> training, const CaskTable& cask, std::uint64_t seed);

}  // namespace routechoice
