#include "routechoice/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "routechoice/error.hpp"
#include "routechoice/log.hpp"
#include "routechoice/random.hpp"

namespace routechoice {

double wrap_hour(double hour) {
    double h = std::fmod(hour, 24.0);
    if (h < 0.0) h += 24.0;
    if (h < kDayAnchorHour) h += 24.0;
    return h;
}

std::size_t TimeClassModel::classify(double hour) const {
    const double h = wrap_hour(hour);
    std::size_t best = 0;
    double best_d = std::abs(h - centroids[0]);
    for (std::size_t k = 1; k < kTimeClasses; ++k) {
        const double d = std::abs(h - centroids[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

namespace {

std::size_t nearest(const std::array<double, kTimeClasses>& c, double v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < kTimeClasses; ++k) {
        if (std::abs(v - c[k]) < std::abs(v - c[best])) best = k;
    }
    return best;
}

void finish(TimeClassModel& m) {
    std::sort(m.centroids.begin(), m.centroids.end());
    for (std::size_t k = 0; k + 1 < kTimeClasses; ++k) {
        m.boundaries[k] = 0.5 * (m.centroids[k] + m.centroids[k + 1]);
    }
}

TimeClassModel quantile_split(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    TimeClassModel m;
    m.degenerate = true;
    for (std::size_t k = 0; k < kTimeClasses; ++k) {
        const double q = (static_cast<double>(k) + 0.5) / kTimeClasses;
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(values.size()));
        m.centroids[k] = values[std::min(idx, values.size() - 1)];
    }
    finish(m);
    return m;
}

}  // namespace

TimeClassModel fit_time_classes(std::span<const double> arrival_hours, std::uint64_t seed) {
    if (arrival_hours.empty()) throw InsufficientData("no arrival times to segment");
    std::vector<double> x;
    x.reserve(arrival_hours.size());
    for (double h : arrival_hours) {
        if (!std::isfinite(h)) throw InvalidInput("non-finite arrival time");
        x.push_back(wrap_hour(h));
    }
    const std::set<double> distinct(x.begin(), x.end());
    if (distinct.size() < kTimeClasses) {
        warn("fewer than 4 distinct arrival times; using a quantile split");
        return quantile_split(std::move(x));
    }

    // k-means++ seeding
    Rng rng(seed);
    TimeClassModel m;
    m.centroids[0] = x[rng.index(x.size())];
    std::vector<double> d2(x.size());
    for (std::size_t k = 1; k < kTimeClasses; ++k) {
        double total = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) best = std::min(best, (x[i] - m.centroids[c]) * (x[i] - m.centroids[c]));
            d2[i] = best;
            total += best;
        }
        double u = rng.uniform() * total;
        std::size_t pick = x.size() - 1;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (u < d2[i]) {
                pick = i;
                break;
            }
            u -= d2[i];
        }
        m.centroids[k] = x[pick];
    }

    std::vector<std::size_t> assign(x.size(), kTimeClasses);
    for (int iter = 0; iter < 300; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const std::size_t a = nearest(m.centroids, x[i]);
            if (a != assign[i]) {
                assign[i] = a;
                changed = true;
            }
        }
        if (!changed) break;
        std::array<double, kTimeClasses> sum{};
        std::array<std::size_t, kTimeClasses> count{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            sum[assign[i]] += x[i];
            ++count[assign[i]];
        }
        for (std::size_t k = 0; k < kTimeClasses; ++k) {
            // an emptied cluster keeps its centroid
            if (count[k] > 0) m.centroids[k] = sum[k] / static_cast<double>(count[k]);
        }
    }
    finish(m);
    return m;
}

TimeGroup time_group(std::size_t time_class) {
    if (time_class == 0) return TimeGroup::early;
    if (time_class + 1 >= kTimeClasses) return TimeGroup::late;
    return TimeGroup::midday;
}

const char* time_group_name(TimeGroup g) {
    switch (g) {
        case TimeGroup::early: return "early";
        case TimeGroup::midday: return "midday";
        case TimeGroup::late: return "late";
    }
    return "?";
}

std::size_t AirlineClassModel::nearest_cask_class(double cask) const {
    if (class_cask.empty()) throw InvalidInput("airline segmentation has no classes");
    std::size_t best = 0;
    for (std::size_t c = 1; c < class_cask.size(); ++c) {
        if (std::abs(cask - class_cask[c]) < std::abs(cask - class_cask[best])) best = c;
    }
    return best;
}

std::size_t AirlineClassModel::classify(const std::string& airline, const CaskTable& cask) const {
    auto it = airline_class.find(airline);
    if (it != airline_class.end()) return it->second;
    return nearest_cask_class(cask.lookup_or_default(airline));
}

AirlineClassModel fit_airline_classes(std::span<const std::string> airlines, const CaskTable& cask) {
    const std::set<std::string> unique(airlines.begin(), airlines.end());
    AirlineClassModel m;
    std::vector<std::string> unknown;
    for (const auto& a : unique) {
        if (auto c = cask.find(a)) {
            m.airline_class[a] = m.class_cask.size();
            m.class_cask.push_back(*c);
            m.class_label.push_back(a);
        } else {
            unknown.push_back(a);
        }
    }
    if (!unknown.empty()) {
        const std::size_t shared = m.class_cask.size();
        for (const auto& a : unknown) m.airline_class[a] = shared;
        m.class_cask.push_back(kDefaultCask);
        m.class_label.push_back("UNKNOWN");
    }
    return m;
}

SegmentKey Segmentation::assign(const FlightRecord& flight) const {
    return SegmentKey{airlines.classify(flight.airline, cask), time.classify(flight.arrival_time)};
}

Segmentation fit_segmentation(std::span<const FlightRecord> training, const CaskTable& cask, std::uint64_t seed) {
    std::vector<double> hours;
    std::vector<std::string> airlines;
    for (const auto& f : training) {
        hours.push_back(f.arrival_time);
        airlines.push_back(f.airline);
    }
    Segmentation s;
    s.time = fit_time_classes(hours, seed);
    s.airlines = fit_airline_classes(airlines, cask);
    s.cask = cask;
    return s;
}

}  // namespace routechoice
