#include "routechoice/geo.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "routechoice/error.hpp"

namespace routechoice {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

void validate_point(const GeoPoint& p) {
    if (!std::isfinite(p.lat) || !std::isfinite(p.lon)) {
        throw InvalidInput("non-finite coordinate");
    }
    if (p.lat < -90.0 || p.lat > 90.0) {
        throw InvalidInput("latitude out of range: " + std::to_string(p.lat));
    }
    if (p.lon < -180.0 || p.lon > 180.0) {
        throw InvalidInput("longitude out of range: " + std::to_string(p.lon));
    }
}

void validate_trajectory(std::span<const TrajectoryPoint> t) {
    if (t.size() < 2) {
        throw InvalidInput("trajectory needs at least 2 points, got " + std::to_string(t.size()));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        validate_point(t[i].position);
        if (!std::isfinite(t[i].altitude_ft) || t[i].altitude_ft < 0.0) {
            throw InvalidInput("invalid altitude at point " + std::to_string(i));
        }
        if (!std::isfinite(t[i].time_s)) {
            throw InvalidInput("non-finite time at point " + std::to_string(i));
        }
        if (i > 0 && t[i].time_s < t[i - 1].time_s) {
            throw InvalidInput("trajectory times decrease at point " + std::to_string(i));
        }
    }
}

double great_circle_km(const GeoPoint& a, const GeoPoint& b, double radius_km) {
    validate_point(a);
    validate_point(b);
    const double phi1 = a.lat * kDegToRad;
    const double phi2 = b.lat * kDegToRad;
    const double dphi = phi2 - phi1;
    const double dlambda = (b.lon - a.lon) * kDegToRad;
    const double s1 = std::sin(dphi / 2.0);
    const double s2 = std::sin(dlambda / 2.0);
    double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
    h = std::min(1.0, std::max(0.0, h));
    return 2.0 * radius_km * std::asin(std::sqrt(h));
}

GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f) {
    const double phi1 = a.lat * kDegToRad, lam1 = a.lon * kDegToRad;
    const double phi2 = b.lat * kDegToRad, lam2 = b.lon * kDegToRad;
    const double delta = great_circle_km(a, b, 1.0);
    if (delta < 1e-12) return a;
    const double sd = std::sin(delta);
    const double wa = std::sin((1.0 - f) * delta) / sd;
    const double wb = std::sin(f * delta) / sd;
    const double x = wa * std::cos(phi1) * std::cos(lam1) + wb * std::cos(phi2) * std::cos(lam2);
    const double y = wa * std::cos(phi1) * std::sin(lam1) + wb * std::cos(phi2) * std::sin(lam2);
    const double z = wa * std::sin(phi1) + wb * std::sin(phi2);
    GeoPoint out{std::atan2(z, std::sqrt(x * x + y * y)) * kRadToDeg, std::atan2(y, x) * kRadToDeg};
    if (out.lon <= -180.0) out.lon += 360.0;
    return out;
}

double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b) {
    const double phi1 = a.lat * kDegToRad, phi2 = b.lat * kDegToRad;
    const double dl = (b.lon - a.lon) * kDegToRad;
    const double y = std::sin(dl) * std::cos(phi2);
    const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dl);
    return std::atan2(y, x) * kRadToDeg;
}

GeoPoint destination_point(const GeoPoint& p, double bearing_deg, double dist_km, double radius_km) {
    const double delta = dist_km / radius_km;
    const double theta = bearing_deg * kDegToRad;
    const double phi1 = p.lat * kDegToRad, lam1 = p.lon * kDegToRad;
    const double phi2 =
        std::asin(std::sin(phi1) * std::cos(delta) + std::cos(phi1) * std::sin(delta) * std::cos(theta));
    const double lam2 = lam1 + std::atan2(std::sin(theta) * std::sin(delta) * std::cos(phi1),
                                          std::cos(delta) - std::sin(phi1) * std::sin(phi2));
    double lon = std::remainder(lam2 * kRadToDeg, 360.0);
    if (lon <= -180.0) lon += 360.0;
    return GeoPoint{phi2 * kRadToDeg, lon};
}

double path_length_km(std::span<const GeoPoint> points, double radius_km) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += great_circle_km(points[i - 1], points[i], radius_km);
    }
    return total;
}

double weight_factor(double mtow_tonnes) {
    if (!std::isfinite(mtow_tonnes) || mtow_tonnes <= 0.0) {
        throw InvalidInput("MTOW must be positive");
    }
    return std::sqrt(mtow_tonnes / 50.0);
}

bool point_in_rings(const GeoPoint& p, std::span<const std::vector<GeoPoint>> rings) {
    bool inside = false;
    for (const auto& ring : rings) {
        const std::size_t n = ring.size();
        if (n < 3) continue;
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const GeoPoint& u = ring[i];
            const GeoPoint& v = ring[j];
            if ((u.lat > p.lat) != (v.lat > p.lat)) {
                const double cross_lon = u.lon + (p.lat - u.lat) * (v.lon - u.lon) / (v.lat - u.lat);
                if (p.lon < cross_lon) inside = !inside;
            }
        }
    }
    return inside;
}

}  // namespace routechoice
