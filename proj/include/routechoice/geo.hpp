#pragma once

#include <span>
#include <vector>

namespace routechoice {

inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kKmPerNauticalMile = 1.852;

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, (-180, 180]

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

struct TrajectoryPoint {
    GeoPoint position;
    double altitude_ft = 0.0;
    double time_s = 0.0;  // seconds since epoch

    friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

// Ordered 4-D track. Validity (>= 2 points, non-decreasing times) is checked
// by validate_trajectory rather than enforced on construction so that loaders
// can report the offending line.
using Trajectory = std::vector<TrajectoryPoint>;

// Throws InvalidInput if the point has non-finite fields or latitude out of range.
void validate_point(const GeoPoint& p);
void validate_trajectory(std::span<const TrajectoryPoint> t);

// Haversine distance on a sphere.
double great_circle_km(const GeoPoint& a, const GeoPoint& b, double radius_km = kEarthRadiusKm);

// Point at fraction f in [0, 1] along the great circle from a to b.
GeoPoint interpolate(const GeoPoint& a, const GeoPoint& b, double f);

// Initial bearing from a to b, degrees clockwise from north.
double initial_bearing_deg(const GeoPoint& a, const GeoPoint& b);

// Point reached from p after dist_km along the given initial bearing.
GeoPoint destination_point(const GeoPoint& p, double bearing_deg, double dist_km,
                           double radius_km = kEarthRadiusKm);

// Polyline length along great circles.
double path_length_km(std::span<const GeoPoint> points, double radius_km = kEarthRadiusKm);

// WF = sqrt(MTOW / 50), MTOW in metric tonnes.
double weight_factor(double mtow_tonnes);

// Even-odd rule in the lon/lat plane. Rings may be open or closed.
bool point_in_rings(const GeoPoint& p, std::span<const std::vector<GeoPoint>> rings);

}  // namespace routechoice
