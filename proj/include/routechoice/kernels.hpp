#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "routechoice/features.hpp"
#include "routechoice/zones.hpp"

namespace routechoice::kernels {

struct NearestHit {
    std::size_t index = std::numeric_limits<std::size_t>::max();  // max() when nothing eligible
    double distance = std::numeric_limits<double>::infinity();
};

// Each kernel exists twice: `serial` is the reference, `omp` distributes the
// outer loop across threads. Every output slot is written by exactly one
// iteration in the same arithmetic order, so both produce identical bits.
namespace serial {

// For each row, the ascending indices of rows within Euclidean distance eps (self included).
std::vector<std::vector<std::size_t>> region_queries(const FeatureMatrix& x, double eps);

// Silhouette value per sample; labels < 0 are skipped and get NaN.
// n_clusters = 1 + max label. Singletons score 0.
std::vector<double> silhouette_values(const FeatureMatrix& x, std::span<const int> labels, int n_clusters);

// Nearest eligible reference row for each query; ties go to the lower index.
std::vector<NearestHit> nearest_rows(const FeatureMatrix& reference, std::span<const char> eligible,
                                     const FeatureMatrix& queries);

std::vector<ZoneDistanceProfile> zone_profiles(std::span<const std::vector<GeoPoint>> paths,
                                               const ChargingZoneSet& zones);

}  // namespace serial

namespace omp {

std::vector<std::vector<std::size_t>> region_queries(const FeatureMatrix& x, double eps);
std::vector<double> silhouette_values(const FeatureMatrix& x, std::span<const int> labels, int n_clusters);
std::vector<NearestHit> nearest_rows(const FeatureMatrix& reference, std::span<const char> eligible,
                                     const FeatureMatrix& queries);
std::vector<ZoneDistanceProfile> zone_profiles(std::span<const std::vector<GeoPoint>> paths,
                                               const ChargingZoneSet& zones);

}  // namespace omp

// Thread count for omp kernels; <= 0 restores the runtime default.
void set_thread_count(int n);
int thread_count();
bool openmp_enabled();

}  // namespace routechoice::kernels
