#include "routechoice/kernels.hpp"

#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace routechoice::kernels {

namespace {

std::vector<std::size_t> region_query_row(const FeatureMatrix& x, std::size_t i, double eps2) {
    std::vector<std::size_t> out;
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < x.rows(); ++j) {
        if (squared_distance(xi, x.row(j)) <= eps2) out.push_back(j);
    }
    return out;
}

double silhouette_row(const FeatureMatrix& x, std::span<const int> labels, int n_clusters, std::size_t i,
                      std::span<const std::size_t> sizes) {
    const int own = labels[i];
    if (own < 0) return std::nan("");
    if (sizes[static_cast<std::size_t>(own)] <= 1) return 0.0;
    std::vector<double> sums(static_cast<std::size_t>(n_clusters), 0.0);
    const auto xi = x.row(i);
    for (std::size_t j = 0; j < x.rows(); ++j) {
        if (labels[j] < 0 || j == i) continue;
        sums[static_cast<std::size_t>(labels[j])] += std::sqrt(squared_distance(xi, x.row(j)));
    }
    const double a = sums[static_cast<std::size_t>(own)] / static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_clusters; ++c) {
        if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
        b = std::min(b, sums[static_cast<std::size_t>(c)] / static_cast<double>(sizes[static_cast<std::size_t>(c)]));
    }
    if (!std::isfinite(b)) return 0.0;
    const double denom = std::max(a, b);
    return denom > 0.0 ? (b - a) / denom : 0.0;
}

std::vector<std::size_t> cluster_sizes(std::span<const int> labels, int n_clusters) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(std::max(n_clusters, 0)), 0);
    for (int l : labels) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    return sizes;
}

NearestHit nearest_row(const FeatureMatrix& reference, std::span<const char> eligible, std::span<const double> q) {
    NearestHit hit;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < reference.rows(); ++j) {
        if (!eligible[j]) continue;
        const double d2 = squared_distance(q, reference.row(j));
        if (d2 < best) {
            best = d2;
            hit.index = j;
        }
    }
    if (hit.index != NearestHit{}.index) hit.distance = std::sqrt(best);
    return hit;
}

}  // namespace

namespace serial {

std::vector<std::vector<std::size_t>> region_queries(const FeatureMatrix& x, double eps) {
    std::vector<std::vector<std::size_t>> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = region_query_row(x, i, eps * eps);
    return out;
}

std::vector<double> silhouette_values(const FeatureMatrix& x, std::span<const int> labels, int n_clusters) {
    const auto sizes = cluster_sizes(labels, n_clusters);
    std::vector<double> out(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = silhouette_row(x, labels, n_clusters, i, sizes);
    return out;
}

std::vector<NearestHit> nearest_rows(const FeatureMatrix& reference, std::span<const char> eligible,
                                     const FeatureMatrix& queries) {
    std::vector<NearestHit> out(queries.rows());
    for (std::size_t i = 0; i < queries.rows(); ++i) out[i] = nearest_row(reference, eligible, queries.row(i));
    return out;
}

std::vector<ZoneDistanceProfile> zone_profiles(std::span<const std::vector<GeoPoint>> paths,
                                               const ChargingZoneSet& zones) {
    std::vector<ZoneDistanceProfile> out(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i) {
        out[i] = zone_distance_profile(std::span<const GeoPoint>(paths[i]), zones);
    }
    return out;
}

}  // namespace serial

namespace omp {

std::vector<std::vector<std::size_t>> region_queries(const FeatureMatrix& x, double eps) {
    std::vector<std::vector<std::size_t>> out(x.rows());
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
    const double eps2 = eps * eps;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = region_query_row(x, static_cast<std::size_t>(i), eps2);
    }
    return out;
}

std::vector<double> silhouette_values(const FeatureMatrix& x, std::span<const int> labels, int n_clusters) {
    const auto sizes = cluster_sizes(labels, n_clusters);
    std::vector<double> out(x.rows());
    const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = silhouette_row(x, labels, n_clusters, static_cast<std::size_t>(i), sizes);
    }
    return out;
}

std::vector<NearestHit> nearest_rows(const FeatureMatrix& reference, std::span<const char> eligible,
                                     const FeatureMatrix& queries) {
    std::vector<NearestHit> out(queries.rows());
    const auto n = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = nearest_row(reference, eligible, queries.row(static_cast<std::size_t>(i)));
    }
    return out;
}

std::vector<ZoneDistanceProfile> zone_profiles(std::span<const std::vector<GeoPoint>> paths,
                                               const ChargingZoneSet& zones) {
    std::vector<ZoneDistanceProfile> out(paths.size());
    std::vector<std::exception_ptr> errors(paths.size());
    const auto n = static_cast<std::ptrdiff_t>(paths.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            out[k] = zone_distance_profile(std::span<const GeoPoint>(paths[k]), zones);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    // rethrow the first failure in index order, as the serial kernel would
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace omp

namespace {
int g_default_threads = 0;
}

void set_thread_count(int n) {
#ifdef _OPENMP
    if (g_default_threads == 0) g_default_threads = omp_get_max_threads();
    omp_set_num_threads(n > 0 ? n : g_default_threads);
#else
    (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace routechoice::kernels
