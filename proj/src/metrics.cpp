#include "routechoice/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "routechoice/error.hpp"

namespace routechoice {

double pearson(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw InvalidInput("pearson: length mismatch");
    if (actual.size() < 2) throw InvalidInput("pearson: need at least two values");
    const double n = static_cast<double>(actual.size());
    double ma = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        ma += actual[i];
        mp += predicted[i];
    }
    ma /= n;
    mp /= n;
    double saa = 0.0, spp = 0.0, sap = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double da = actual[i] - ma, dp = predicted[i] - mp;
        saa += da * da;
        spp += dp * dp;
        sap += da * dp;
    }
    if (saa <= 0.0 || spp <= 0.0) throw UndefinedMetric("pearson: zero variance");
    return std::clamp(sap / std::sqrt(saa * spp), -1.0, 1.0);
}

double norm_of_error(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size()) throw InvalidInput("norm_of_error: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) s += (predicted[i] - actual[i]) * (predicted[i] - actual[i]);
    return std::sqrt(s);
}

}  // namespace routechoice
