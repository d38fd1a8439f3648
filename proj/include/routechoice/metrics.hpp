#pragma once

#include <span>

namespace routechoice {

// Sample Pearson correlation. Throws UndefinedMetric when either vector has
// zero variance, InvalidInput on length mismatch or fewer than 2 entries.
double pearson(std::span<const double> actual, std::span<const double> predicted);

// Euclidean norm of predicted - actual.
double norm_of_error(std::span<const double> actual, std::span<const double> predicted);

}  // namespace routechoice
