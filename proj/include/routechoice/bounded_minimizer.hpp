#pragma once

#include <functional>
#include <span>
#include <vector>

namespace routechoice {

struct BoxBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    std::vector<double> project(std::vector<double> x) const;
};

struct MinimizeOptions {
    std::size_t max_iterations = 500;
    double pg_tolerance = 1e-8;  // on the infinity norm of the projected gradient
    std::size_t memory = 6;  // stored correction pairs
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    double pg_norm = 0.0;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Returns f(x) and writes the gradient into `grad`.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

// Limited-memory quasi-Newton over a box. Variables held at a bound by the
// gradient are frozen for the step; the rest follow the two-loop L-BFGS
// direction restricted to the free subspace. Steps are projected onto the
// box with an Armijo backtracking search. When the quasi-Newton direction is
// not a descent direction or its line search fails, the iteration falls back
// to a projected steepest-descent step and the memory is cleared.
MinimizeResult minimize_box(const Objective& objective, std::vector<double> x0, const BoxBounds& bounds,
                            const MinimizeOptions& options = {});

}  // namespace routechoice
