#include "routechoice/bounded_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "routechoice/error.hpp"

namespace routechoice {

std::vector<double> BoxBounds::project(std::vector<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
    return x;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double projected_gradient_norm(const std::vector<double>& x, const std::vector<double>& g, const BoxBounds& b) {
    double norm = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double step = std::clamp(x[i] - g[i], b.lower[i], b.upper[i]) - x[i];
        norm = std::max(norm, std::abs(step));
    }
    return norm;
}

struct Correction {
    std::vector<double> s;
    std::vector<double> y;
};

// Two-loop recursion on the free coordinates; fixed coordinates get 0.
std::vector<double> lbfgs_direction(const std::vector<double>& g, const std::deque<Correction>& memory,
                                    const std::vector<char>& free) {
    const std::size_t n = g.size();
    auto masked = [&](const std::vector<double>& v) {
        std::vector<double> out(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (free[i]) out[i] = v[i];
        }
        return out;
    };
    std::vector<double> q = masked(g);
    std::vector<double> alpha(memory.size(), 0.0);
    std::vector<double> rho(memory.size(), 0.0);
    std::vector<std::vector<double>> s(memory.size()), y(memory.size());
    for (std::size_t k = 0; k < memory.size(); ++k) {
        s[k] = masked(memory[k].s);
        y[k] = masked(memory[k].y);
        const double sy = dot(s[k], y[k]);
        rho[k] = sy > 0.0 ? 1.0 / sy : 0.0;
    }
    for (std::size_t k = memory.size(); k-- > 0;) {
        alpha[k] = rho[k] * dot(s[k], q);
        for (std::size_t i = 0; i < n; ++i) q[i] -= alpha[k] * y[k][i];
    }
    double gamma = 1.0;
    if (!memory.empty()) {
        const double yy = dot(y.back(), y.back());
        const double sy = dot(s.back(), y.back());
        if (yy > 0.0 && sy > 0.0) gamma = sy / yy;
    } else {
        double gnorm = std::sqrt(dot(q, q));
        gamma = gnorm > 1.0 ? 1.0 / gnorm : 1.0;
    }
    for (double& v : q) v *= gamma;
    for (std::size_t k = 0; k < memory.size(); ++k) {
        const double beta = rho[k] * dot(y[k], q);
        for (std::size_t i = 0; i < n; ++i) q[i] += s[k][i] * (alpha[k] - beta);
    }
    for (double& v : q) v = -v;
    return masked(q);
}

}  // namespace

MinimizeResult minimize_box(const Objective& objective, std::vector<double> x0, const BoxBounds& bounds,
                            const MinimizeOptions& options) {
    const std::size_t n = x0.size();
    if (bounds.lower.size() != n || bounds.upper.size() != n) throw InvalidInput("minimize_box: bound size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(bounds.lower[i] <= bounds.upper[i])) throw InvalidInput("minimize_box: empty box");
    }

    MinimizeResult r;
    std::vector<double> x = bounds.project(std::move(x0));
    std::vector<double> g(n, 0.0);
    double f = objective(x, g);
    ++r.evaluations;
    std::deque<Correction> memory;
    std::vector<double> x_new(n), g_new(n);

    auto line_search = [&](const std::vector<double>& d, double& f_out) -> bool {
        double step = 1.0;
        for (int attempt = 0; attempt < 40; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = std::clamp(x[i] + step * d[i], bounds.lower[i], bounds.upper[i]);
            double decrease = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) {
                decrease += g[i] * (x_new[i] - x[i]);
                moved = moved || x_new[i] != x[i];
            }
            if (!moved) return false;
            f_out = objective(x_new, g_new);
            ++r.evaluations;
            if (std::isfinite(f_out) && f_out <= f + 1e-4 * decrease) return true;
            step *= 0.5;
        }
        return false;
    };

    for (r.iterations = 0; r.iterations < options.max_iterations; ++r.iterations) {
        r.pg_norm = projected_gradient_norm(x, g, bounds);
        if (r.pg_norm < options.pg_tolerance) {
            r.converged = true;
            break;
        }
        std::vector<char> free(n, 1);
        for (std::size_t i = 0; i < n; ++i) {
            if ((x[i] <= bounds.lower[i] && g[i] > 0.0) || (x[i] >= bounds.upper[i] && g[i] < 0.0)) free[i] = 0;
        }
        std::vector<double> d = lbfgs_direction(g, memory, free);
        double f_next = f;
        bool ok = dot(d, g) < 0.0 && line_search(d, f_next);
        if (!ok) {
            memory.clear();
            d = lbfgs_direction(g, memory, free);
            ok = dot(d, g) < 0.0 && line_search(d, f_next);
        }
        if (!ok) break;  // no further decrease possible along any feasible descent direction

        Correction c{std::vector<double>(n), std::vector<double>(n)};
        for (std::size_t i = 0; i < n; ++i) {
            c.s[i] = x_new[i] - x[i];
            c.y[i] = g_new[i] - g[i];
        }
        const double sy = dot(c.s, c.y);
        if (sy > 1e-12 * dot(c.y, c.y)) {
            memory.push_back(std::move(c));
            if (memory.size() > options.memory) memory.pop_front();
        }
        x = x_new;
        g = g_new;
        f = f_next;
    }
    r.pg_norm = projected_gradient_norm(x, g, bounds);
    r.converged = r.converged || r.pg_norm < options.pg_tolerance;
    r.x = std::move(x);
    r.value = f;
    return r;
}

}  // namespace routechoice
