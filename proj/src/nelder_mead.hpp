#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace fpc::detail {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Standard Nelder-Mead simplex search on an unconstrained objective.
// Stops when the function spread falls below f_tol (relative to the best
// value) or the simplex has collapsed to a point.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, double initial_step,
                                    double f_tol, int max_iterations) {
    const std::size_t n = x0.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> xs(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        xs[i + 1][i] += initial_step;

    std::vector<double> fs(n + 1);
    int evals = 0;
    for (std::size_t i = 0; i <= n; ++i) {
        fs[i] = f(xs[i]);
        ++evals;
    }

    std::vector<std::size_t> order(n + 1);
    NelderMeadResult res;
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });

        const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];
        if (fs[worst] - fs[best] < f_tol * (1.0 + std::abs(fs[best]))) {
            res.converged = true;
            break;
        }
        double diameter = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                diameter = std::max(diameter, std::abs(xs[i][j] - xs[0][j]));
        if (diameter < 1e-10) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                centroid[j] += xs[i][j] / static_cast<double>(n);
        }

        auto point = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (centroid[j] - xs[worst][j]);
            return p;
        };

        auto reflected = point(alpha);
        const double f_r = f(reflected);
        ++evals;

        if (f_r < fs[order[0]]) {
            auto expanded = point(gamma);
            const double f_e = f(expanded);
            ++evals;
            if (f_e < f_r) {
                xs[worst] = std::move(expanded);
                fs[worst] = f_e;
            } else {
                xs[worst] = std::move(reflected);
                fs[worst] = f_r;
            }
        } else if (f_r < fs[second_worst]) {
            xs[worst] = std::move(reflected);
            fs[worst] = f_r;
        } else {
            auto contracted = point(f_r < fs[worst] ? rho : -rho);
            const double f_c = f(contracted);
            ++evals;
            if (f_c < std::min(f_r, fs[worst])) {
                xs[worst] = std::move(contracted);
                fs[worst] = f_c;
            } else {
                // Shrink toward the best vertex.
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best)
                        continue;
                    for (std::size_t j = 0; j < n; ++j)
                        xs[i][j] = xs[best][j] + sigma * (xs[i][j] - xs[best][j]);
                    fs[i] = f(xs[i]);
                    ++evals;
                }
            }
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    res.x = xs[best];
    res.fx = fs[best];
    res.evaluations = evals;
    return res;
}

// Halton low-discrepancy sequence point, coordinates in (0,1).
inline double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    int i = index;
    while (i > 0) {
        f /= base;
        r += f * (i % base);
        i /= base;
    }
    return r;
}

}  // namespace fpc::detail
