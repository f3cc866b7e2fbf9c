#pragma once

#include <functional>
#include <vector>

#include "fpc/market_data.hpp"

namespace fpc {

/// Piecewise-constant instantaneous volatility: sigmas[k] applies on
/// (breaks[k-1], breaks[k]] (with breaks[-1] = 0) and the last value is
/// extrapolated flat beyond the final breakpoint.
struct PiecewiseVol {
    std::vector<double> breaks;
    std::vector<double> sigmas;

    static PiecewiseVol constant(double sigma) { return {{1.0}, {sigma}}; }

    double at(double t) const;
    void validate() const;
};

/// Firm-value parameters for one scenario, normalized by V0.
struct FirmDynamics {
    double h_ratio = 0.4;  // H / V0
    double beta = 0.5;     // barrier shape
    PiecewiseVol vol = PiecewiseVol::constant(0.2);

    void validate() const;
};

/// Integral of sigma(s)^2 over [0, T], exact on the constant segments.
double integrated_variance(const FirmDynamics& firm, double T);

/// Closed-form first-passage survival probability Q(tau > T).
double survival_probability(const FirmDynamics& firm, double T);

/// Safety barrier level at time t as a fraction of V0:
/// h * exp(-int_0^t (q - r + (1+2*beta)*sigma^2/2) ds).
double barrier_level(const FirmDynamics& firm, const DiscountCurve& discount,
                     const DividendCurve& dividends, double t);

struct Scenario {
    FirmDynamics firm;
    double probability = 1.0;
};

/// Discrete scenarios (H_i, sigma_i) with probabilities summing to one,
/// independent of the firm's Brownian driver.
struct ScenarioSet {
    std::vector<Scenario> scenarios;

    static ScenarioSet single(FirmDynamics firm) { return {{{std::move(firm), 1.0}}}; }

    void validate() const;
    double expected_barrier() const;
};

double mixture_survival(const ScenarioSet& scenarios, double T);

/// Survival curve: an evaluator plus the sampling grid used by the CDS
/// integrals and CSV export.
struct SurvivalCurve {
    std::function<double(double)> eval;
    std::vector<double> times;
    std::vector<double> values;

    double operator()(double t) const { return eval(t); }
    double horizon() const { return times.back(); }
    double grid_step() const;
};

SurvivalCurve survival_grid(const FirmDynamics& firm, double horizon, double step);
SurvivalCurve survival_grid(const ScenarioSet& scenarios, double horizon, double step);

/// Standard normal CDF, |error| <= 1e-12.
double norm_cdf(double x);

}  // namespace fpc
