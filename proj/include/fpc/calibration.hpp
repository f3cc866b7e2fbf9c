#pragma once

#include <optional>
#include <vector>

#include "fpc/cds_pricer.hpp"
#include "fpc/hazard.hpp"
#include "fpc/market_data.hpp"
#include "fpc/survival.hpp"

namespace fpc {

struct CalibrationConfig {
    double beta = 0.5;
    std::vector<double> fixed_h;          // kernel calibration: N-1 fixed barriers
    int scenario_count = 2;
    std::optional<double> common_sigma;   // absent: per the procedure's defaults
    std::vector<double> weights;          // empty: unweighted, one per quote otherwise
    int multistart_count = 16;
    int max_iterations = 4000;
    double tolerance = 1e-13;             // objective spread, bps^2
    double h_lo = 0.01, h_hi = 0.99;
    double sigma_lo = 0.01, sigma_hi = 1.0;
    double kernel_bracket_lo = 0.05, kernel_bracket_hi = 0.95;
};

struct CalibrationReport {
    ScenarioSet scenarios;
    double objective_bps2 = 0.0;            // as optimized (weighted if weights set)
    double objective_unweighted_bps2 = 0.0;
    std::vector<double> residuals_bps;       // mixture PV at each mid quote
    std::vector<bool> in_window;             // |PV| within the bid/ask PV window
    double expected_barrier = 0.0;           // post collapse-merge, diagnostics only
    bool converged = true;
};

/// AT1P cascade: one piecewise-constant volatility segment per quote, solved
/// in tenor order so each mid quote reprices to zero PV.
FirmDynamics calibrate_at1p_cascade(const std::vector<CdsQuote>& quotes, double h_ratio,
                                    double beta, const DiscountCurve& discount);

struct KernelResult {
    double free_barrier = 0.0;
    ScenarioSet scenarios;
    double residual_norm = 0.0;  // ||C p|| / ||C|| at the solution
};

/// SBAT1P linear-algebra calibration: finds the free barrier making the
/// scenario-CDS matrix singular and takes the null-space vector as the
/// probabilities (rescaled to sum to one).
KernelResult sbat1p_kernel_calibrate(const std::vector<CdsQuote>& quotes,
                                     const CalibrationConfig& config,
                                     const DiscountCurve& discount);

/// SBAT1P least squares over barriers and probabilities at a common constant
/// volatility (free if config.common_sigma is absent).
CalibrationReport sbat1p_optimize(const std::vector<CdsQuote>& quotes,
                                  const CalibrationConfig& config,
                                  const DiscountCurve& discount);

/// SVBAT1P least squares: per-scenario constant volatilities are also free.
CalibrationReport svbat1p_optimize(const std::vector<CdsQuote>& quotes,
                                   const CalibrationConfig& config,
                                   const DiscountCurve& discount);

/// Per-quote mixture PVs at the mid quotes with in-window flags against the
/// intensity-model bid/ask PV windows.
CalibrationReport residual_report(const ScenarioSet& scenarios,
                                  const std::vector<CdsQuote>& quotes,
                                  const DiscountCurve& discount,
                                  const std::vector<double>& weights = {});

}  // namespace fpc
