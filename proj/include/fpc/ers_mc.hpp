#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fpc/market_data.hpp"
#include "fpc/survival.hpp"

namespace fpc {

/// Equity return swap terms. The counterparty pays LIBOR plus spread against
/// the equity's dividends and final price change.
struct ErsContract {
    double stock_count = 1.0;       // K
    double s0 = 20.0;               // initial stock price
    double spread_bps = 0.0;        // X
    PaymentSchedule schedule;       // semi-annual by convention
    double counterparty_recovery = 0.4;

    double lgd() const { return 1.0 - counterparty_recovery; }
    double maturity() const { return schedule.maturity(); }
    void validate() const;
};

struct EquityDynamics {
    double s0 = 20.0;
    double sigma = 0.2;
    double dividend_yield = 0.008;

    void validate() const;
};

struct McConfig {
    std::size_t paths = 200000;
    int steps_per_year = 250;
    std::uint64_t seed = 20040310;
    double rho = 0.0;               // firm/equity correlation
    bool control_variate = true;
    bool brownian_bridge = true;
    int threads = 0;                // 0: FPC_THREADS env or hardware count
    bool record_schedule_equity = false;

    void validate() const;
};

/// Monte Carlo estimate: expected discounted payoff times 1e4 per unit of
/// stock count K.
struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t paths_used = 0;
    double cv_beta = 0.0;
};

struct PathOutcome {
    double default_time = std::numeric_limits<double>::infinity();
    double equity_at_default = 0.0;

    bool defaulted() const { return default_time != std::numeric_limits<double>::infinity(); }
};

struct SimulationResult {
    std::vector<PathOutcome> outcomes;
    double horizon = 0.0;
    /// Per-path equity at the requested record times; filled only when
    /// McConfig::record_schedule_equity is set (paths beyond default hold 0).
    std::vector<std::vector<double>> schedule_equity;
};

/// Joint firm-value/equity simulation: scenario drawn per path, exact GBM
/// steps with correlated Gaussian increments, first-passage default at the
/// scenario barrier with optional Brownian-bridge crossing between grid
/// points (barrier treated as log-linear over the step, which is exact for
/// piecewise-constant coefficients).
SimulationResult simulate_default_and_equity(const ScenarioSet& scenarios,
                                             const EquityDynamics& equity,
                                             const DiscountCurve& discount,
                                             const McConfig& config, double horizon,
                                             const std::vector<double>& record_times = {});

/// Residual deal value at counterparty default, closed form under
/// deterministic rates and lognormal equity. Returns currency units (scales
/// with contract.stock_count).
double npv_at_default(const ErsContract& contract, const EquityDynamics& equity,
                      const DiscountCurve& discount, double default_time,
                      double equity_at_default);

McEstimate ers_price(const ErsContract& contract, const ScenarioSet& scenarios,
                     const EquityDynamics& equity, const DiscountCurve& discount,
                     const McConfig& config);

/// Prices the contract at the given spread against an existing simulation
/// (common random numbers across spread values).
McEstimate ers_price_from_sim(const ErsContract& contract, double spread_bps,
                              const ScenarioSet& scenarios,
                              const EquityDynamics& equity,
                              const DiscountCurve& discount, const McConfig& config,
                              const SimulationResult& sim);

/// Spread X that zeroes the contract PV, found on one shared simulation.
double fair_ers_spread(const ErsContract& contract, const ScenarioSet& scenarios,
                       const EquityDynamics& equity, const DiscountCurve& discount,
                       const McConfig& config);

}  // namespace fpc
