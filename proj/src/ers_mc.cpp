#include "fpc/ers_mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <thread>

namespace fpc {

namespace {

constexpr std::size_t kBlockSize = 65536;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

int worker_count(const McConfig& config) {
    if (config.threads > 0)
        return config.threads;
    if (const char* env = std::getenv("FPC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0)
            return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

struct ScenarioSteps {
    double x0 = 0.0;                  // ln(V0 / H_i)
    double beta = 0.0;
    std::vector<double> dvar;         // sigma_i^2 dt per step
    std::vector<double> sd;           // sqrt(dvar)
};

}  // namespace

void ErsContract::validate() const {
    if (stock_count <= 0.0 || s0 <= 0.0)
        throw std::invalid_argument("ErsContract: stock_count and s0 must be positive");
    if (schedule.dates.empty())
        throw std::invalid_argument("ErsContract: empty schedule");
    if (counterparty_recovery < 0.0 || counterparty_recovery >= 1.0)
        throw std::invalid_argument("ErsContract: recovery must be in [0,1)");
}

void EquityDynamics::validate() const {
    if (s0 <= 0.0 || sigma <= 0.0)
        throw std::invalid_argument("EquityDynamics: s0 and sigma must be positive");
}

void McConfig::validate() const {
    if (paths < 1)
        throw std::invalid_argument("McConfig: need at least one path");
    if (steps_per_year < 12)
        throw std::invalid_argument("McConfig: steps_per_year must be >= 12");
    if (rho < -1.0 || rho > 1.0)
        throw std::invalid_argument("McConfig: correlation outside [-1,1]");
}

SimulationResult simulate_default_and_equity(const ScenarioSet& scenarios,
                                             const EquityDynamics& equity,
                                             const DiscountCurve& discount,
                                             const McConfig& config, double horizon,
                                             const std::vector<double>& record_times) {
    scenarios.validate();
    equity.validate();
    config.validate();
    if (horizon <= 0.0)
        throw std::domain_error("simulate_default_and_equity: non-positive horizon");

    const double dt = 1.0 / config.steps_per_year;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));

    std::vector<double> times(steps + 1);
    for (std::size_t j = 0; j <= steps; ++j)
        times[j] = std::min(j * dt, horizon);
    times[steps] = horizon;

    // Per-scenario step variances of ln(V / barrier); the drift of that
    // distance process is beta * dvar per step, all curve terms cancel.
    std::vector<ScenarioSteps> plans(scenarios.scenarios.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        const auto& firm = scenarios.scenarios[i].firm;
        plans[i].x0 = -std::log(firm.h_ratio);
        plans[i].beta = firm.beta;
        plans[i].dvar.resize(steps);
        plans[i].sd.resize(steps);
        double prev_var = 0.0;
        for (std::size_t j = 0; j < steps; ++j) {
            const double v = integrated_variance(firm, times[j + 1]);
            plans[i].dvar[j] = std::max(v - prev_var, 1e-300);
            plans[i].sd[j] = std::sqrt(plans[i].dvar[j]);
            prev_var = v;
        }
    }

    std::vector<double> cum_prob(scenarios.scenarios.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cum_prob.size(); ++i) {
        acc += scenarios.scenarios[i].probability;
        cum_prob[i] = acc;
    }
    cum_prob.back() = 1.0 + 1e-12;

    // Equity log drift per step from the curve plus the constant yield.
    std::vector<double> eq_drift(steps), eq_sd(steps);
    const double sig_s = equity.sigma;
    for (std::size_t j = 0; j < steps; ++j) {
        const double h = times[j + 1] - times[j];
        eq_drift[j] = (discount.log_discount(times[j]) - discount.log_discount(times[j + 1])) -
                      equity.dividend_yield * h - 0.5 * sig_s * sig_s * h;
        eq_sd[j] = sig_s * std::sqrt(h);
    }

    // Map record times onto grid indices.
    std::vector<std::size_t> record_idx;
    for (double t : record_times) {
        const auto j = static_cast<std::size_t>(std::llround(t / dt));
        if (j > steps || std::abs(times[std::min(j, steps)] - t) > 1e-9)
            throw std::invalid_argument(
                "simulate_default_and_equity: record time off the step grid");
        record_idx.push_back(std::min(j, steps));
    }

    SimulationResult result;
    result.horizon = horizon;
    result.outcomes.resize(config.paths);
    if (config.record_schedule_equity)
        result.schedule_equity.assign(config.paths,
                                      std::vector<double>(record_times.size(), 0.0));

    const double rho = config.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    const std::size_t blocks = (config.paths + kBlockSize - 1) / kBlockSize;

    auto run_block = [&](std::size_t b) {
        std::mt19937_64 rng(splitmix64(config.seed + 0x100000001B3ULL * (b + 1)));
        std::normal_distribution<double> normal;
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        const std::size_t begin = b * kBlockSize;
        const std::size_t end = std::min(begin + kBlockSize, config.paths);
        for (std::size_t path = begin; path < end; ++path) {
            std::size_t scen = 0;
            const double u_scen = uniform(rng);
            while (u_scen > cum_prob[scen])
                ++scen;
            const ScenarioSteps& plan = plans[scen];

            double x = plan.x0;
            double ls = std::log(equity.s0);
            PathOutcome outcome;
            auto* record =
                config.record_schedule_equity ? &result.schedule_equity[path] : nullptr;

            for (std::size_t j = 0; j < steps; ++j) {
                const double x_prev = x;
                const double ls_prev = ls;
                const double z1 = normal(rng);
                const double z2 = normal(rng);
                x += plan.beta * plan.dvar[j] + plan.sd[j] * z1;
                ls += eq_drift[j] + eq_sd[j] * (rho * z1 + rho_c * z2);

                if (x <= 0.0) {
                    outcome.default_time = times[j + 1];
                    outcome.equity_at_default = std::exp(ls);
                    break;
                }
                if (config.brownian_bridge) {
                    const double arg = 2.0 * x_prev * x / plan.dvar[j];
                    if (arg < 40.0 && uniform(rng) < std::exp(-arg)) {
                        const double frac = uniform(rng);
                        const double h = times[j + 1] - times[j];
                        outcome.default_time = times[j] + frac * h;
                        const double ls_tau =
                            ls_prev + frac * (ls - ls_prev) +
                            sig_s * std::sqrt(std::max(frac * (1.0 - frac) * h, 0.0)) *
                                normal(rng);
                        outcome.equity_at_default = std::exp(ls_tau);
                        break;
                    }
                }
                if (record)
                    for (std::size_t r = 0; r < record_idx.size(); ++r)
                        if (record_idx[r] == j + 1)
                            (*record)[r] = std::exp(ls);
            }
            result.outcomes[path] = outcome;
        }
    };

    const int threads = std::min<int>(worker_count(config), static_cast<int>(blocks));
    if (threads <= 1) {
        for (std::size_t b = 0; b < blocks; ++b)
            run_block(b);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& th : pool)
            th.join();
    }
    return result;
}

double npv_at_default(const ErsContract& contract, const EquityDynamics& equity,
                      const DiscountCurve& discount, double default_time,
                      double equity_at_default) {
    contract.validate();
    equity.validate();
    const double maturity = contract.maturity();
    if (default_time > maturity + 1e-12)
        throw std::domain_error("npv_at_default: default time beyond maturity");
    const double tau = std::min(default_time, maturity);

    const double div_factor = std::exp(-equity.dividend_yield * (maturity - tau));
    const double dividends = equity_at_default * (1.0 - div_factor);

    const auto& schedule = contract.schedule;
    double floating = 0.0;
    const double spread = contract.spread_bps * 1e-4;
    const double df_tau = discount.discount_factor(tau);
    for (std::size_t i = schedule.first_date_after(tau); i < schedule.dates.size(); ++i) {
        const double t_end = schedule.dates[i];
        const double t_start = i == 0 ? schedule.start : schedule.dates[i - 1];
        const double alpha = schedule.accruals[i];
        // Period fixing frozen at the curve's forward set at period start.
        const double libor = discount.forward_simple_rate(t_start, t_end, alpha);
        floating += discount.discount_factor(t_end) / df_tau * alpha * (libor + spread);
    }
    floating *= contract.s0;

    const double terminal = contract.s0 * discount.discount_factor(maturity) / df_tau -
                            equity_at_default * div_factor;

    return contract.stock_count * (-dividends + floating + terminal);
}

namespace {

McEstimate price_outcomes(const ErsContract& contract, double spread_bps,
                          const ScenarioSet& scenarios, const EquityDynamics& equity,
                          const DiscountCurve& discount, const McConfig& config,
                          const SimulationResult& sim) {
    ErsContract priced = contract;
    priced.spread_bps = spread_bps;

    double annuity = 0.0;
    for (std::size_t i = 0; i < priced.schedule.dates.size(); ++i)
        annuity += priced.schedule.accruals[i] *
                   discount.discount_factor(priced.schedule.dates[i]);
    // Reporting units: payoff times 1e4, per unit of K.
    const double base = priced.s0 * spread_bps * 1e-4 * annuity * 1e4;
    const double lgd = priced.lgd();
    const double maturity = priced.maturity();

    double sum_f = 0.0, sum_f2 = 0.0, sum_y = 0.0, sum_y2 = 0.0, sum_fy = 0.0;
    for (const auto& outcome : sim.outcomes) {
        double f = base;
        double y = 0.0;
        if (outcome.default_time <= maturity) {
            y = 1.0;
            const double npv = npv_at_default(priced, equity, discount,
                                              outcome.default_time,
                                              outcome.equity_at_default) /
                               priced.stock_count;
            if (npv > 0.0)
                f -= lgd * discount.discount_factor(outcome.default_time) * npv * 1e4;
        }
        sum_f += f;
        sum_f2 += f * f;
        sum_y += y;
        sum_y2 += y * y;
        sum_fy += f * y;
    }

    const auto n = static_cast<double>(sim.outcomes.size());
    const double mean_f = sum_f / n;
    const double var_f = std::max(0.0, sum_f2 / n - mean_f * mean_f);

    McEstimate est;
    est.paths_used = sim.outcomes.size();
    if (config.control_variate && n > 1.0) {
        const double mean_y = sum_y / n;
        const double var_y = std::max(0.0, sum_y2 / n - mean_y * mean_y);
        const double cov = sum_fy / n - mean_f * mean_y;
        const double known_mean = 1.0 - mixture_survival(scenarios, maturity);
        if (var_y > 0.0) {
            est.cv_beta = cov / var_y;
            est.value = mean_f - est.cv_beta * (mean_y - known_mean);
            const double resid_var = std::max(0.0, var_f - cov * cov / var_y);
            est.std_error = std::sqrt(resid_var / n);
            return est;
        }
    }
    est.value = mean_f;
    est.std_error = std::sqrt(var_f / n);
    return est;
}

}  // namespace

McEstimate ers_price_from_sim(const ErsContract& contract, double spread_bps,
                              const ScenarioSet& scenarios,
                              const EquityDynamics& equity,
                              const DiscountCurve& discount, const McConfig& config,
                              const SimulationResult& sim) {
    return price_outcomes(contract, spread_bps, scenarios, equity, discount, config, sim);
}

McEstimate ers_price(const ErsContract& contract, const ScenarioSet& scenarios,
                     const EquityDynamics& equity, const DiscountCurve& discount,
                     const McConfig& config) {
    contract.validate();
    if (std::abs(contract.s0 - equity.s0) > 1e-12)
        throw std::invalid_argument("ers_price: contract and equity disagree on s0");
    const auto sim =
        simulate_default_and_equity(scenarios, equity, discount, config,
                                    contract.maturity());
    return price_outcomes(contract, contract.spread_bps, scenarios, equity, discount,
                          config, sim);
}

double fair_ers_spread(const ErsContract& contract, const ScenarioSet& scenarios,
                       const EquityDynamics& equity, const DiscountCurve& discount,
                       const McConfig& config) {
    contract.validate();
    const auto sim =
        simulate_default_and_equity(scenarios, equity, discount, config,
                                    contract.maturity());

    auto price_at = [&](double x) {
        return price_outcomes(contract, x, scenarios, equity, discount, config, sim)
            .value;
    };

    // Price tolerance: 0.05 bps of notional K*s0, expressed in payoff units.
    const double tol = 0.05 * contract.s0;
    double lo = 0.0;
    double f_lo = price_at(lo);
    if (f_lo >= -tol * 1e-6)
        return 0.0;  // no positive-NPV defaults: X = 0 is already fair

    double hi = 50.0;
    double f_hi = price_at(hi);
    int expansions = 0;
    while (f_hi < 0.0) {
        if (++expansions > 12)
            throw std::runtime_error("fair_ers_spread: failed to bracket the root");
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = price_at(hi);
    }

    // Secant step inside a maintained bracket (price is increasing in X).
    for (int it = 0; it < 200; ++it) {
        double mid = lo + (hi - lo) * (-f_lo) / (f_hi - f_lo);
        if (!(mid > lo && mid < hi))
            mid = 0.5 * (lo + hi);
        const double f_mid = price_at(mid);
        if (std::abs(f_mid) < tol && hi - lo < 1e-3)
            return mid;
        if (f_mid < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
        if (hi - lo < 1e-7)
            break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace fpc
