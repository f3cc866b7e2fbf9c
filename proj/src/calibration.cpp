#include "fpc/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nelder_mead.hpp"

namespace fpc {

namespace {

std::vector<PaymentSchedule> quote_schedules(const std::vector<CdsQuote>& quotes) {
    std::vector<PaymentSchedule> out;
    out.reserve(quotes.size());
    for (const auto& q : quotes)
        out.push_back(build_schedule(0.0, q.tenor, q.frequency));
    return out;
}

// Mixture PV at each mid quote, buyer sign, bps.
std::vector<double> mixture_residuals(const ScenarioSet& scenarios,
                                      const std::vector<CdsQuote>& quotes,
                                      const std::vector<PaymentSchedule>& schedules,
                                      const DiscountCurve& discount) {
    const double horizon = quotes.back().tenor;
    std::vector<double> residuals(quotes.size(), 0.0);
    for (const auto& s : scenarios.scenarios) {
        const auto curve = survival_grid(s.firm, horizon, kDefaultGridStep);
        for (std::size_t k = 0; k < quotes.size(); ++k)
            residuals[k] += s.probability *
                            cds_pv(schedules[k], quotes[k].mid_bps, quotes[k].lgd(),
                                   curve, discount).pv;
    }
    return residuals;
}

// Precomputed quadrature for the optimizer's inner loop: one shared grid
// (weekly nodes merged with every payment date), discount factors and accrual
// weights fixed up front, so pricing a scenario set only needs survival
// values at the grid nodes. Matches cds_pv's midpoint rule on the same grid.
class FastPricer {
public:
    FastPricer(const std::vector<CdsQuote>& quotes,
               const std::vector<PaymentSchedule>& schedules,
               const DiscountCurve& discount, double grid_step) {
        const double horizon = quotes.back().tenor;
        std::vector<double> pay_dates{0.0};
        for (const auto& s : schedules)
            for (double d : s.dates)
                pay_dates.push_back(d);
        std::sort(pay_dates.begin(), pay_dates.end());
        pay_dates.erase(std::unique(pay_dates.begin(), pay_dates.end(),
                                    [](double a, double b) { return b - a < 1e-12; }),
                        pay_dates.end());

        times_ = pay_dates;
        const auto n = static_cast<std::size_t>(std::ceil(horizon / grid_step - 1e-9));
        for (std::size_t j = 1; j <= n; ++j) {
            const double t = std::min(j * grid_step, horizon);
            const auto it = std::lower_bound(pay_dates.begin(), pay_dates.end(), t - 1e-9);
            if (it == pay_dates.end() || *it > t + 1e-9)
                times_.push_back(t);
        }
        std::sort(times_.begin(), times_.end());

        df_mid_.resize(times_.size() - 1);
        for (std::size_t j = 0; j + 1 < times_.size(); ++j)
            df_mid_[j] = discount.discount_factor(0.5 * (times_[j] + times_[j + 1]));

        quotes_.resize(quotes.size());
        for (std::size_t k = 0; k < quotes.size(); ++k) {
            auto& q = quotes_[k];
            q.rate = quotes[k].mid_bps * 1e-4;
            q.lgd = quotes[k].lgd();
            while (q.intervals + 1 < times_.size() &&
                   times_[q.intervals + 1] <= quotes[k].tenor + 1e-9)
                ++q.intervals;
            q.acc_weight.resize(q.intervals);
            for (std::size_t j = 0; j < q.intervals; ++j) {
                const double t_mid = 0.5 * (times_[j] + times_[j + 1]);
                q.acc_weight[j] =
                    (t_mid - schedules[k].previous_date(t_mid)) * df_mid_[j];
            }
            for (std::size_t i = 0; i < schedules[k].dates.size(); ++i) {
                const auto it = std::lower_bound(times_.begin(), times_.end(),
                                                 schedules[k].dates[i] - 1e-9);
                q.premium.emplace_back(
                    static_cast<std::size_t>(it - times_.begin()),
                    schedules[k].accruals[i] *
                        discount.discount_factor(schedules[k].dates[i]));
            }
        }
        survival_buf_.resize(times_.size());
    }

    const std::vector<double>& times() const { return times_; }

    // Buyer-side PVs in bps at the mid quotes for a scenario mixture.
    std::vector<double> mixture_pvs(const ScenarioSet& set) {
        std::vector<double> pvs(quotes_.size(), 0.0);
        for (const auto& s : set.scenarios) {
            fill_survival(s.firm);
            for (std::size_t k = 0; k < quotes_.size(); ++k)
                pvs[k] += s.probability * quote_pv(k);
        }
        return pvs;
    }

private:
    void fill_survival(const FirmDynamics& firm) {
        const double log_h = std::log(firm.h_ratio);
        const double h2b = std::pow(firm.h_ratio, 2.0 * firm.beta);
        for (std::size_t j = 0; j < times_.size(); ++j) {
            const double var = integrated_variance(firm, times_[j]);
            if (var <= 0.0) {
                survival_buf_[j] = 1.0;
                continue;
            }
            const double sd = std::sqrt(var);
            survival_buf_[j] = norm_cdf((-log_h + firm.beta * var) / sd) -
                               h2b * norm_cdf((log_h + firm.beta * var) / sd);
        }
    }

    double quote_pv(std::size_t k) const {
        const auto& q = quotes_[k];
        double prot = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < q.intervals; ++j) {
            const double dq = survival_buf_[j] - survival_buf_[j + 1];
            if (dq > 0.0) {
                prot += df_mid_[j] * dq;
                acc += q.acc_weight[j] * dq;
            }
        }
        double prem = 0.0;
        for (const auto& [idx, w] : q.premium)
            prem += w * survival_buf_[idx];
        return (q.lgd * prot - q.rate * (prem + acc)) * 1e4;
    }

    struct QuoteTerms {
        double rate = 0.0, lgd = 0.0;
        std::size_t intervals = 0;  // quadrature intervals covering (0, tenor]
        std::vector<double> acc_weight;
        std::vector<std::pair<std::size_t, double>> premium;  // (node, alpha * df)
    };

    std::vector<double> times_;
    std::vector<double> df_mid_;
    std::vector<QuoteTerms> quotes_;
    std::vector<double> survival_buf_;
};

std::vector<double> effective_weights(const CalibrationConfig& config,
                                      std::size_t quote_count) {
    if (config.weights.empty())
        return std::vector<double>(quote_count, 1.0);
    if (config.weights.size() != quote_count)
        throw std::invalid_argument("calibration: weights/quotes size mismatch");
    for (double w : config.weights)
        if (w <= 0.0)
            throw std::invalid_argument("calibration: weights must be positive");
    // Normalize to mean one so weighted and unweighted objectives are
    // directly comparable.
    double sum = 0.0;
    for (double w : config.weights)
        sum += w;
    std::vector<double> out(config.weights);
    for (double& w : out)
        w *= quote_count / sum;
    return out;
}

double weighted_sq(const std::vector<double>& residuals, const std::vector<double>& w) {
    double total = 0.0;
    for (std::size_t k = 0; k < residuals.size(); ++k)
        total += w[k] * residuals[k] * residuals[k];
    return total;
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double squash(double u, double lo, double hi) { return lo + (hi - lo) * logistic(u); }

double unsquash(double x, double lo, double hi) {
    const double eps = 1e-9 * (hi - lo);
    x = std::clamp(x, lo + eps, hi - eps);
    return std::log((x - lo) / (hi - x));
}

enum class VolMode { Fixed, SharedFree, PerScenarioFree };

// Unconstrained parameter vector <-> ScenarioSet. Layout: N barrier logits,
// then the free volatility logits, then N-1 probability logits (last
// probability is the normalization remainder).
struct ParamMap {
    const CalibrationConfig& config;
    int n;
    VolMode vol_mode;

    std::size_t dim() const {
        std::size_t d = static_cast<std::size_t>(n) + static_cast<std::size_t>(n - 1);
        if (vol_mode == VolMode::SharedFree)
            d += 1;
        else if (vol_mode == VolMode::PerScenarioFree)
            d += static_cast<std::size_t>(n);
        return d;
    }

    ScenarioSet decode(const std::vector<double>& u) const {
        ScenarioSet set;
        std::size_t pos = 0;
        std::vector<double> h(n), sig(n);
        for (int i = 0; i < n; ++i)
            h[i] = squash(u[pos++], config.h_lo, config.h_hi);
        if (vol_mode == VolMode::Fixed) {
            std::fill(sig.begin(), sig.end(), *config.common_sigma);
        } else if (vol_mode == VolMode::SharedFree) {
            std::fill(sig.begin(), sig.end(),
                      squash(u[pos], config.sigma_lo, config.sigma_hi));
            ++pos;
        } else {
            for (int i = 0; i < n; ++i)
                sig[i] = squash(u[pos++], config.sigma_lo, config.sigma_hi);
        }
        double denom = 1.0;
        std::vector<double> expv(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            expv[i] = std::exp(std::clamp(u[pos++], -30.0, 30.0));
            denom += expv[i];
        }
        for (int i = 0; i < n; ++i) {
            const double p = (i < n - 1) ? expv[i] / denom : 1.0 / denom;
            set.scenarios.push_back({{h[i], config.beta, PiecewiseVol::constant(sig[i])}, p});
        }
        return set;
    }

    std::vector<double> encode(const ScenarioSet& set) const {
        std::vector<double> u;
        for (const auto& s : set.scenarios)
            u.push_back(unsquash(s.firm.h_ratio, config.h_lo, config.h_hi));
        if (vol_mode == VolMode::SharedFree) {
            u.push_back(unsquash(set.scenarios.front().firm.vol.sigmas.front(),
                                 config.sigma_lo, config.sigma_hi));
        } else if (vol_mode == VolMode::PerScenarioFree) {
            for (const auto& s : set.scenarios)
                u.push_back(unsquash(s.firm.vol.sigmas.front(), config.sigma_lo,
                                     config.sigma_hi));
        }
        const double p_last = std::max(set.scenarios.back().probability, 1e-9);
        for (int i = 0; i < n - 1; ++i)
            u.push_back(std::log(std::max(set.scenarios[i].probability, 1e-9) / p_last));
        return u;
    }
};

ScenarioSet sorted_by_barrier(ScenarioSet set) {
    std::sort(set.scenarios.begin(), set.scenarios.end(),
              [](const Scenario& a, const Scenario& b) {
                  return a.firm.h_ratio < b.firm.h_ratio;
              });
    return set;
}

// Bid/ask PV window per quote: a residual counts as inside the market window
// when it is no larger than the PV of the mid-stripped intensity curve
// repriced at the bid rate.
std::vector<bool> window_flags(const std::vector<CdsQuote>& quotes,
                               const std::vector<PaymentSchedule>& schedules,
                               const std::vector<double>& residuals,
                               const DiscountCurve& discount) {
    const auto hazard = strip_hazard(quotes, discount);
    std::vector<bool> flags;
    for (std::size_t k = 0; k < quotes.size(); ++k) {
        const auto surv = hazard_survival_grid(hazard, quotes[k].tenor);
        const double window =
            std::abs(cds_pv(schedules[k], quotes[k].bid_bps, quotes[k].lgd(), surv,
                            discount).pv);
        flags.push_back(std::abs(residuals[k]) <= window + 1e-9);
    }
    return flags;
}

CalibrationReport optimize_impl(const std::vector<CdsQuote>& quotes,
                                const CalibrationConfig& config, VolMode vol_mode,
                                const DiscountCurve& discount,
                                const std::vector<ScenarioSet>& extra_seeds) {
    if (quotes.empty())
        throw std::invalid_argument("calibration: no quotes");
    if (config.scenario_count < 1)
        throw std::invalid_argument("calibration: scenario_count must be >= 1");
    if (vol_mode == VolMode::Fixed && !config.common_sigma)
        throw std::invalid_argument("calibration: common_sigma required");

    const auto schedules = quote_schedules(quotes);
    const auto weights = effective_weights(config, quotes.size());
    const ParamMap map{config, config.scenario_count, vol_mode};

    FastPricer pricer(quotes, schedules, discount, kDefaultGridStep);
    auto objective = [&](const std::vector<double>& u) {
        return weighted_sq(pricer.mixture_pvs(map.decode(u)), weights);
    };

    // Deterministic Halton spread of starting points over the box.
    static const int bases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    const int n = config.scenario_count;
    std::vector<std::vector<double>> starts;
    for (int s = 0; s < config.multistart_count; ++s) {
        std::vector<double> u;
        int dim_index = 0;
        auto next = [&]() { return detail::halton(s + 1, bases[dim_index++ % 12]); };
        for (int i = 0; i < n; ++i)
            u.push_back(unsquash(0.08 + 0.84 * next(), config.h_lo, config.h_hi));
        if (vol_mode == VolMode::SharedFree)
            u.push_back(unsquash(0.05 + 0.55 * next(), config.sigma_lo, config.sigma_hi));
        else if (vol_mode == VolMode::PerScenarioFree)
            for (int i = 0; i < n; ++i)
                u.push_back(unsquash(0.05 + 0.55 * next(), config.sigma_lo,
                                     config.sigma_hi));
        for (int i = 0; i < n - 1; ++i)
            u.push_back(2.0 * next() - 1.0);
        starts.push_back(std::move(u));
    }
    for (const auto& seed : extra_seeds)
        starts.push_back(map.encode(seed));

    detail::NelderMeadResult best;
    best.fx = std::numeric_limits<double>::infinity();
    for (const auto& start : starts) {
        auto run = detail::nelder_mead(objective, start, 0.7, config.tolerance,
                                       config.max_iterations);
        // Polish: restart the simplex around the incumbent until it stalls.
        for (int r = 0; r < 3; ++r) {
            auto polished = detail::nelder_mead(objective, run.x, 0.2, config.tolerance,
                                                config.max_iterations);
            polished.converged = polished.converged && run.converged;
            if (polished.fx >= run.fx - 1e-14)
                break;
            run = polished;
        }
        if (run.fx < best.fx)
            best = run;
    }

    CalibrationReport report;
    report.scenarios = sorted_by_barrier(map.decode(best.x));
    report.converged = best.converged;
    const auto residuals =
        mixture_residuals(report.scenarios, quotes, schedules, discount);
    report.residuals_bps = residuals;
    report.objective_bps2 = weighted_sq(residuals, weights);
    report.objective_unweighted_bps2 =
        weighted_sq(residuals, std::vector<double>(quotes.size(), 1.0));
    report.expected_barrier = report.scenarios.expected_barrier();
    report.in_window = window_flags(quotes, schedules, residuals, discount);
    return report;
}

}  // namespace

FirmDynamics calibrate_at1p_cascade(const std::vector<CdsQuote>& quotes, double h_ratio,
                                    double beta, const DiscountCurve& discount) {
    if (quotes.empty())
        throw std::invalid_argument("calibrate_at1p_cascade: no quotes");
    if (!(h_ratio > 0.0 && h_ratio < 1.0))
        throw std::invalid_argument("calibrate_at1p_cascade: h_ratio must be in (0,1)");

    FirmDynamics firm;
    firm.h_ratio = h_ratio;
    firm.beta = beta;
    firm.vol.breaks.clear();
    firm.vol.sigmas.clear();

    for (const auto& quote : quotes) {
        quote.validate();
        firm.vol.breaks.push_back(quote.tenor);
        firm.vol.sigmas.push_back(0.2);
        const std::size_t k = firm.vol.sigmas.size() - 1;
        const auto schedule = build_schedule(0.0, quote.tenor, quote.frequency);

        auto pv_at = [&](double sigma) {
            firm.vol.sigmas[k] = sigma;
            const auto curve = survival_grid(firm, quote.tenor, kDefaultGridStep);
            return cds_pv(schedule, quote.mid_bps, quote.lgd(), curve, discount).pv;
        };

        double lo = 0.001, hi = 3.0;
        if (pv_at(lo) > 0.0 || pv_at(hi) < 0.0)
            throw CalibrationError(
                "calibrate_at1p_cascade: no volatility root in (0.1%,300%) for tenor " +
                std::to_string(quote.tenor));
        for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (pv_at(mid) < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        firm.vol.sigmas[k] = 0.5 * (lo + hi);
    }
    return firm;
}

KernelResult sbat1p_kernel_calibrate(const std::vector<CdsQuote>& quotes,
                                     const CalibrationConfig& config,
                                     const DiscountCurve& discount) {
    const auto n = quotes.size();
    if (n == 0)
        throw std::invalid_argument("sbat1p_kernel_calibrate: no quotes");
    if (config.fixed_h.size() + 1 != n)
        throw std::invalid_argument(
            "sbat1p_kernel_calibrate: need one fixed barrier per quote minus one");
    if (!config.common_sigma)
        throw std::invalid_argument("sbat1p_kernel_calibrate: common_sigma required");
    const double sigma = *config.common_sigma;

    const auto schedules = quote_schedules(quotes);
    const double horizon = quotes.back().tenor;

    // Column of quote PVs for one barrier scenario.
    auto pv_column = [&](double h) {
        FirmDynamics firm{h, config.beta, PiecewiseVol::constant(sigma)};
        const auto curve = survival_grid(firm, horizon, kDefaultGridStep);
        Eigen::VectorXd col(static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k)
            col[static_cast<Eigen::Index>(k)] =
                cds_pv(schedules[k], quotes[k].mid_bps, quotes[k].lgd(), curve,
                       discount).pv;
        return col;
    };

    Eigen::MatrixXd c(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < config.fixed_h.size(); ++i) {
        if (!(config.fixed_h[i] > 0.0 && config.fixed_h[i] < 1.0))
            throw std::invalid_argument("sbat1p_kernel_calibrate: fixed barrier outside (0,1)");
        c.col(static_cast<Eigen::Index>(i)) = pv_column(config.fixed_h[i]);
    }

    auto det_at = [&](double h_free) {
        c.col(static_cast<Eigen::Index>(n) - 1) = pv_column(h_free);
        return c.partialPivLu().determinant();
    };

    // Allowed sub-intervals of the bracket, excluding fixed barriers +- 0.01.
    std::vector<std::pair<double, double>> intervals{{config.kernel_bracket_lo,
                                                      config.kernel_bracket_hi}};
    for (double fixed : config.fixed_h) {
        std::vector<std::pair<double, double>> next;
        for (auto [lo, hi] : intervals) {
            if (fixed - 0.01 > lo)
                next.emplace_back(lo, std::min(hi, fixed - 0.01));
            if (fixed + 0.01 < hi)
                next.emplace_back(std::max(lo, fixed + 0.01), hi);
        }
        intervals = std::move(next);
    }

    bool sign_change_found = false;
    std::string last_failure;
    for (auto [lo, hi] : intervals) {
        const int points = 256;
        double prev_h = lo;
        double prev_det = det_at(prev_h);
        for (int j = 1; j <= points; ++j) {
            const double h = lo + (hi - lo) * j / points;
            const double d = det_at(h);
            if ((prev_det < 0.0) != (d < 0.0) && prev_det != 0.0) {
                sign_change_found = true;
                double a = prev_h, b = h, fa = prev_det;
                for (int it = 0; it < 100 && b - a > 1e-13; ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = det_at(mid);
                    if ((fa < 0.0) != (fm < 0.0))
                        b = mid;
                    else {
                        a = mid;
                        fa = fm;
                    }
                }
                const double h_free = 0.5 * (a + b);
                det_at(h_free);  // refresh the free column

                Eigen::JacobiSVD<Eigen::MatrixXd> svd(c, Eigen::ComputeFullV);
                Eigen::VectorXd p = svd.matrixV().col(static_cast<Eigen::Index>(n) - 1);
                const double sum = p.sum();
                if (std::abs(sum) < 1e-12) {
                    last_failure = "degenerate null vector";
                } else {
                    p /= sum;
                    if (p.minCoeff() < -1e-10) {
                        last_failure = "negative probability in null vector";
                    } else {
                        KernelResult result;
                        result.free_barrier = h_free;
                        result.residual_norm = (c * p).norm() / c.norm();
                        std::vector<double> barriers(config.fixed_h);
                        barriers.push_back(h_free);
                        double total = 0.0;
                        for (std::size_t i = 0; i < n; ++i) {
                            const double pi = std::max(p[static_cast<Eigen::Index>(i)], 0.0);
                            total += pi;
                        }
                        for (std::size_t i = 0; i < n; ++i) {
                            const double pi =
                                std::max(p[static_cast<Eigen::Index>(i)], 0.0) / total;
                            result.scenarios.scenarios.push_back(
                                {{barriers[i], config.beta, PiecewiseVol::constant(sigma)},
                                 pi});
                        }
                        result.scenarios = sorted_by_barrier(result.scenarios);
                        return result;
                    }
                }
            }
            prev_h = h;
            prev_det = d;
        }
    }

    if (!sign_change_found)
        throw CalibrationError(
            "sbat1p_kernel_calibrate: no admissible barrier (determinant has no root "
            "in the bracket)");
    throw CalibrationError("sbat1p_kernel_calibrate: " + last_failure);
}

CalibrationReport sbat1p_optimize(const std::vector<CdsQuote>& quotes,
                                  const CalibrationConfig& config,
                                  const DiscountCurve& discount) {
    const VolMode mode = config.common_sigma ? VolMode::Fixed : VolMode::SharedFree;
    std::vector<ScenarioSet> seeds;
    if (config.scenario_count > 1) {
        // Lift the (N-1)-scenario optimum by duplicating its last scenario:
        // same objective value, so the search can only improve on it.
        CalibrationConfig sub = config;
        sub.scenario_count = config.scenario_count - 1;
        const auto base = sbat1p_optimize(quotes, sub, discount);
        ScenarioSet lifted = base.scenarios;
        Scenario split = lifted.scenarios.back();
        lifted.scenarios.back().probability = split.probability * 0.5;
        split.probability *= 0.5;
        split.firm.h_ratio = std::min(split.firm.h_ratio + 1e-4, config.h_hi - 1e-6);
        lifted.scenarios.push_back(split);
        seeds.push_back(std::move(lifted));
    }
    return optimize_impl(quotes, config, mode, discount, seeds);
}

CalibrationReport svbat1p_optimize(const std::vector<CdsQuote>& quotes,
                                   const CalibrationConfig& config,
                                   const DiscountCurve& discount) {
    // Seed with the barrier-only fit at a shared free volatility.
    std::vector<ScenarioSet> seeds;
    CalibrationConfig barrier_only = config;
    barrier_only.common_sigma.reset();
    const auto base = optimize_impl(quotes, barrier_only, VolMode::SharedFree, discount, {});
    ScenarioSet seed = base.scenarios;
    for (std::size_t i = 0; i < seed.scenarios.size(); ++i) {
        auto& vol = seed.scenarios[i].firm.vol.sigmas.front();
        vol = std::clamp(vol + 0.01 * (static_cast<double>(i) - 0.5),
                         config.sigma_lo + 1e-6, config.sigma_hi - 1e-6);
    }
    seeds.push_back(std::move(seed));
    return optimize_impl(quotes, config, VolMode::PerScenarioFree, discount, seeds);
}

CalibrationReport residual_report(const ScenarioSet& scenarios,
                                  const std::vector<CdsQuote>& quotes,
                                  const DiscountCurve& discount,
                                  const std::vector<double>& weights) {
    scenarios.validate();
    const auto schedules = quote_schedules(quotes);
    CalibrationConfig config;
    config.weights = weights;
    const auto w = effective_weights(config, quotes.size());

    CalibrationReport report;
    report.scenarios = scenarios;
    report.residuals_bps = mixture_residuals(scenarios, quotes, schedules, discount);
    report.objective_bps2 = weighted_sq(report.residuals_bps, w);
    report.objective_unweighted_bps2 =
        weighted_sq(report.residuals_bps, std::vector<double>(quotes.size(), 1.0));
    report.expected_barrier = scenarios.expected_barrier();

    report.in_window = window_flags(quotes, schedules, report.residuals_bps, discount);
    return report;
}

}  // namespace fpc
