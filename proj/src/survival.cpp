#include "fpc/survival.hpp"

#include <cmath>
#include <stdexcept>

namespace fpc {

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double PiecewiseVol::at(double t) const {
    for (std::size_t k = 0; k < breaks.size(); ++k)
        if (t <= breaks[k])
            return sigmas[k];
    return sigmas.back();
}

void PiecewiseVol::validate() const {
    if (breaks.empty() || breaks.size() != sigmas.size())
        throw std::invalid_argument("PiecewiseVol: breaks/sigmas size mismatch");
    double prev = 0.0;
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        if (breaks[k] <= prev)
            throw std::invalid_argument("PiecewiseVol: breakpoints must be increasing");
        if (sigmas[k] <= 0.0)
            throw std::invalid_argument("PiecewiseVol: volatility must be positive");
        prev = breaks[k];
    }
}

void FirmDynamics::validate() const {
    if (!(h_ratio > 0.0 && h_ratio < 1.0))
        throw std::invalid_argument("FirmDynamics: h_ratio must be in (0,1)");
    if (!std::isfinite(beta))
        throw std::invalid_argument("FirmDynamics: beta must be finite");
    vol.validate();
}

double integrated_variance(const FirmDynamics& firm, double T) {
    if (T < 0.0)
        throw std::domain_error("integrated_variance: negative horizon");
    const auto& v = firm.vol;
    double total = 0.0;
    double prev = 0.0;
    for (std::size_t k = 0; k < v.breaks.size() && prev < T; ++k) {
        const double end = std::min(v.breaks[k], T);
        total += v.sigmas[k] * v.sigmas[k] * (end - prev);
        prev = end;
    }
    if (prev < T)
        total += v.sigmas.back() * v.sigmas.back() * (T - prev);
    return total;
}

double survival_probability(const FirmDynamics& firm, double T) {
    const double variance = integrated_variance(firm, T);
    if (variance <= 0.0)
        return 1.0;
    const double h = firm.h_ratio;
    const double sd = std::sqrt(variance);
    const double log_h = std::log(h);
    const double a = (-log_h + firm.beta * variance) / sd;
    const double b = (log_h + firm.beta * variance) / sd;
    return norm_cdf(a) - std::pow(h, 2.0 * firm.beta) * norm_cdf(b);
}

double barrier_level(const FirmDynamics& firm, const DiscountCurve& discount,
                     const DividendCurve& dividends, double t) {
    if (t < 0.0)
        throw std::domain_error("barrier_level: negative time");
    // int_0^t r ds = -ln P(0,t); int_0^t q ds from the dividend curve.
    const double exponent = dividends.cumulative_yield(t) + discount.log_discount(t) +
                            0.5 * (1.0 + 2.0 * firm.beta) * integrated_variance(firm, t);
    return firm.h_ratio * std::exp(-exponent);
}

void ScenarioSet::validate() const {
    if (scenarios.empty())
        throw std::invalid_argument("ScenarioSet: need at least one scenario");
    double total = 0.0;
    for (const auto& s : scenarios) {
        if (s.probability < 0.0 || s.probability > 1.0)
            throw std::invalid_argument("ScenarioSet: probability outside [0,1]");
        s.firm.validate();
        total += s.probability;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("ScenarioSet: probabilities must sum to one");
}

double ScenarioSet::expected_barrier() const {
    double eh = 0.0;
    for (const auto& s : scenarios)
        eh += s.probability * s.firm.h_ratio;
    return eh;
}

double mixture_survival(const ScenarioSet& scenarios, double T) {
    double q = 0.0;
    for (const auto& s : scenarios.scenarios)
        q += s.probability * survival_probability(s.firm, T);
    return q;
}

double SurvivalCurve::grid_step() const {
    double step = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
        step = std::max(step, times[i] - times[i - 1]);
    return step;
}

namespace {

SurvivalCurve make_grid(std::function<double(double)> eval, double horizon, double step) {
    if (step <= 0.0 || horizon < step)
        throw std::domain_error("survival_grid: need 0 < step <= horizon");
    SurvivalCurve curve;
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    curve.times.reserve(n + 1);
    curve.values.reserve(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = std::min(j * step, horizon);
        curve.times.push_back(t);
        curve.values.push_back(eval(t));
    }
    curve.times.back() = horizon;
    curve.eval = std::move(eval);
    return curve;
}

}  // namespace

SurvivalCurve survival_grid(const FirmDynamics& firm, double horizon, double step) {
    firm.validate();
    return make_grid([firm](double t) { return survival_probability(firm, t); },
                     horizon, step);
}

SurvivalCurve survival_grid(const ScenarioSet& scenarios, double horizon, double step) {
    scenarios.validate();
    return make_grid([scenarios](double t) { return mixture_survival(scenarios, t); },
                     horizon, step);
}

}  // namespace fpc
