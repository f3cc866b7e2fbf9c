#include "fpc/hazard.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace fpc {

void HazardCurve::validate() const {
    if (times.empty() || times.size() != intensities.size())
        throw std::invalid_argument("HazardCurve: times/intensities size mismatch");
    double prev = -1.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] <= prev)
            throw std::invalid_argument("HazardCurve: node times must be increasing");
        if (intensities[k] < 0.0)
            throw std::invalid_argument("HazardCurve: negative intensity");
        prev = times[k];
    }
}

double HazardCurve::intensity(double t) const {
    if (t <= times.front())
        return intensities.front();
    if (t >= times.back())
        return intensities.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const auto k = static_cast<std::size_t>(it - times.begin());
    const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
    return intensities[k - 1] + w * (intensities[k] - intensities[k - 1]);
}

double HazardCurve::cumulative(double t) const {
    if (t < 0.0)
        throw std::domain_error("HazardCurve: negative time");
    double integral = 0.0;
    double prev_t = 0.0;
    double prev_l = intensities.front();
    for (std::size_t k = 0; k < times.size() && prev_t < t; ++k) {
        const double end = std::min(times[k], t);
        if (end > prev_t) {
            const double l_end = intensity(end);
            integral += 0.5 * (prev_l + l_end) * (end - prev_t);
            prev_t = end;
            prev_l = l_end;
        }
    }
    if (prev_t < t)
        integral += intensities.back() * (t - prev_t);
    return integral;
}

double hazard_survival(const HazardCurve& curve, double t) {
    return std::exp(-curve.cumulative(t));
}

SurvivalCurve hazard_survival_grid(const HazardCurve& curve, double horizon, double step) {
    curve.validate();
    SurvivalCurve out;
    out.eval = [curve](double t) { return hazard_survival(curve, t); };
    const auto n = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = std::min(j * step, horizon);
        out.times.push_back(t);
        out.values.push_back(out.eval(t));
    }
    out.times.back() = horizon;
    out.values.back() = out.eval(horizon);
    return out;
}

HazardCurve strip_hazard(const std::vector<CdsQuote>& quotes,
                         const DiscountCurve& discount) {
    if (quotes.empty())
        throw std::invalid_argument("strip_hazard: no quotes");
    for (std::size_t i = 1; i < quotes.size(); ++i)
        if (quotes[i].tenor <= quotes[i - 1].tenor)
            throw std::invalid_argument("strip_hazard: quotes must be sorted by tenor");

    HazardCurve curve;
    for (const auto& quote : quotes) {
        quote.validate();
        curve.times.push_back(quote.tenor);
        curve.intensities.push_back(0.0);
        const std::size_t k = curve.intensities.size() - 1;
        const auto schedule = build_schedule(0.0, quote.tenor, quote.frequency);

        auto pv_at = [&](double lambda) {
            curve.intensities[k] = lambda;
            const auto surv = hazard_survival_grid(curve, quote.tenor);
            return cds_pv(schedule, quote.mid_bps, quote.lgd(), surv, discount).pv;
        };

        double lo = 0.0, hi = 10.0;
        double f_lo = pv_at(lo);
        double f_hi = pv_at(hi);
        if (f_lo > 0.0 || f_hi < 0.0)
            throw CalibrationError("strip_hazard: no root in [0,10] for tenor " +
                                   std::to_string(quote.tenor));
        // Bisection; buyer PV is increasing in the node intensity.
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f_mid = pv_at(mid);
            if (std::abs(f_mid) < 1e-13 || hi - lo < 1e-15)
                break;
            if (f_mid < 0.0)
                lo = mid;
            else
                hi = mid;
        }
        curve.intensities[k] = 0.5 * (lo + hi);
    }
    return curve;
}

void save_hazard_curve(const HazardCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_hazard_curve: cannot open '" + path + "'");
    out << "time_years,intensity\n";
    out << std::setprecision(17);
    for (std::size_t k = 0; k < curve.times.size(); ++k)
        out << curve.times[k] << ',' << curve.intensities[k] << '\n';
}

}  // namespace fpc
