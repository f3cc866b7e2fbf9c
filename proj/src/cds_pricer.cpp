#include "fpc/cds_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpc {

namespace {

struct Legs {
    double premium_annuity = 0.0;   // sum alpha_i P(0,T_i) Q(T_i)
    double accrual_annuity = 0.0;   // sum (t_mid - T_prev) P(0,t_mid) dQ
    double protection = 0.0;        // sum P(0,t_mid) dQ
};

// Midpoint quadrature of the dQ integrals on the survival curve's grid,
// merged with the payment dates so accrual periods never straddle a node.
Legs compute_legs(const PaymentSchedule& schedule, const SurvivalCurve& survival,
                  const DiscountCurve& discount) {
    const double maturity = schedule.maturity();
    if (survival.horizon() < maturity - 1e-9)
        throw std::domain_error("cds_pv: survival grid does not cover maturity");
    if (survival.grid_step() > 1.0 / 12.0 + 1e-12)
        throw std::domain_error("cds_pv: survival grid coarser than 1/12 year");

    std::vector<double> grid;
    grid.reserve(survival.times.size() + schedule.dates.size() + 1);
    for (double t : survival.times) {
        if (t > maturity + 1e-12)
            break;
        if (t >= schedule.start)
            grid.push_back(t);
    }
    if (grid.empty() || grid.front() > schedule.start)
        grid.insert(grid.begin(), schedule.start);
    for (double d : schedule.dates)
        grid.push_back(d);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               grid.end());
    if (std::abs(grid.back() - maturity) > 1e-12)
        grid.push_back(maturity);

    Legs legs;
    double q_prev = survival(grid.front());
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double q_next = survival(grid[j]);
        const double dq = q_prev - q_next;
        if (dq > 0.0) {
            const double t_mid = 0.5 * (grid[j - 1] + grid[j]);
            const double df = discount.discount_factor(t_mid);
            legs.protection += df * dq;
            legs.accrual_annuity += (t_mid - schedule.previous_date(t_mid)) * df * dq;
        }
        q_prev = q_next;
    }
    for (std::size_t i = 0; i < schedule.dates.size(); ++i)
        legs.premium_annuity += schedule.accruals[i] *
                                discount.discount_factor(schedule.dates[i]) *
                                survival(schedule.dates[i]);
    return legs;
}

}  // namespace

CdsPricingResult cds_pv(const PaymentSchedule& schedule, double rate_bps, double lgd,
                        const SurvivalCurve& survival, const DiscountCurve& discount) {
    const Legs legs = compute_legs(schedule, survival, discount);
    const double r = rate_bps * 1e-4;

    CdsPricingResult res;
    res.premium_leg = r * legs.premium_annuity * 1e4;
    res.accrual_on_default_leg = r * legs.accrual_annuity * 1e4;
    res.protection_leg = lgd * legs.protection * 1e4;
    res.pv = res.protection_leg - res.premium_leg - res.accrual_on_default_leg;

    const double annuity = legs.premium_annuity + legs.accrual_annuity;
    res.fair_spread = annuity > 0.0 ? lgd * legs.protection / annuity * 1e4 : 0.0;
    return res;
}

double fair_spread(const PaymentSchedule& schedule, double lgd,
                   const SurvivalCurve& survival, const DiscountCurve& discount) {
    const Legs legs = compute_legs(schedule, survival, discount);
    if (legs.protection <= 0.0)
        return 0.0;
    const double annuity = legs.premium_annuity + legs.accrual_annuity;
    if (annuity <= 0.0)
        throw std::domain_error("fair_spread: zero premium annuity");
    return lgd * legs.protection / annuity * 1e4;
}

double scenario_cds_pv(const PaymentSchedule& schedule, double rate_bps, double lgd,
                       const ScenarioSet& scenarios, const DiscountCurve& discount,
                       double grid_step) {
    scenarios.validate();
    double pv = 0.0;
    for (const auto& s : scenarios.scenarios) {
        const auto curve = survival_grid(s.firm, schedule.maturity(), grid_step);
        pv += s.probability * cds_pv(schedule, rate_bps, lgd, curve, discount).pv;
    }
    return pv;
}

}  // namespace fpc
