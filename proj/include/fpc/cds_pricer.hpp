#pragma once

#include "fpc/market_data.hpp"
#include "fpc/survival.hpp"

namespace fpc {

/// Running-CDS legs and PV, all in basis points of notional. The reported pv
/// is from the protection buyer's side: protection - premium - accrual, so a
/// premium rate below fair value gives a positive pv.
struct CdsPricingResult {
    double pv = 0.0;
    double premium_leg = 0.0;
    double accrual_on_default_leg = 0.0;
    double protection_leg = 0.0;
    double fair_spread = 0.0;
};

CdsPricingResult cds_pv(const PaymentSchedule& schedule, double rate_bps, double lgd,
                        const SurvivalCurve& survival, const DiscountCurve& discount);

double fair_spread(const PaymentSchedule& schedule, double lgd,
                   const SurvivalCurve& survival, const DiscountCurve& discount);

/// Scenario-mixture CDS PV: each scenario priced separately, then mixed.
double scenario_cds_pv(const PaymentSchedule& schedule, double rate_bps, double lgd,
                       const ScenarioSet& scenarios, const DiscountCurve& discount,
                       double grid_step = 1.0 / 52.0);

/// Default quadrature step for the protection/accrual integrals.
inline constexpr double kDefaultGridStep = 1.0 / 52.0;

}  // namespace fpc
