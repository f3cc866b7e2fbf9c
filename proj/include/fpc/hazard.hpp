#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fpc/cds_pricer.hpp"
#include "fpc/market_data.hpp"

namespace fpc {

struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Piecewise-linear default intensity lambda(t): linear between nodes, flat
/// before the first node and after the last one.
struct HazardCurve {
    std::vector<double> times;
    std::vector<double> intensities;

    double intensity(double t) const;
    /// int_0^t lambda(s) ds, exact trapezoid on the linear segments.
    double cumulative(double t) const;
    void validate() const;
};

/// Q(tau > t) = exp(-int_0^t lambda).
double hazard_survival(const HazardCurve& curve, double t);

SurvivalCurve hazard_survival_grid(const HazardCurve& curve, double horizon,
                                   double step = kDefaultGridStep);

/// Nested bootstrap: one intensity node per quoted maturity, each solved so
/// the CDS at the mid quote has zero PV; earlier nodes are left untouched.
HazardCurve strip_hazard(const std::vector<CdsQuote>& quotes,
                         const DiscountCurve& discount);

void save_hazard_curve(const HazardCurve& curve, const std::string& path);

}  // namespace fpc
