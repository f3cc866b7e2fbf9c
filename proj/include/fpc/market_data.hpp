#pragma once

#include <string>
#include <utility>
#include <vector>

namespace fpc {

/// Deterministic zero-rate term structure. Pillars hold continuously
/// compounded zero rates; rates are interpolated linearly in time between
/// pillars and extrapolated flat on both sides.
class DiscountCurve {
public:
    explicit DiscountCurve(std::vector<std::pair<double, double>> pillars);

    static DiscountCurve flat(double zero_rate);

    double zero_rate(double t) const;
    /// P(0,t) = exp(-z(t) * t), t >= 0.
    double discount_factor(double t) const;
    /// ln P(0,t) = -z(t) * t.
    double log_discount(double t) const;
    /// Forward discount factor P(0,t2)/P(0,t1).
    double forward_discount(double t1, double t2) const;
    /// Simply compounded forward rate over [t1, t2] with the given accrual.
    double forward_simple_rate(double t1, double t2, double accrual) const;

    const std::vector<std::pair<double, double>>& pillars() const { return pillars_; }

private:
    std::vector<std::pair<double, double>> pillars_;
};

/// Deterministic payout (dividend) yield curve, same interpolation rules as
/// DiscountCurve. cumulative_yield(t) is the integral of q over [0, t].
class DividendCurve {
public:
    explicit DividendCurve(std::vector<std::pair<double, double>> pillars);

    static DividendCurve flat(double yield);

    double yield(double t) const;
    double cumulative_yield(double t) const;

    const std::vector<std::pair<double, double>>& pillars() const { return pillars_; }

private:
    std::vector<std::pair<double, double>> pillars_;
};

/// One market CDS quote: maturity in years, bid/ask/mid running spreads in
/// basis points and the recovery assumption.
struct CdsQuote {
    double tenor = 0.0;
    double bid_bps = 0.0;
    double ask_bps = 0.0;
    double mid_bps = 0.0;
    double recovery = 0.4;
    int frequency = 4;

    double lgd() const { return 1.0 - recovery; }
    void validate() const;
};

/// Premium payment dates T_{a+1}..T_b with their accrual fractions.
struct PaymentSchedule {
    double start = 0.0;
    std::vector<double> dates;
    std::vector<double> accruals;

    double maturity() const { return dates.back(); }
    /// Last payment date at or before t (returns start if t precedes the
    /// first date). This is T_{beta(t)-1} in running-CDS accrual terms.
    double previous_date(double t) const;
    /// Index of the first date strictly after t; dates.size() if none.
    std::size_t first_date_after(double t) const;
};

/// Equally spaced schedule with a short final stub for non-integer tenors.
PaymentSchedule build_schedule(double start, double maturity, int frequency);

std::vector<CdsQuote> load_quotes(const std::string& path);
void save_quotes(const std::vector<CdsQuote>& quotes, const std::string& path);

DiscountCurve load_discount_curve(const std::string& path);
void save_discount_curve(const DiscountCurve& curve, const std::string& path);

}  // namespace fpc
