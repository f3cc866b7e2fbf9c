#include "fpc/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fpc {

namespace {

void check_pillars(const std::vector<std::pair<double, double>>& pillars,
                   const char* what) {
    if (pillars.empty())
        throw std::invalid_argument(std::string(what) + ": no pillars");
    if (pillars.front().first < 0.0)
        throw std::invalid_argument(std::string(what) + ": negative pillar time");
    for (std::size_t i = 1; i < pillars.size(); ++i)
        if (pillars[i].first <= pillars[i - 1].first)
            throw std::invalid_argument(std::string(what) +
                                        ": pillar times must be strictly increasing");
    for (const auto& [t, r] : pillars)
        if (!std::isfinite(t) || !std::isfinite(r))
            throw std::invalid_argument(std::string(what) + ": non-finite pillar");
}

// Linear interpolation of the rate in t, flat extrapolation.
double interp_rate(const std::vector<std::pair<double, double>>& pillars, double t) {
    if (t <= pillars.front().first)
        return pillars.front().second;
    if (t >= pillars.back().first)
        return pillars.back().second;
    auto it = std::upper_bound(pillars.begin(), pillars.end(), t,
                               [](double x, const auto& p) { return x < p.first; });
    const auto& [t1, r1] = *(it - 1);
    const auto& [t2, r2] = *it;
    const double w = (t - t1) / (t2 - t1);
    return r1 + w * (r2 - r1);
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

bool is_blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#')
            return true;
        if (!std::isspace(static_cast<unsigned char>(c)))
            return false;
    }
    return true;
}

double parse_number(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos != s.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error(context + ": cannot parse number '" + s + "'");
    }
}

}  // namespace

DiscountCurve::DiscountCurve(std::vector<std::pair<double, double>> pillars)
    : pillars_(std::move(pillars)) {
    check_pillars(pillars_, "DiscountCurve");
}

DiscountCurve DiscountCurve::flat(double zero_rate) {
    return DiscountCurve({{1.0, zero_rate}});
}

double DiscountCurve::zero_rate(double t) const {
    if (t < 0.0)
        throw std::domain_error("DiscountCurve: negative time");
    return interp_rate(pillars_, t);
}

double DiscountCurve::log_discount(double t) const { return -zero_rate(t) * t; }

double DiscountCurve::discount_factor(double t) const { return std::exp(log_discount(t)); }

double DiscountCurve::forward_discount(double t1, double t2) const {
    return std::exp(log_discount(t2) - log_discount(t1));
}

double DiscountCurve::forward_simple_rate(double t1, double t2, double accrual) const {
    if (t1 < 0.0 || t1 >= t2)
        throw std::domain_error("forward_simple_rate: need 0 <= t1 < t2");
    if (accrual <= 0.0)
        throw std::domain_error("forward_simple_rate: accrual must be positive");
    return (1.0 / forward_discount(t1, t2) - 1.0) / accrual;
}

DividendCurve::DividendCurve(std::vector<std::pair<double, double>> pillars)
    : pillars_(std::move(pillars)) {
    check_pillars(pillars_, "DividendCurve");
}

DividendCurve DividendCurve::flat(double yield) {
    return DividendCurve({{1.0, yield}});
}

double DividendCurve::yield(double t) const {
    if (t < 0.0)
        throw std::domain_error("DividendCurve: negative time");
    return interp_rate(pillars_, t);
}

double DividendCurve::cumulative_yield(double t) const { return yield(t) * t; }

void CdsQuote::validate() const {
    if (tenor <= 0.0)
        throw std::invalid_argument("CdsQuote: tenor must be positive");
    if (bid_bps < 0.0 || ask_bps < 0.0 || mid_bps < 0.0)
        throw std::invalid_argument("CdsQuote: negative rate");
    if (bid_bps > mid_bps || mid_bps > ask_bps)
        throw std::invalid_argument("CdsQuote: need bid <= mid <= ask");
    if (recovery < 0.0 || recovery >= 1.0)
        throw std::invalid_argument("CdsQuote: recovery must be in [0,1)");
    if (frequency != 1 && frequency != 2 && frequency != 4 && frequency != 12)
        throw std::invalid_argument("CdsQuote: unsupported payment frequency");
}

double PaymentSchedule::previous_date(double t) const {
    double prev = start;
    for (double d : dates) {
        if (d > t)
            break;
        prev = d;
    }
    return prev;
}

std::size_t PaymentSchedule::first_date_after(double t) const {
    return static_cast<std::size_t>(
        std::upper_bound(dates.begin(), dates.end(), t) - dates.begin());
}

PaymentSchedule build_schedule(double start, double maturity, int frequency) {
    if (maturity <= start)
        throw std::domain_error("build_schedule: maturity must exceed start");
    if (frequency != 1 && frequency != 2 && frequency != 4 && frequency != 12)
        throw std::domain_error("build_schedule: frequency must be 1, 2, 4 or 12");

    const double step = 1.0 / frequency;
    PaymentSchedule s;
    s.start = start;
    double prev = start;
    for (int i = 1;; ++i) {
        double d = start + i * step;
        if (d > maturity - 1e-12) {
            // Short final stub absorbs any remainder.
            if (maturity - prev > 1e-12) {
                s.dates.push_back(maturity);
                s.accruals.push_back(maturity - prev);
            }
            break;
        }
        s.dates.push_back(d);
        s.accruals.push_back(d - prev);
        prev = d;
    }
    return s;
}

std::vector<CdsQuote> load_quotes(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_quotes: cannot open '" + path + "'");

    std::vector<CdsQuote> quotes;
    std::string line;
    int row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (is_blank_or_comment(line))
            continue;
        if (!header_seen) {
            header_seen = true;  // header row: tenor_years,bid_bps,ask_bps,mid_bps,recovery
            continue;
        }
        auto cells = split_csv_row(line);
        const std::string ctx = "load_quotes: " + path + " row " + std::to_string(row);
        if (cells.size() != 5)
            throw std::runtime_error(ctx + ": expected 5 columns, got " +
                                     std::to_string(cells.size()));
        CdsQuote q;
        q.tenor = parse_number(cells[0], ctx);
        q.bid_bps = parse_number(cells[1], ctx);
        q.ask_bps = parse_number(cells[2], ctx);
        q.mid_bps = parse_number(cells[3], ctx);
        q.recovery = parse_number(cells[4], ctx);
        try {
            q.validate();
        } catch (const std::exception& e) {
            throw std::runtime_error(ctx + ": " + e.what());
        }
        quotes.push_back(q);
    }
    if (quotes.empty())
        std::cerr << "warning: no quotes in '" << path << "'\n";
    std::sort(quotes.begin(), quotes.end(),
              [](const CdsQuote& a, const CdsQuote& b) { return a.tenor < b.tenor; });
    for (std::size_t i = 1; i < quotes.size(); ++i)
        if (quotes[i].tenor == quotes[i - 1].tenor)
            throw std::runtime_error("load_quotes: " + path + ": duplicate tenor " +
                                     std::to_string(quotes[i].tenor));
    return quotes;
}

void save_quotes(const std::vector<CdsQuote>& quotes, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_quotes: cannot open '" + path + "'");
    out << "tenor_years,bid_bps,ask_bps,mid_bps,recovery\n";
    out << std::setprecision(17);
    for (const auto& q : quotes)
        out << q.tenor << ',' << q.bid_bps << ',' << q.ask_bps << ','
            << q.mid_bps << ',' << q.recovery << '\n';
}

DiscountCurve load_discount_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_discount_curve: cannot open '" + path + "'");

    std::vector<std::pair<double, double>> pillars;
    std::string line;
    int row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (is_blank_or_comment(line))
            continue;
        if (!header_seen) {
            header_seen = true;  // header row: time_years,zero_rate
            continue;
        }
        auto cells = split_csv_row(line);
        const std::string ctx =
            "load_discount_curve: " + path + " row " + std::to_string(row);
        if (cells.size() != 2)
            throw std::runtime_error(ctx + ": expected 2 columns");
        pillars.emplace_back(parse_number(cells[0], ctx), parse_number(cells[1], ctx));
    }
    if (pillars.empty())
        throw std::runtime_error("load_discount_curve: " + path + ": no pillars");
    return DiscountCurve(std::move(pillars));
}

void save_discount_curve(const DiscountCurve& curve, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_discount_curve: cannot open '" + path + "'");
    out << "time_years,zero_rate\n";
    out << std::setprecision(17);
    for (const auto& [t, z] : curve.pillars())
        out << t << ',' << z << '\n';
}

}  // namespace fpc
