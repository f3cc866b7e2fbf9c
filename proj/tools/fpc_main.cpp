// fpc: first-passage structural credit model toolkit.
//
// Subcommands:
//   calibrate  fit model parameters to CDS quotes, emit a JSON report
//   survival   evaluate a calibrated survival curve (or two curves' difference)
//   price-cds  reprice quotes under calibrated parameters, bid/mid/ask PVs
//   ers        equity return swap counterparty charge / fair spread by MC
//
// Exit codes: 0 success, 1 input or parse error, 2 numerical non-convergence.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpc/calibration.hpp"
#include "fpc/cds_pricer.hpp"
#include "fpc/ers_mc.hpp"
#include "fpc/hazard.hpp"
#include "fpc/market_data.hpp"
#include "fpc/params_io.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConvergence = 2;

std::vector<double> parse_number_list(const std::string& text, const char* flag) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw std::runtime_error(std::string(flag) + ": cannot parse number '" +
                                     cell + "'");
        }
    }
    if (out.empty())
        throw std::runtime_error(std::string(flag) + ": empty list");
    return out;
}

std::vector<double> resolve_weights(const std::string& mode,
                                    const std::vector<fpc::CdsQuote>& quotes) {
    if (mode == "none" || mode.empty())
        return {};
    if (mode == "bidask") {
        std::vector<double> w;
        for (const auto& q : quotes) {
            const double width = q.ask_bps - q.bid_bps;
            if (width <= 0.0)
                throw std::runtime_error("--weights bidask: zero bid/ask width at tenor " +
                                         std::to_string(q.tenor));
            w.push_back(1.0 / width);
        }
        return w;
    }
    if (mode.rfind("file:", 0) == 0) {
        std::ifstream in(mode.substr(5));
        if (!in)
            throw std::runtime_error("--weights: cannot open '" + mode.substr(5) + "'");
        std::vector<double> w;
        double v;
        while (in >> v)
            w.push_back(v);
        if (w.size() != quotes.size())
            throw std::runtime_error("--weights: expected " +
                                     std::to_string(quotes.size()) + " values");
        return w;
    }
    throw std::runtime_error("--weights: expected none, bidask or file:<path>");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

double max_tenor(const std::vector<fpc::CdsQuote>& quotes) {
    double t = 0.0;
    for (const auto& q : quotes)
        t = std::max(t, q.tenor);
    return t;
}

// ---- calibrate ----

struct CalibrateArgs {
    std::string quotes_path, curve_path, out_path = "-";
    std::string model = "at1p", weights_mode = "none", method = "auto";
    double beta = 0.5, h = 0.4;
    int scenarios = 2;
    std::optional<double> sigma;
    std::string fixed_h_list;
    double grid_step = fpc::kDefaultGridStep;
};

void print_scenario_table(const fpc::ScenarioSet& set) {
    std::printf("%-10s %-12s %s\n", "barrier", "probability", "sigma(t)");
    for (const auto& s : set.scenarios) {
        std::string vol;
        for (std::size_t k = 0; k < s.firm.vol.sigmas.size(); ++k) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%s%.4g%%@%gy", k ? " " : "",
                          s.firm.vol.sigmas[k] * 100.0, s.firm.vol.breaks[k]);
            vol += buf;
        }
        std::printf("%-10.6f %-12.6f %s\n", s.firm.h_ratio, s.probability, vol.c_str());
    }
}

void print_residual_table(const std::vector<fpc::CdsQuote>& quotes,
                          const fpc::CalibrationReport& report) {
    std::printf("%-8s %-12s %s\n", "tenor", "pv_mid_bps", "in_window");
    for (std::size_t i = 0; i < quotes.size(); ++i)
        std::printf("%-8g %-12.4f %s\n", quotes[i].tenor, report.residuals_bps[i],
                    report.in_window[i] ? "yes" : "no");
    std::printf("objective: %.6g bps^2 (unweighted %.6g)\n", report.objective_bps2,
                report.objective_unweighted_bps2);
}

int cmd_calibrate(const CalibrateArgs& args) {
    const auto quotes = fpc::load_quotes(args.quotes_path);
    if (quotes.empty())
        throw std::runtime_error("calibrate: no quotes in '" + args.quotes_path + "'");
    const auto discount = fpc::load_discount_curve(args.curve_path);

    fpc::ModelParams params;
    params.model = args.model;
    params.beta = args.beta;
    params.horizon = max_tenor(quotes);
    fpc::CalibrationReport report;

    if (args.model == "hazard") {
        params.hazard = fpc::strip_hazard(quotes, discount);
        const auto curve =
            fpc::hazard_survival_grid(params.hazard, params.horizon, args.grid_step);
        report.residuals_bps.assign(quotes.size(), 0.0);
        report.in_window.assign(quotes.size(), true);
        for (std::size_t i = 0; i < quotes.size(); ++i) {
            const auto sched = fpc::build_schedule(0.0, quotes[i].tenor, quotes[i].frequency);
            report.residuals_bps[i] =
                fpc::cds_pv(sched, quotes[i].mid_bps, quotes[i].lgd(), curve, discount).pv;
        }
        std::printf("model: hazard (piecewise-linear intensity)\n");
        std::printf("%-8s %s\n", "tenor", "intensity");
        for (std::size_t i = 0; i < params.hazard.times.size(); ++i)
            std::printf("%-8g %.6f\n", params.hazard.times[i],
                        params.hazard.intensities[i]);
    } else if (args.model == "at1p") {
        const auto firm =
            fpc::calibrate_at1p_cascade(quotes, args.h, args.beta, discount);
        params.scenarios.scenarios = {{firm, 1.0}};
        report = fpc::residual_report(params.scenarios, quotes, discount);
        std::printf("model: at1p (h=%g, beta=%g)\n", args.h, args.beta);
        print_scenario_table(params.scenarios);
        print_residual_table(quotes, report);
    } else if (args.model == "sbat1p" || args.model == "svbat1p") {
        fpc::CalibrationConfig config;
        config.beta = args.beta;
        config.scenario_count = args.scenarios;
        config.common_sigma = args.sigma;
        config.weights = resolve_weights(args.weights_mode, quotes);
        if (!args.fixed_h_list.empty())
            config.fixed_h = parse_number_list(args.fixed_h_list, "--fixed-h");

        const bool use_kernel =
            args.model == "sbat1p" &&
            (args.method == "kernel" || (args.method == "auto" && !config.fixed_h.empty()));
        if (args.method == "kernel" && args.model != "sbat1p")
            throw std::runtime_error("--method kernel only applies to --model sbat1p");

        if (use_kernel) {
            if (config.fixed_h.empty())
                throw std::runtime_error("--method kernel requires --fixed-h");
            const auto kr = fpc::sbat1p_kernel_calibrate(quotes, config, discount);
            params.scenarios = kr.scenarios;
            report = fpc::residual_report(params.scenarios, quotes, discount,
                                          config.weights);
            std::printf("model: sbat1p kernel (free barrier %.6f, residual %.3g)\n",
                        kr.free_barrier, kr.residual_norm);
        } else if (args.model == "sbat1p") {
            report = fpc::sbat1p_optimize(quotes, config, discount);
            params.scenarios = report.scenarios;
            std::printf("model: sbat1p least squares (%d scenarios)\n", args.scenarios);
        } else {
            report = fpc::svbat1p_optimize(quotes, config, discount);
            params.scenarios = report.scenarios;
            std::printf("model: svbat1p least squares (%d scenarios)\n", args.scenarios);
        }
        print_scenario_table(params.scenarios);
        print_residual_table(quotes, report);
        std::printf("expected barrier: %.6f\n", report.expected_barrier);
    } else {
        throw std::runtime_error("calibrate: unknown model '" + args.model + "'");
    }

    write_text(args.out_path, fpc::report_to_json(params, report) + "\n");
    if (!report.converged) {
        std::cerr << "calibrate: optimizer did not converge\n";
        return kExitNonConvergence;
    }
    return kExitOk;
}

// ---- survival ----

struct SurvivalArgs {
    std::string params_path, diff_path, out_path = "-";
    double horizon = 10.0;
    double step = 1.0 / 12.0;
};

int cmd_survival(const SurvivalArgs& args) {
    const auto params = fpc::load_model_params(args.params_path);
    const auto curve = params.survival(args.horizon, args.step);

    std::ostringstream out;
    out.precision(12);
    if (args.diff_path.empty()) {
        out << "time_years,survival\n";
        for (std::size_t i = 0; i < curve.times.size(); ++i)
            out << curve.times[i] << ',' << curve.values[i] << '\n';
    } else {
        const auto other = fpc::load_model_params(args.diff_path);
        const auto other_curve = other.survival(args.horizon, args.step);
        out << "time_years,survival_difference\n";
        for (std::size_t i = 0; i < curve.times.size(); ++i)
            out << curve.times[i] << ',' << curve.values[i] - other_curve.values[i]
                << '\n';
    }
    write_text(args.out_path, out.str());
    return kExitOk;
}

// ---- price-cds ----

struct PriceCdsArgs {
    std::string params_path, quotes_path, curve_path, out_path;
    double grid_step = fpc::kDefaultGridStep;
};

int cmd_price_cds(const PriceCdsArgs& args) {
    const auto params = fpc::load_model_params(args.params_path);
    const auto quotes = fpc::load_quotes(args.quotes_path);
    const auto discount = fpc::load_discount_curve(args.curve_path);

    json rows = json::array();
    std::printf("protection-buyer PV in bps of notional (positive favours the buyer)\n");
    std::printf("%-8s %-12s %-12s %-12s %s\n", "tenor", "pv_bid", "pv_mid", "pv_ask",
                "in_window");
    for (const auto& q : quotes) {
        const auto curve = params.survival(q.tenor, args.grid_step);
        const auto sched = fpc::build_schedule(0.0, q.tenor, q.frequency);
        const double pv_bid = fpc::cds_pv(sched, q.bid_bps, q.lgd(), curve, discount).pv;
        const double pv_mid = fpc::cds_pv(sched, q.mid_bps, q.lgd(), curve, discount).pv;
        const double pv_ask = fpc::cds_pv(sched, q.ask_bps, q.lgd(), curve, discount).pv;
        // Buyer PV falls in the quoted rate; inside the window means the mid
        // PV sits between the PVs at ask and bid.
        const bool in_window = pv_mid <= pv_bid + 1e-12 && pv_mid >= pv_ask - 1e-12 &&
                               pv_bid >= -1e-12 && pv_ask <= 1e-12;
        std::printf("%-8g %-12.4f %-12.4f %-12.4f %s\n", q.tenor, pv_bid, pv_mid, pv_ask,
                    in_window ? "yes" : "no");
        rows.push_back({{"tenor", q.tenor},
                        {"pv_bid_bps", pv_bid},
                        {"pv_mid_bps", pv_mid},
                        {"pv_ask_bps", pv_ask},
                        {"in_window", in_window}});
    }
    if (!args.out_path.empty())
        write_text(args.out_path, rows.dump(2) + "\n");
    return kExitOk;
}

// ---- ers ----

struct ErsArgs {
    std::string params_path, curve_path, config_path, out_path = "-";
    std::string rho_list = "0";
    bool fair_spread = false;
    bool price = false;
    double spread_bps = 0.0;
    std::size_t paths = 200000;
    int steps = 250;
    std::uint64_t seed = 20040310;
    bool no_control_variate = false;
};

int cmd_ers(const ErsArgs& args) {
    const auto params = fpc::load_model_params(args.params_path);
    if (params.is_hazard())
        throw std::runtime_error("ers: needs structural (scenario) parameters");
    const auto discount = fpc::load_discount_curve(args.curve_path);

    std::ifstream cfg_in(args.config_path);
    if (!cfg_in)
        throw std::runtime_error("ers: cannot open config '" + args.config_path + "'");
    json cfg = json::parse(cfg_in);
    for (const auto& [key, value] : cfg.items())
        if (key != "equity" && key != "contract")
            throw std::runtime_error("ers config: unknown key '" + key + "'");

    fpc::EquityDynamics equity;
    const json& je = cfg.at("equity");
    for (const auto& [key, value] : je.items())
        if (key != "s0" && key != "sigma" && key != "dividend_yield")
            throw std::runtime_error("ers config equity: unknown key '" + key + "'");
    je.at("s0").get_to(equity.s0);
    je.at("sigma").get_to(equity.sigma);
    je.at("dividend_yield").get_to(equity.dividend_yield);

    fpc::ErsContract contract;
    const json& jc = cfg.at("contract");
    for (const auto& [key, value] : jc.items())
        if (key != "stock_count" && key != "maturity" && key != "frequency" &&
            key != "counterparty_recovery")
            throw std::runtime_error("ers config contract: unknown key '" + key + "'");
    jc.at("stock_count").get_to(contract.stock_count);
    contract.s0 = equity.s0;
    const double maturity = jc.at("maturity").get<double>();
    const int frequency = jc.value("frequency", 2);
    contract.schedule = fpc::build_schedule(0.0, maturity, frequency);
    contract.counterparty_recovery = jc.value("counterparty_recovery", 0.4);
    contract.spread_bps = args.spread_bps;

    fpc::McConfig mc;
    mc.paths = args.paths;
    mc.steps_per_year = args.steps;
    mc.seed = args.seed;
    mc.control_variate = !args.no_control_variate;

    json out;
    out["seed"] = args.seed;
    out["paths"] = args.paths;
    out["steps_per_year"] = args.steps;
    out["config_echo"] = cfg;

    if (args.fair_spread == args.price)
        throw std::runtime_error("ers: pass exactly one of --fair-spread / --price");

    const auto rhos = parse_number_list(args.rho_list, "--rho");
    if (args.fair_spread) {
        json list = json::array();
        for (double rho : rhos) {
            mc.rho = rho;
            const double x =
                fpc::fair_ers_spread(contract, params.scenarios, equity, discount, mc);
            list.push_back({{"rho", rho}, {"fair_spread_bps", x}});
            std::printf("rho=%+.2f fair spread X = %.4f bps\n", rho, x);
        }
        out["fair_spreads"] = list;
    } else {
        if (rhos.size() != 1)
            throw std::runtime_error("ers --price: pass a single --rho");
        mc.rho = rhos[0];
        const auto est =
            fpc::ers_price(contract, params.scenarios, equity, discount, mc);
        out["rho"] = mc.rho;
        out["spread_bps"] = args.spread_bps;
        out["value_bps"] = est.value;
        out["std_error_bps"] = est.std_error;
        out["cv_beta"] = est.cv_beta;
        std::printf("rho=%+.2f X=%.2f bps: value = %.4f bps (se %.4f, cv beta %.3f)\n",
                    mc.rho, args.spread_bps, est.value, est.std_error, est.cv_beta);
    }
    write_text(args.out_path, out.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"first-passage structural credit model toolkit"};
    // --h is a model flag, so help is long-form only.
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CalibrateArgs cal;
    auto* c = app.add_subcommand("calibrate", "fit model parameters to CDS quotes");
    c->set_help_flag("--help", "print help");
    c->add_option("--quotes", cal.quotes_path, "CDS quote CSV")->required();
    c->add_option("--curve", cal.curve_path, "zero-rate curve CSV")->required();
    c->add_option("--model", cal.model, "at1p|sbat1p|svbat1p|hazard");
    c->add_option("--beta", cal.beta, "drift offset parameter");
    c->add_option("--h", cal.h, "at1p barrier ratio H/V0");
    c->add_option("--scenarios", cal.scenarios, "scenario count");
    c->add_option("--sigma", cal.sigma, "common constant volatility");
    c->add_option("--fixed-h", cal.fixed_h_list, "comma list of fixed barriers (kernel)");
    c->add_option("--method", cal.method, "auto|kernel|lsq (sbat1p only)");
    c->add_option("--weights", cal.weights_mode, "none|bidask|file:<path>");
    c->add_option("--grid-step", cal.grid_step, "survival grid step in years");
    c->add_option("--out", cal.out_path, "JSON report path ('-' for stdout)");

    SurvivalArgs sur;
    auto* s = app.add_subcommand("survival", "emit a survival curve CSV");
    s->add_option("--params", sur.params_path, "calibrated parameter JSON")->required();
    s->add_option("--diff", sur.diff_path, "second parameter JSON to subtract");
    s->add_option("--horizon", sur.horizon, "grid horizon in years");
    s->add_option("--step", sur.step, "grid step in years");
    s->add_option("--out", sur.out_path, "CSV path ('-' for stdout)");

    PriceCdsArgs pc;
    auto* p = app.add_subcommand("price-cds", "reprice quotes under parameters");
    p->add_option("--params", pc.params_path, "calibrated parameter JSON")->required();
    p->add_option("--quotes", pc.quotes_path, "CDS quote CSV")->required();
    p->add_option("--curve", pc.curve_path, "zero-rate curve CSV")->required();
    p->add_option("--grid-step", pc.grid_step, "survival grid step in years");
    p->add_option("--out", pc.out_path, "optional JSON output path");

    ErsArgs ers;
    auto* e = app.add_subcommand("ers", "equity return swap counterparty pricing");
    e->add_option("--params", ers.params_path, "calibrated parameter JSON")->required();
    e->add_option("--curve", ers.curve_path, "zero-rate curve CSV")->required();
    e->add_option("--config", ers.config_path, "equity/contract JSON config")->required();
    e->add_flag("--fair-spread", ers.fair_spread, "solve for the fair spread X");
    e->add_flag("--price", ers.price, "price at a given --spread");
    e->add_option("--spread", ers.spread_bps, "running spread X in bps");
    e->add_option("--rho", ers.rho_list, "correlation(s), comma separated");
    e->add_option("--paths", ers.paths, "Monte Carlo paths");
    e->add_option("--steps", ers.steps, "time steps per year");
    e->add_option("--seed", ers.seed, "RNG seed");
    e->add_flag("--no-control-variate", ers.no_control_variate, "disable the CV");
    e->add_option("--out", ers.out_path, "JSON output path ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c)
            return cmd_calibrate(cal);
        if (*s)
            return cmd_survival(sur);
        if (*p)
            return cmd_price_cds(pc);
        if (*e)
            return cmd_ers(ers);
    } catch (const fpc::CalibrationError& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitNonConvergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
