#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fpc/calibration.hpp"
#include "fpc/cds_pricer.hpp"
#include "fpc/ers_mc.hpp"
#include "fpc/hazard.hpp"
#include "fpc/market_data.hpp"
#include "fpc/params_io.hpp"
#include "fpc/survival.hpp"

namespace py = pybind11;
using namespace fpc;

PYBIND11_MODULE(_fpc, m) {
    m.doc() = "first-passage structural credit model core";

    py::register_exception<CalibrationError>(m, "CalibrationError");

    py::class_<DiscountCurve>(m, "DiscountCurve")
        .def(py::init<std::vector<std::pair<double, double>>>(), py::arg("pillars"))
        .def_static("flat", &DiscountCurve::flat, py::arg("zero_rate"))
        .def("zero_rate", &DiscountCurve::zero_rate)
        .def("discount_factor", &DiscountCurve::discount_factor)
        .def("log_discount", &DiscountCurve::log_discount)
        .def("forward_discount", &DiscountCurve::forward_discount)
        .def_property_readonly("pillars", &DiscountCurve::pillars);

    py::class_<DividendCurve>(m, "DividendCurve")
        .def(py::init<std::vector<std::pair<double, double>>>(), py::arg("pillars"))
        .def_static("flat", &DividendCurve::flat, py::arg("yield"))
        .def("yield_at", &DividendCurve::yield)
        .def("cumulative_yield", &DividendCurve::cumulative_yield);

    py::class_<CdsQuote>(m, "CdsQuote")
        .def(py::init([](double tenor, double bid, double ask, double mid,
                         double recovery, int frequency) {
                 CdsQuote q{tenor, bid, ask, mid, recovery, frequency};
                 q.validate();
                 return q;
             }),
             py::arg("tenor"), py::arg("bid_bps"), py::arg("ask_bps"),
             py::arg("mid_bps"), py::arg("recovery") = 0.4, py::arg("frequency") = 4)
        .def_readwrite("tenor", &CdsQuote::tenor)
        .def_readwrite("bid_bps", &CdsQuote::bid_bps)
        .def_readwrite("ask_bps", &CdsQuote::ask_bps)
        .def_readwrite("mid_bps", &CdsQuote::mid_bps)
        .def_readwrite("recovery", &CdsQuote::recovery)
        .def_readwrite("frequency", &CdsQuote::frequency)
        .def("lgd", &CdsQuote::lgd);

    py::class_<PaymentSchedule>(m, "PaymentSchedule")
        .def_readonly("start", &PaymentSchedule::start)
        .def_readonly("dates", &PaymentSchedule::dates)
        .def_readonly("accruals", &PaymentSchedule::accruals)
        .def("maturity", &PaymentSchedule::maturity);
    m.def("build_schedule", &build_schedule, py::arg("start"), py::arg("maturity"),
          py::arg("frequency"));

    py::class_<PiecewiseVol>(m, "PiecewiseVol")
        .def(py::init([](std::vector<double> breaks, std::vector<double> sigmas) {
                 PiecewiseVol v{std::move(breaks), std::move(sigmas)};
                 v.validate();
                 return v;
             }),
             py::arg("breaks"), py::arg("sigmas"))
        .def_static("constant", &PiecewiseVol::constant, py::arg("sigma"))
        .def_readonly("breaks", &PiecewiseVol::breaks)
        .def_readonly("sigmas", &PiecewiseVol::sigmas)
        .def("at", &PiecewiseVol::at);

    py::class_<FirmDynamics>(m, "FirmDynamics")
        .def(py::init([](double h_ratio, double beta, PiecewiseVol vol) {
                 FirmDynamics f{h_ratio, beta, std::move(vol)};
                 f.validate();
                 return f;
             }),
             py::arg("h_ratio"), py::arg("beta"), py::arg("vol"))
        .def_readwrite("h_ratio", &FirmDynamics::h_ratio)
        .def_readwrite("beta", &FirmDynamics::beta)
        .def_readwrite("vol", &FirmDynamics::vol);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init([](FirmDynamics firm, double probability) {
                 return Scenario{std::move(firm), probability};
             }),
             py::arg("firm"), py::arg("probability"))
        .def_readwrite("firm", &Scenario::firm)
        .def_readwrite("probability", &Scenario::probability);

    py::class_<ScenarioSet>(m, "ScenarioSet")
        .def(py::init([](std::vector<Scenario> scenarios) {
                 ScenarioSet s{std::move(scenarios)};
                 s.validate();
                 return s;
             }),
             py::arg("scenarios"))
        .def_readwrite("scenarios", &ScenarioSet::scenarios)
        .def_static("single", &ScenarioSet::single, py::arg("firm"))
        .def("expected_barrier", &ScenarioSet::expected_barrier);

    m.def("survival_probability", &survival_probability, py::arg("firm"), py::arg("t"));
    m.def("mixture_survival", &mixture_survival, py::arg("scenarios"), py::arg("t"));
    m.def("integrated_variance", &integrated_variance, py::arg("firm"), py::arg("t"));
    m.def("barrier_level", &barrier_level, py::arg("firm"), py::arg("discount"),
          py::arg("dividends"), py::arg("t"));

    py::class_<SurvivalCurve>(m, "SurvivalCurve")
        .def_readonly("times", &SurvivalCurve::times)
        .def_readonly("values", &SurvivalCurve::values)
        .def("__call__", [](const SurvivalCurve& c, double t) { return c(t); });
    m.def(
        "survival_grid",
        [](const ScenarioSet& s, double horizon, double step) {
            return survival_grid(s, horizon, step);
        },
        py::arg("scenarios"), py::arg("horizon"), py::arg("step") = kDefaultGridStep);

    py::class_<HazardCurve>(m, "HazardCurve")
        .def(py::init([](std::vector<double> times, std::vector<double> intensities) {
                 HazardCurve h{std::move(times), std::move(intensities)};
                 h.validate();
                 return h;
             }),
             py::arg("times"), py::arg("intensities"))
        .def_readonly("times", &HazardCurve::times)
        .def_readonly("intensities", &HazardCurve::intensities)
        .def("intensity", &HazardCurve::intensity)
        .def("cumulative", &HazardCurve::cumulative);
    m.def("hazard_survival", &hazard_survival, py::arg("curve"), py::arg("t"));
    m.def("hazard_survival_grid", &hazard_survival_grid, py::arg("curve"),
          py::arg("horizon"), py::arg("step") = kDefaultGridStep);
    m.def("strip_hazard", &strip_hazard, py::arg("quotes"), py::arg("discount"));

    py::class_<CdsPricingResult>(m, "CdsPricingResult")
        .def_readonly("pv", &CdsPricingResult::pv)
        .def_readonly("premium_leg", &CdsPricingResult::premium_leg)
        .def_readonly("accrual_on_default_leg", &CdsPricingResult::accrual_on_default_leg)
        .def_readonly("protection_leg", &CdsPricingResult::protection_leg)
        .def_readonly("fair_spread", &CdsPricingResult::fair_spread);
    m.def("cds_pv", &cds_pv, py::arg("schedule"), py::arg("rate_bps"), py::arg("lgd"),
          py::arg("survival"), py::arg("discount"));
    m.def("fair_spread", &fair_spread, py::arg("schedule"), py::arg("lgd"),
          py::arg("survival"), py::arg("discount"));
    m.def("scenario_cds_pv", &scenario_cds_pv, py::arg("schedule"), py::arg("rate_bps"),
          py::arg("lgd"), py::arg("scenarios"), py::arg("discount"),
          py::arg("grid_step") = kDefaultGridStep);

    py::class_<CalibrationConfig>(m, "CalibrationConfig")
        .def(py::init<>())
        .def_readwrite("beta", &CalibrationConfig::beta)
        .def_readwrite("fixed_h", &CalibrationConfig::fixed_h)
        .def_readwrite("scenario_count", &CalibrationConfig::scenario_count)
        .def_readwrite("common_sigma", &CalibrationConfig::common_sigma)
        .def_readwrite("weights", &CalibrationConfig::weights)
        .def_readwrite("multistart_count", &CalibrationConfig::multistart_count)
        .def_readwrite("max_iterations", &CalibrationConfig::max_iterations)
        .def_readwrite("tolerance", &CalibrationConfig::tolerance);

    py::class_<CalibrationReport>(m, "CalibrationReport")
        .def_readonly("scenarios", &CalibrationReport::scenarios)
        .def_readonly("objective_bps2", &CalibrationReport::objective_bps2)
        .def_readonly("objective_unweighted_bps2",
                      &CalibrationReport::objective_unweighted_bps2)
        .def_readonly("residuals_bps", &CalibrationReport::residuals_bps)
        .def_readonly("in_window", &CalibrationReport::in_window)
        .def_readonly("expected_barrier", &CalibrationReport::expected_barrier)
        .def_readonly("converged", &CalibrationReport::converged);

    py::class_<KernelResult>(m, "KernelResult")
        .def_readonly("free_barrier", &KernelResult::free_barrier)
        .def_readonly("scenarios", &KernelResult::scenarios)
        .def_readonly("residual_norm", &KernelResult::residual_norm);

    m.def("calibrate_at1p_cascade", &calibrate_at1p_cascade, py::arg("quotes"),
          py::arg("h_ratio"), py::arg("beta"), py::arg("discount"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sbat1p_kernel_calibrate", &sbat1p_kernel_calibrate, py::arg("quotes"),
          py::arg("config"), py::arg("discount"),
          py::call_guard<py::gil_scoped_release>());
    m.def("sbat1p_optimize", &sbat1p_optimize, py::arg("quotes"), py::arg("config"),
          py::arg("discount"), py::call_guard<py::gil_scoped_release>());
    m.def("svbat1p_optimize", &svbat1p_optimize, py::arg("quotes"), py::arg("config"),
          py::arg("discount"), py::call_guard<py::gil_scoped_release>());
    m.def("residual_report", &residual_report, py::arg("scenarios"), py::arg("quotes"),
          py::arg("discount"), py::arg("weights") = std::vector<double>{});

    py::class_<ErsContract>(m, "ErsContract")
        .def(py::init<>())
        .def_readwrite("stock_count", &ErsContract::stock_count)
        .def_readwrite("s0", &ErsContract::s0)
        .def_readwrite("spread_bps", &ErsContract::spread_bps)
        .def_readwrite("schedule", &ErsContract::schedule)
        .def_readwrite("counterparty_recovery", &ErsContract::counterparty_recovery)
        .def("maturity", &ErsContract::maturity);

    py::class_<EquityDynamics>(m, "EquityDynamics")
        .def(py::init<>())
        .def_readwrite("s0", &EquityDynamics::s0)
        .def_readwrite("sigma", &EquityDynamics::sigma)
        .def_readwrite("dividend_yield", &EquityDynamics::dividend_yield);

    py::class_<McConfig>(m, "McConfig")
        .def(py::init<>())
        .def_readwrite("paths", &McConfig::paths)
        .def_readwrite("steps_per_year", &McConfig::steps_per_year)
        .def_readwrite("seed", &McConfig::seed)
        .def_readwrite("rho", &McConfig::rho)
        .def_readwrite("control_variate", &McConfig::control_variate)
        .def_readwrite("brownian_bridge", &McConfig::brownian_bridge)
        .def_readwrite("threads", &McConfig::threads);

    py::class_<McEstimate>(m, "McEstimate")
        .def_readonly("value", &McEstimate::value)
        .def_readonly("std_error", &McEstimate::std_error)
        .def_readonly("paths_used", &McEstimate::paths_used)
        .def_readonly("cv_beta", &McEstimate::cv_beta);

    m.def("npv_at_default", &npv_at_default, py::arg("contract"), py::arg("equity"),
          py::arg("discount"), py::arg("default_time"), py::arg("equity_at_default"));
    m.def("ers_price", &ers_price, py::arg("contract"), py::arg("scenarios"),
          py::arg("equity"), py::arg("discount"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("fair_ers_spread", &fair_ers_spread, py::arg("contract"), py::arg("scenarios"),
          py::arg("equity"), py::arg("discount"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<ModelParams>(m, "ModelParams")
        .def(py::init<>())
        .def_readwrite("model", &ModelParams::model)
        .def_readwrite("beta", &ModelParams::beta)
        .def_readwrite("horizon", &ModelParams::horizon)
        .def_readwrite("scenarios", &ModelParams::scenarios)
        .def_readwrite("hazard", &ModelParams::hazard)
        .def("survival", &ModelParams::survival, py::arg("horizon"),
             py::arg("step") = kDefaultGridStep);
    m.def("load_model_params", &load_model_params, py::arg("path"));
    m.def("save_model_params", &save_model_params, py::arg("params"), py::arg("path"));
    m.def("model_params_to_json", &model_params_to_json, py::arg("params"));
    m.def("model_params_from_json", &model_params_from_json, py::arg("text"));

    m.def("load_quotes", &load_quotes, py::arg("path"));
    m.def("save_quotes", &save_quotes, py::arg("quotes"), py::arg("path"));
    m.def("load_discount_curve", &load_discount_curve, py::arg("path"));
    m.def("save_discount_curve", &save_discount_curve, py::arg("curve"), py::arg("path"));
}
