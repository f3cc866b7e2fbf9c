#include "fpc/params_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fpc {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key))
            throw std::runtime_error(where + ": unknown key '" + key + "'");
}

json vol_to_json(const PiecewiseVol& vol) {
    return json{{"breaks", vol.breaks}, {"sigmas", vol.sigmas}};
}

PiecewiseVol vol_from_json(const json& j) {
    reject_unknown_keys(j, {"breaks", "sigmas"}, "vol");
    PiecewiseVol vol;
    j.at("breaks").get_to(vol.breaks);
    j.at("sigmas").get_to(vol.sigmas);
    return vol;
}

json scenario_to_json(const Scenario& s) {
    return json{{"h_ratio", s.firm.h_ratio},
                {"probability", s.probability},
                {"vol", vol_to_json(s.firm.vol)}};
}

json params_to_json_obj(const ModelParams& params) {
    json j;
    j["model"] = params.model;
    j["horizon"] = params.horizon;
    if (params.is_hazard()) {
        j["times"] = params.hazard.times;
        j["intensities"] = params.hazard.intensities;
        return j;
    }
    j["beta"] = params.beta;
    j["scenarios"] = json::array();
    for (const auto& s : params.scenarios.scenarios)
        j["scenarios"].push_back(scenario_to_json(s));
    return j;
}

ModelParams params_from_json_obj(const json& j) {
    ModelParams params;
    j.at("model").get_to(params.model);
    if (j.contains("horizon"))
        j.at("horizon").get_to(params.horizon);
    if (params.model == "hazard") {
        reject_unknown_keys(j,
                            {"model", "horizon", "times", "intensities",
                             "objective_bps2", "objective_unweighted_bps2",
                             "residuals_bps", "in_window", "expected_barrier",
                             "converged"},
                            "params");
        j.at("times").get_to(params.hazard.times);
        j.at("intensities").get_to(params.hazard.intensities);
        params.validate();
        return params;
    }
    reject_unknown_keys(j,
                        {"model", "horizon", "beta", "scenarios", "objective_bps2",
                         "objective_unweighted_bps2", "residuals_bps", "in_window",
                         "expected_barrier", "converged"},
                        "params");
    j.at("beta").get_to(params.beta);
    for (const auto& js : j.at("scenarios")) {
        reject_unknown_keys(js, {"h_ratio", "probability", "vol"}, "scenario");
        Scenario s;
        js.at("h_ratio").get_to(s.firm.h_ratio);
        js.at("probability").get_to(s.probability);
        s.firm.beta = params.beta;
        s.firm.vol = vol_from_json(js.at("vol"));
        params.scenarios.scenarios.push_back(s);
    }
    params.validate();
    return params;
}

}  // namespace

void ModelParams::validate() const {
    if (model != "at1p" && model != "sbat1p" && model != "svbat1p" && model != "hazard")
        throw std::runtime_error("ModelParams: unknown model '" + model + "'");
    if (is_hazard())
        hazard.validate();
    else
        scenarios.validate();
}

SurvivalCurve ModelParams::survival(double horizon, double step) const {
    if (this->horizon > 0.0 && horizon > this->horizon + 1e-9)
        throw std::domain_error("ModelParams: horizon beyond the curve's validity (" +
                                std::to_string(this->horizon) + "y)");
    if (is_hazard())
        return hazard_survival_grid(hazard, horizon, step);
    return survival_grid(scenarios, horizon, step);
}

ModelParams load_model_params(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_model_params: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return model_params_from_json(ss.str());
    } catch (const json::exception& e) {
        throw std::runtime_error("load_model_params: " + path + ": " + e.what());
    }
}

void save_model_params(const ModelParams& params, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("save_model_params: cannot open '" + path + "'");
    out << model_params_to_json(params) << '\n';
}

std::string model_params_to_json(const ModelParams& params) {
    return params_to_json_obj(params).dump(2);
}

ModelParams model_params_from_json(const std::string& text) {
    return params_from_json_obj(json::parse(text));
}

std::string report_to_json(const ModelParams& params, const CalibrationReport& report) {
    json j = params_to_json_obj(params);
    j["objective_bps2"] = report.objective_bps2;
    j["objective_unweighted_bps2"] = report.objective_unweighted_bps2;
    j["residuals_bps"] = report.residuals_bps;
    j["in_window"] = report.in_window;
    j["expected_barrier"] = report.expected_barrier;
    j["converged"] = report.converged;
    return j.dump(2);
}

}  // namespace fpc
