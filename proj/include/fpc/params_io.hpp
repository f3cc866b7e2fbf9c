#pragma once

#include <string>

#include "fpc/calibration.hpp"
#include "fpc/hazard.hpp"
#include "fpc/survival.hpp"

namespace fpc {

/// Calibrated model parameters as written by the calibrate command and read
/// back by the survival / price-cds / ers commands. Either a scenario mixture
/// (model at1p/sbat1p/svbat1p) or a stripped intensity curve (model hazard).
struct ModelParams {
    std::string model;
    double beta = 0.5;
    double horizon = 0.0;  // largest quoted tenor; curves are valid up to here
    ScenarioSet scenarios;
    HazardCurve hazard;

    bool is_hazard() const { return model == "hazard"; }
    void validate() const;
    SurvivalCurve survival(double horizon, double step = kDefaultGridStep) const;
};

ModelParams load_model_params(const std::string& path);
void save_model_params(const ModelParams& params, const std::string& path);

std::string model_params_to_json(const ModelParams& params);
ModelParams model_params_from_json(const std::string& text);

/// Full calibration report JSON: the ModelParams fields plus diagnostics, so
/// the report file can be fed straight back in as a parameter file.
std::string report_to_json(const ModelParams& params, const CalibrationReport& report);

}  // namespace fpc
