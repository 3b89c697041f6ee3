// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace ranprof::sim {

// Power model families for emulated components:
//   LINEAR_LOAD      intercept + slope * load_mbps (software NFs whose draw
//                    tracks traffic; strictly increasing when slope > 0)
//   CONSTANT         load-independent draw
//   LOOKUP_UE_COUNT  piecewise-linear interpolation over attached-UE counts
//   RU_PROFILE       per-antenna-layout idle plus per-UE-count delta, with a
//                    linear boot ramp from 0 to idle while starting up
enum class ModelKind { LINEAR_LOAD, CONSTANT, LOOKUP_UE_COUNT, RU_PROFILE };

struct ModelInput {
    double load_mbps = 0.0;
    int ue_count = 0;
    double uptime_s = 0.0;              // since deploy; drives the RU boot ramp
    std::string antenna_layout = "2x2";
};

struct PowerModel {
    ModelKind kind = ModelKind::CONSTANT;
    double noise_sigma_w = 0.0;  // applied by the engine, clamped at zero power

    // LINEAR_LOAD
    double intercept_w = 0.0;
    double slope_w_per_mbps = 0.0;

    // CONSTANT
    double power_w = 0.0;

    // LOOKUP_UE_COUNT
    std::map<int, double> table_w;

    // RU_PROFILE
    std::map<std::string, double> idle_by_layout;
    std::map<int, double> ue_delta_w;  // added on top of layout idle
    double boot_ramp_s = 2.0;

    // Noise-free draw for the given operating point.
    double evaluate(const ModelInput& in) const;
};

// Piecewise-linear interpolation over integer keys, clamped at both ends.
double lookup_interpolate(const std::map<int, double>& table, double key);

PowerModel model_from_json(const nlohmann::json& j);

}  // namespace ranprof::sim
