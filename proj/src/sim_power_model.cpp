// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/sim/power_model.hpp"

#include <algorithm>

namespace ranprof::sim {

using nlohmann::json;

double lookup_interpolate(const std::map<int, double>& table, double key) {
    if (table.empty()) return 0.0;
    if (key <= table.begin()->first) return table.begin()->second;
    auto last = std::prev(table.end());
    if (key >= last->first) return last->second;
    auto hi = table.upper_bound(static_cast<int>(key));
    auto lo = std::prev(hi);
    double f = (key - lo->first) / static_cast<double>(hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

double PowerModel::evaluate(const ModelInput& in) const {
    switch (kind) {
        case ModelKind::LINEAR_LOAD:
            return intercept_w + slope_w_per_mbps * in.load_mbps;
        case ModelKind::CONSTANT:
            return power_w;
        case ModelKind::LOOKUP_UE_COUNT:
            return lookup_interpolate(table_w, in.ue_count);
        case ModelKind::RU_PROFILE: {
            auto it = idle_by_layout.find(in.antenna_layout);
            double idle = it != idle_by_layout.end() ? it->second
                                                     : (idle_by_layout.empty()
                                                            ? 0.0
                                                            : idle_by_layout.begin()->second);
            double delta = in.ue_count > 0 ? lookup_interpolate(ue_delta_w, in.ue_count) : 0.0;
            double ramp = boot_ramp_s > 0.0 ? std::clamp(in.uptime_s / boot_ramp_s, 0.0, 1.0)
                                            : 1.0;
            return ramp * (idle + delta);
        }
    }
    return 0.0;
}

PowerModel model_from_json(const json& j) {
    PowerModel m;
    std::string kind = j.at("kind").get<std::string>();
    m.noise_sigma_w = j.value("noise_sigma_w", 0.0);
    if (kind == "LINEAR_LOAD") {
        m.kind = ModelKind::LINEAR_LOAD;
        m.intercept_w = j.at("intercept_w").get<double>();
        m.slope_w_per_mbps = j.at("slope_w_per_mbps").get<double>();
    } else if (kind == "CONSTANT") {
        m.kind = ModelKind::CONSTANT;
        m.power_w = j.at("power_w").get<double>();
    } else if (kind == "LOOKUP_UE_COUNT") {
        m.kind = ModelKind::LOOKUP_UE_COUNT;
        for (auto& [k, v] : j.at("table_w").items()) m.table_w[std::stoi(k)] = v.get<double>();
    } else if (kind == "RU_PROFILE") {
        m.kind = ModelKind::RU_PROFILE;
        for (auto& [k, v] : j.at("idle_by_layout").items())
            m.idle_by_layout[k] = v.get<double>();
        if (j.contains("ue_delta_w"))
            for (auto& [k, v] : j.at("ue_delta_w").items())
                m.ue_delta_w[std::stoi(k)] = v.get<double>();
        m.boot_ramp_s = j.value("boot_ramp_s", 2.0);
    } else {
        throw std::invalid_argument("unknown power model kind '" + kind + "'");
    }
    return m;
}

}  // namespace ranprof::sim
