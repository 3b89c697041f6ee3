// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared helpers for the test binaries: an in-process service stack
// (simulator + both collectors on ephemeral ports) and filesystem utilities.
// Tests run the virtual clock at an extreme warp so a 60 s experiment costs
// microseconds of wall time; results are warp-invariant by construction.

#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ranprof/collectors.hpp"
#include "ranprof/orchestrator.hpp"
#include "ranprof/sim/engine.hpp"
#include "ranprof/sim/service.hpp"
#include "ranprof/testspec.hpp"

namespace ranprof::test_support {

inline constexpr double kTestWarp = 1e9;

// Fresh, empty scratch directory under the system temp dir; removed and
// recreated per call so reruns never see stale state.
inline std::string temp_dir(const std::string& name) {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() /
                   ("ranprof-" + name + "-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Simulator + power/perf collectors, all bound to 127.0.0.1 ephemeral ports.
struct ServiceStack {
    std::unique_ptr<sim::SimEngine> engine;
    std::unique_ptr<sim::SimService> sim_service;
    std::unique_ptr<collectors::PowerCollectorService> power_service;
    std::unique_ptr<collectors::PerfCollectorService> perf_service;
    std::string data_dir;

    explicit ServiceStack(const std::string& dir,
                          nlohmann::json sim_overrides = nlohmann::json::object(),
                          uint64_t seed = 1)
        : data_dir(dir) {
        if (!sim_overrides.contains("seed")) sim_overrides["seed"] = seed;
        if (!sim_overrides.contains("warp")) sim_overrides["warp"] = kTestWarp;
        engine = std::make_unique<sim::SimEngine>(
            sim::SimConfig::from_json(sim_overrides));
        sim_service = std::make_unique<sim::SimService>(*engine);
        if (!sim_service->start()) throw std::runtime_error("sim bind failed");

        collectors::CollectorConfig cc;
        cc.telemetry_url = sim_service->base_url();
        cc.clock_url = sim_service->base_url();
        cc.store_dir = (std::filesystem::path(dir) / "store").string();
        cc.reports_dir = (std::filesystem::path(dir) / "reports").string();
        power_service = std::make_unique<collectors::PowerCollectorService>(cc);
        perf_service = std::make_unique<collectors::PerfCollectorService>(cc);
        if (!power_service->start() || !perf_service->start())
            throw std::runtime_error("collector bind failed");
    }

    ~ServiceStack() {
        if (perf_service) perf_service->stop();
        if (power_service) power_service->stop();
        if (sim_service) sim_service->stop();
    }

    std::string sim_url() const { return sim_service->base_url(); }
    std::string power_url() const { return power_service->base_url(); }
    std::string perf_url() const { return perf_service->base_url(); }
    std::string reports_dir() const {
        return (std::filesystem::path(data_dir) / "reports").string();
    }

    orch::OrchestratorConfig orch_config(
        std::map<int64_t, orch::ScenarioProfile> profiles = {}) const {
        orch::OrchestratorConfig oc;
        oc.sim_url = sim_url();
        oc.power_collector_url = power_url();
        oc.perf_collector_url = perf_url();
        oc.runs_dir = (std::filesystem::path(data_dir) / "runs").string();
        oc.artifacts_dir =
            (std::filesystem::path(data_dir) / "artifacts").string();
        oc.scenario_profiles = std::move(profiles);
        return oc;
    }
};

#ifdef RANPROF_SOURCE_DIR
inline testspec::TestVector load_vector_fixture(const std::string& name) {
    std::string path =
        std::string(RANPROF_SOURCE_DIR) + "/vectors/" + name + ".json";
    return testspec::parse_test_vector(read_file(path), nullptr);
}
#endif

}  // namespace ranprof::test_support
