// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Operator entry point. Subcommands:
//   run    <vector.json> [--reps N]      execute a vector, print test_ids
//   sweep  <vector.json> --param P --values a,b,... [--reps N]
//   report <test_id|sweep_id> [--format csv|json] [--classes ...] [--out F]
//   sim    start|stop|status|serve [--config F]
// Exit codes are a stable contract: 0 ok, 2 parse/config error, 3 run or
// environment failure, 4 unknown id, 5 port conflict. Progress goes to
// stderr; data (ids, report paths) to stdout.

#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

namespace ranprof::cli {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitRun = 3;
constexpr int kExitUnknownId = 4;
constexpr int kExitPortConflict = 5;

struct CliConfig {
    std::string sim_url = "http://127.0.0.1:18080";
    std::string power_collector_url = "http://127.0.0.1:18081";
    std::string perf_collector_url = "http://127.0.0.1:18082";
    std::string data_dir = "ranprof-data";
    uint64_t seed = 1;
    double warp = 60.0;          // >= 1
    int default_reps = 1;
    nlohmann::json sim_overrides = nlohmann::json::object();
    nlohmann::json orchestrator_overrides = nlohmann::json::object();

    // Layering: built-in defaults <- config file <- RANPROF_* environment.
    // Command-line flags are applied on top by run_cli.
    static CliConfig load(const std::string& config_path);
    void validate() const;  // throws std::invalid_argument
};

// Sets `value` at a dotted path inside a test-vector document, e.g.
// "traffic.bandwidth_mbps" ("traffic"/"network" alias the scenario objects;
// a path that lands on the UE list broadcasts to every entry). Throws
// std::invalid_argument when the path does not address a numeric field.
void apply_param(nlohmann::json& doc, const std::string& path, double value);

// Full CLI: parses argv, dispatches, returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace ranprof::cli
