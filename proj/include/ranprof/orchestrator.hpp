// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Drives one test vector end to end against the simulated testbed through an
// explicit stage machine:
//   PARSED -> DEPLOY_CORE -> DEPLOY_RAN -> ATTACH_UES -> EXECUTE -> COLLECT
//          -> AGGREGATE -> DONE, with FAILED reachable from any stage.
// Every transition is appended to a JSON-lines journal before the stage's
// work starts, so a crashed run can be reconstructed from disk. Components
// are always torn down, success or failure. The orchestrator is the only
// clock driver: virtual time moves exclusively through its advance calls.

#pragma once

#include <condition_variable>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranprof/collectors.hpp"
#include "ranprof/rng.hpp"
#include "ranprof/testspec.hpp"

namespace ranprof::orch {

enum class RunStage {
    PARSED,
    DEPLOY_CORE,
    DEPLOY_RAN,
    ATTACH_UES,
    EXECUTE,
    COLLECT,
    AGGREGATE,
    DONE,
    FAILED,
};

const char* stage_name(RunStage s);
RunStage stage_from_name(const std::string& name);

class DeployError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class TrafficError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};
class CollectError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunFailure {
    RunStage stage = RunStage::FAILED;  // stage whose work failed
    std::string message;
};

struct TestRun {
    std::string test_id;
    testspec::TestVector vector;
    RunStage stage = RunStage::PARSED;
    int64_t start_ns = 0;  // set exactly when EXECUTE begins
    int64_t end_ns = 0;    // max session end; set when EXECUTE ends
    std::map<std::string, std::string> placements;  // component -> node ("" = radio site)
    struct Artifacts {
        std::string ru_trace_file;
        std::string ue_results_file;
    } artifacts;
    std::vector<collectors::UeResult> ue_results;
    std::vector<RunStage> history;  // every stage entered, in order
    std::optional<RunFailure> failure;

    bool done() const { return stage == RunStage::DONE; }
};

// Optional per-scenario extras that are environment policy, not vector
// schema: which monitoring xApp flavour (if any) rides along.
struct ScenarioProfile {
    std::string xapp;  // "" | "protobuf" | "standard"
};

struct OrchestratorConfig {
    std::string sim_url;
    std::string power_collector_url;
    std::string perf_collector_url;
    std::string runs_dir = "runs";
    std::string artifacts_dir = "artifacts";

    // Placement policy: core NFs and xApps live on the server node; the gNB
    // pod lands by functional split (SDR host for split 8).
    std::string core_node = "dell-r760-1";
    std::string split8_node = "microway-1";
    std::string split72_node = "dell-r760-1";
    std::map<std::string, std::string> node_outlets = {
        {"dell-r760-1", "pdu-1-outlet-3"},
        {"microway-1", "pdu-1-outlet-7"},
    };
    std::map<int64_t, ScenarioProfile> scenario_profiles;

    double readiness_timeout_s = 15.0;  // per component, virtual
    double readiness_poll_s = 0.5;
    double ue_grace_s = 10.0;  // extra virtual time before a result is "missing"
    int collect_retries = 3;
    int collect_backoff_ms = 250;

    static OrchestratorConfig from_json(const nlohmann::json& j);
};

// Grants exclusive use of a node set; acquire blocks until every node in the
// set is free. Keeps concurrent runs with overlapping placements serialized.
class NodeLeaseRegistry {
  public:
    class Lease {
      public:
        Lease() = default;
        Lease(NodeLeaseRegistry* reg, std::vector<std::string> nodes)
            : reg_(reg), nodes_(std::move(nodes)) {}
        Lease(Lease&& o) noexcept : reg_(o.reg_), nodes_(std::move(o.nodes_)) {
            o.reg_ = nullptr;
        }
        Lease& operator=(Lease&& o) noexcept;
        Lease(const Lease&) = delete;
        Lease& operator=(const Lease&) = delete;
        ~Lease() { release(); }
        void release();

      private:
        NodeLeaseRegistry* reg_ = nullptr;
        std::vector<std::string> nodes_;
    };

    Lease acquire(std::vector<std::string> nodes);

  private:
    friend class Lease;
    void release_nodes(const std::vector<std::string>& nodes);

    std::mutex mu_;
    std::condition_variable cv_;
    std::set<std::string> leased_;
};

class Orchestrator {
  public:
    Orchestrator(OrchestratorConfig cfg, uint64_t seed);

    // Runs one vector to DONE or FAILED; run-level errors are captured in the
    // returned TestRun, never thrown. Throws std::runtime_error only when the
    // environment itself is unreachable (simulator/collector health checks).
    TestRun run_test(const testspec::TestVector& v);

    // Rebuilds a TestRun from its journal file.
    static TestRun recover_run(const std::string& journal_path);

    const OrchestratorConfig& config() const { return cfg_; }

  private:
    struct RunPlan;  // component names, models, placements for one run

    void journal(TestRun& run, RunStage stage, const nlohmann::json& data);
    void transition(TestRun& run, RunStage stage, const nlohmann::json& data);
    int64_t clock_now() const;
    void advance(double seconds) const;
    void deploy_and_await(const std::vector<nlohmann::json>& reqs,
                          std::vector<std::string>* deployed) const;
    void do_collect(TestRun& run, const RunPlan& plan);
    void teardown_all(const std::vector<std::string>& deployed) const;

    OrchestratorConfig cfg_;
    SplitMix64 rng_;
    std::mutex rng_mu_;
    NodeLeaseRegistry leases_;
};

}  // namespace ranprof::orch
