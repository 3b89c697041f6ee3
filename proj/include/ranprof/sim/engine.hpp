// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic testbed emulator. All state lives on a virtual clock that
// only moves via advance(); wall time never leaks into results, so a fixed
// (config, seed, call sequence) replays byte-identically at any warp.
// Telemetry is derived on demand from the recorded component/session
// timeline plus seeded noise, which means any past window can be queried
// any number of times with identical answers.

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranprof/sample_series.hpp"
#include "ranprof/sim/power_model.hpp"
#include "ranprof/window.hpp"

namespace ranprof::sim {

class SimError : public std::runtime_error {
  public:
    SimError(int http_status, const std::string& what)
        : std::runtime_error(what), status_(http_status) {}
    int status() const { return status_; }

  private:
    int status_;
};

struct NodeConfig {
    std::string name;
    std::string outlet;       // PDU outlet id metering this node
    double baseline_w = 200;  // chassis draw with no workload pods
};

struct DirectionRates {
    double rate_mbps = 0.0;        // steady achieved TCP rate
    double power_load_mbps = -1;   // operating point fed to load models; <0 = rate_mbps
};

struct TrafficConfig {
    // Steady TCP rates per RAN stack prefix ("oai", "srsran") and direction.
    std::map<std::string, std::map<std::string, DirectionRates>> tcp;
    double capacity_dl_mbps = 400.0;  // per-cell shared air-interface budget
    double capacity_ul_mbps = 200.0;
    double udp_loss_percent = 0.0;
    double tcp_rate_noise_frac = 0.01;
};

struct SimConfig {
    uint64_t seed = 1;
    double warp = 60.0;          // virtual-to-wall pacing ratio, >= 1
    int64_t epoch_ns = 1'700'000'000'000'000'000LL;

    double startup_delay_s = 2.0;   // deploy -> READY
    double scrape_interval_s = 1.0; // pod estimator cadence
    double pdu_interval_s = 1.0;
    double pdu_accuracy = 0.005;
    double pdu_noise_sigma_w = 1.0;
    double pdu_voltage_v = 208.0;
    double wattmeter_interval_s = 0.0625;  // ~16 samples/s
    double wattmeter_jitter_s = 0.010;
    double wattmeter_accuracy = 0.015;

    std::vector<NodeConfig> nodes;
    std::vector<std::string> reachable_ru_addresses;
    std::map<std::string, PowerModel> models;
    TrafficConfig traffic;

    static SimConfig from_json(const nlohmann::json& j);
    // Built-in testbed: two metered nodes, calibrated NF/RU models, per-stack
    // TCP rates. Everything the bundled vectors reference.
    static SimConfig defaults();
};

struct DeployRequest {
    std::string name;
    std::string kind;   // "pod" | "ru"
    std::string node;   // empty for RUs (separately metered)
    std::string model;  // key into SimConfig::models
    std::string antenna_layout = "2x2";
    std::string gnb_link;  // owning gNB for RUs/xApps (UE-count source)
    std::string address;   // RU front-haul address; must be reachable
};

struct TrafficRequest {
    int ue_index = 0;
    std::string gnb;
    std::string protocol;   // "udp" | "tcp"
    std::string direction;  // "downlink" | "uplink"
    double target_mbps = 0.0;  // udp only
    double duration_s = 0.0;
};

class SimEngine {
  public:
    explicit SimEngine(SimConfig cfg);

    // ---- virtual clock ----
    int64_t now_ns() const;
    double warp() const { return cfg_.warp; }
    // Moves the clock forward and paces the caller by dur/warp wall time.
    int64_t advance(int64_t dur_ns);
    // Wipes all runtime state and restarts the clock at epoch_ns.
    void reset(uint64_t seed, int64_t epoch_ns);

    // ---- lifecycle ----
    void deploy(const DeployRequest& req);          // SimError 404/409/400
    void teardown(const std::string& name);        // idempotent
    nlohmann::json inventory() const;
    std::string component_state(const std::string& name) const;  // ABSENT/.../STOPPED

    // ---- UEs and traffic ----
    void attach_ue(int ue_index, const std::string& gnb);  // SimError 409
    std::string start_traffic(const TrafficRequest& req);  // returns session id
    // Result once the clock passed the session end; nullopt while pending.
    std::optional<nlohmann::json> traffic_result(const std::string& session_id);

    // ---- telemetry ----
    SampleSeries pdu_series(const std::string& outlet, const Window& w);
    SampleSeries pod_series(const std::string& pod, const Window& w, int64_t step_ns);
    // Writes "ts_ns,power_w" CSV rows covering [start, end) and returns the row count.
    size_t write_ru_trace(const std::string& ru, const Window& w, const std::string& file);

    // ---- fault injection ----
    void set_source_fault(const std::string& source, bool unavailable);  // "pdu"|"metrics"
    void set_ue_hang(int ue_index, bool hung);
    void add_metrics_outage(const std::string& pod, const Window& w);

    const SimConfig& config() const { return cfg_; }

  private:
    struct Incarnation {
        std::string name, kind, node, model, layout, gnb_link, address;
        int64_t deploy_ts = 0;
        int64_t ready_at = 0;   // INT64_MAX when it never becomes ready
        std::optional<int64_t> stop_ts;
        bool alive_at(int64_t t) const {
            return t >= deploy_ts && (!stop_ts || t < *stop_ts);
        }
    };
    struct UeAttachment {
        int ue_index;
        std::string gnb;
        int64_t attach_ts;
        std::optional<int64_t> detach_ts;
        bool attached_at(int64_t t) const {
            return t >= attach_ts && (!detach_ts || t < *detach_ts);
        }
    };
    struct Session {
        std::string id;
        int ue_index;
        std::string gnb, protocol, direction;
        int64_t start_ns, end_ns;
        double target_mbps = 0.0;
        double achieved_mbps = 0.0;    // post capacity sharing, pre loss
        double power_load_mbps = 0.0;  // what load models see
        double loss_percent = 0.0;
        bool active_at(int64_t t) const { return t >= start_ns && t < end_ns; }
    };

    double component_power_nf(const Incarnation& c, int64_t t) const;  // noise-free
    double node_power_nf(const std::string& node, int64_t t) const;
    double load_mbps_at(const Incarnation& c, int64_t t) const;
    int ue_count_at(const std::string& gnb, int64_t t) const;
    const Incarnation* find_active(const std::string& name) const;
    void rebalance_udp(const Session& newcomer);
    void ensure_outlet_tables(const std::string& outlet, const NodeConfig& node,
                              int64_t up_to_idx);

    SimConfig cfg_;
    mutable std::mutex mu_;
    int64_t now_ns_ = 0;
    std::vector<Incarnation> components_;
    std::vector<UeAttachment> ues_;
    std::vector<Session> sessions_;
    uint64_t session_counter_ = 0;
    std::set<std::string> faulted_sources_;
    std::set<int> hung_ues_;
    std::vector<std::pair<std::string, Window>> metrics_outages_;
    // Per-outlet lazily extended grid caches: emitted power and cumulative Wh.
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> outlet_tables_;
};

}  // namespace ranprof::sim
