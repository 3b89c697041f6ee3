// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// The two post-run collector services. The power collector fans out to every
// telemetry source named in a CollectRequest, persists the raw series, and
// reduces each to an EnergyResult plus per-class totals. The performance
// collector ingests the per-UE traffic results. Both persist JSON keyed by
// test_id so reports can be joined later.

#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranprof/http_json.hpp"
#include "ranprof/sample_series.hpp"
#include "ranprof/telemetry_clients.hpp"
#include "ranprof/timeseries.hpp"
#include "ranprof/window.hpp"

namespace ranprof::collectors {

// One telemetry source to pull. `target` is what the source is queried with
// (outlet id, pod name, or trace-file path); `store_as` is the stream
// identity used for persistence (defaults to `target`; traces use the RU
// component name so file paths never leak into store keys).
struct CollectTarget {
    std::string name;             // report key, e.g. "gnb", "upf", "ru"
    Source source = Source::PDU;
    std::string target;
    std::string component_class;  // "ran" | "core" | "radio" | "xapp" | "platform"
    std::string store_as;
};

struct CollectRequest {
    std::string test_id;
    Window window;
    int64_t scenario_id = 0;
    int64_t traffic_id = 0;
    std::vector<CollectTarget> targets;
};

struct TargetResult {
    std::string name;
    Source source = Source::PDU;
    std::string target;
    std::string component_class;
    bool ok = false;           // source answered (an empty window is still ok)
    std::string error;         // set when !ok
    ts::EnergyResult energy;
    size_t sample_count = 0;
    std::string series_ref;    // store id of the persisted raw series
};

struct PowerReport {
    std::string test_id;
    Window window;
    bool partial = false;  // at least one target failed
    std::vector<TargetResult> targets;
    // Per-class energy sums over ok targets. "platform" is the node-outlet
    // energy minus all pod attributions on the same report (residual draw).
    std::map<std::string, double> totals_energy_j;

    const TargetResult* find(const std::string& name) const;
};

struct UeResult {
    int ue_index = 0;
    std::string protocol;
    std::string direction;     // "downlink" | "uplink"
    double duration_s = 0.0;
    int64_t bits_transferred = 0;
    double mean_bitrate_bps = 0.0;
    double jitter_ms = 0.0;
    double lost_percent = 0.0;
    int retransmits = 0;
};

struct PerfRecord {
    std::string test_id;
    std::vector<UeResult> ue_results;
    int64_t aggregate_bits = 0;          // must equal the per-UE sum
    double aggregate_mean_bitrate_bps = 0.0;
};

void to_json(nlohmann::json& j, const CollectTarget& t);
void from_json(const nlohmann::json& j, CollectTarget& t);
void to_json(nlohmann::json& j, const CollectRequest& r);
void from_json(const nlohmann::json& j, CollectRequest& r);
void to_json(nlohmann::json& j, const TargetResult& t);
void from_json(const nlohmann::json& j, TargetResult& t);
void to_json(nlohmann::json& j, const PowerReport& r);
void from_json(const nlohmann::json& j, PowerReport& r);
void to_json(nlohmann::json& j, const UeResult& u);
void from_json(const nlohmann::json& j, UeResult& u);
void to_json(nlohmann::json& j, const PerfRecord& r);
void from_json(const nlohmann::json& j, PerfRecord& r);

struct CollectorConfig {
    std::string telemetry_url;  // base URL serving /pdu/* and /metrics/*
    std::string clock_url;      // base URL serving /sim/clock; empty = trust windows
    std::string store_dir;
    std::string reports_dir;
    telemetry::SourceOffsets offsets;
};

// Pure collection core, shared by the HTTP service and in-process callers.
// Fans out to all targets concurrently; a failing source only flags its own
// entry. Persists raw series to the store and the report to
// <reports_dir>/<test_id>/power.json.
PowerReport collect_power(const CollectorConfig& cfg, const CollectRequest& req);

// Validates the aggregate invariant and persists to
// <reports_dir>/<test_id>/perf.json. Throws std::invalid_argument on mismatch.
void record_perf(const CollectorConfig& cfg, const PerfRecord& rec);

// Loads persisted reports; nullopt when absent.
std::optional<PowerReport> load_power_report(const std::string& reports_dir,
                                             const std::string& test_id);
std::optional<PerfRecord> load_perf_record(const std::string& reports_dir,
                                           const std::string& test_id);

// POST /power/collect  -> PowerReport (200, or 207 when partial)
// GET  /reports/<test_id> -> {test_id, power, perf} joined view
// GET  /health
class PowerCollectorService : public http::HttpService {
  public:
    explicit PowerCollectorService(CollectorConfig cfg);

  private:
    CollectorConfig cfg_;
    std::mutex write_mu_;
};

// POST /perf/results -> {test_id, ok}; 400 on aggregate mismatch
// GET  /health
class PerfCollectorService : public http::HttpService {
  public:
    explicit PerfCollectorService(CollectorConfig cfg);

  private:
    CollectorConfig cfg_;
    std::mutex write_mu_;
};

}  // namespace ranprof::collectors
