// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Read-side adapters that turn the three telemetry feeds into SampleSeries:
// PDU outlet REST samples, pod power-estimator range queries, and wattmeter
// CSV traces. Every returned sample satisfies start <= ts < end. An empty
// window is a normal outcome (empty series), never an error; errors mean the
// source itself was unreachable or malformed.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ranprof/sample_series.hpp"
#include "ranprof/window.hpp"

namespace ranprof::telemetry {

class SourceUnavailable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UnknownPod : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed trace file; the message names the offending row.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Per-source timestamp offset, for clock-skew injection in tests. Applied to
// every sample timestamp before window filtering. Defaults to zero.
struct SourceOffsets {
    int64_t pdu_ns = 0;
    int64_t pod_ns = 0;
    int64_t wattmeter_ns = 0;
};

class PduClient {
  public:
    explicit PduClient(std::string base_url, int64_t offset_ns = 0);

    // GET /pdu/outlets/<id>/samples?start=&end= and adapt. 1 s cadence,
    // +-0.5% accuracy, cumulative energy column preserved.
    SampleSeries poll(const std::string& outlet_id, const Window& w) const;

  private:
    std::string base_url_;
    int64_t offset_ns_;
};

class PodMetricsClient {
  public:
    explicit PodMetricsClient(std::string base_url, int64_t offset_ns = 0);

    // GET /metrics/query_range. One sample per step boundary; estimator
    // accuracy is unknown, so accuracy_fraction stays 0.0. step_ns <= 0
    // uses the source default.
    SampleSeries query_range(const std::string& pod, const Window& w,
                             int64_t step_ns = 0) const;

  private:
    std::string base_url_;
    int64_t offset_ns_;
};

class WattmeterTraceReader {
  public:
    explicit WattmeterTraceReader(int64_t offset_ns = 0);

    // Reads a "ts_ns,power_w" CSV and keeps rows inside the window, in file
    // order. Missing file -> SourceUnavailable; bad header/rows -> FormatError.
    SampleSeries read(const std::string& path, const Window& w) const;

  private:
    int64_t offset_ns_;
};

}  // namespace ranprof::telemetry
