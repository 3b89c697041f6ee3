// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranprof/window.hpp"

namespace ranprof {

// Where a power series came from. Accuracy and cadence differ per source:
// PDU outlets sample once a second with cumulative energy counters, the
// pod estimator is a scraped software model (accuracy unknown, sentinel 0),
// and wattmeter traces run at ~16 samples/s.
enum class Source { PDU, POD_ESTIMATOR, WATTMETER };

const char* source_name(Source s);
Source source_from_name(const std::string& name);

struct PowerSample {
    int64_t ts_ns = 0;
    double power_w = 0.0;
};

// Uniformly-typed power series from any telemetry source. Timestamps are
// strictly increasing virtual nanoseconds. Optional per-sample columns
// (cumulative energy, voltage, current) are either empty or sample-aligned.
struct SampleSeries {
    Source source = Source::PDU;
    std::string target;             // outlet id, pod name, or radio unit name
    int64_t nominal_interval_ns = 0;
    double accuracy_fraction = 0.0;  // 0.0 = unknown/estimated
    bool has_gaps = false;           // any adjacent delta > 3x nominal interval

    std::vector<PowerSample> samples;
    std::vector<double> energy_wh;   // cumulative, PDU only
    std::vector<double> voltage_v;   // PDU only
    std::vector<double> current_a;   // PDU only

    bool empty() const { return samples.empty(); }
    size_t size() const { return samples.size(); }
};

// Recomputes the gap flag from sample spacing. 3x the nominal interval is
// the shared gap threshold across the pipeline.
void refresh_gap_flag(SampleSeries& s);

inline int64_t gap_threshold_ns(int64_t nominal_interval_ns) { return 3 * nominal_interval_ns; }

}  // namespace ranprof
