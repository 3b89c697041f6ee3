// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pure post-processing over joined power/perf reports: Mbit/J efficiency
// (decimal megabit), distribution summaries for box plots (type-7 quantiles,
// Tukey 1.5*IQR whiskers clipped to the data, Student-t 95% CI on the mean),
// per-configuration comparisons with least-squares power-vs-load slopes, and
// deterministic CSV/JSON emission for external plotting.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranprof/collectors.hpp"

namespace ranprof::analytics {

class InsufficientData : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class ZeroEnergy : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct DistributionStats {
    size_t n = 0;
    double mean = 0, stddev = 0;
    double median = 0, q1 = 0, q3 = 0;
    double whisker_lo = 0, whisker_hi = 0;
    bool has_ci = false;  // n >= 2
    double ci95_lo = 0, ci95_hi = 0;
};

// Linear interpolation between order statistics at h = (n-1)p.
double quantile_type7(std::vector<double> values, double p);

// Throws std::invalid_argument on empty input. CI fields are filled only for
// n >= 2 (has_ci).
DistributionStats distribution_stats(const std::vector<double>& values);

// Student-t 95% CI on the mean; throws InsufficientData for n < 2.
std::pair<double, double> confidence_interval95(const std::vector<double>& values);

struct RegressionLine {
    double slope = 0, intercept = 0;
    size_t n = 0;
};

// Ordinary least squares; needs >= 2 points with non-constant x.
RegressionLine least_squares(const std::vector<double>& xs, const std::vector<double>& ys);

struct RunEfficiency {
    std::string test_id;
    int64_t bits = 0;
    double energy_j = 0;
    double efficiency_mbit_per_j = 0;
};

struct EfficiencyReport {
    std::vector<std::string> test_ids;
    std::string direction;             // "downlink" | "uplink" | "mixed"
    std::vector<std::string> classes;  // component classes included in energy
    int64_t total_bits = 0;
    double total_energy_j = 0;
    double efficiency_mbit_per_j = 0;  // (total_bits/1e6) / total_energy_j
    std::vector<RunEfficiency> runs;
};

// Joins one run's power and perf data. `direction_filter` restricts the bit
// count ("" = all directions). Throws ZeroEnergy when the selected classes
// carry no energy, std::invalid_argument on test_id mismatch.
EfficiencyReport energy_efficiency(const collectors::PowerReport& power,
                                   const collectors::PerfRecord& perf,
                                   const std::vector<std::string>& classes,
                                   const std::string& direction_filter = "");

// Pooled variant over repeated runs: ratio of summed bits to summed energy,
// with the per-run breakdown retained.
EfficiencyReport energy_efficiency(const std::vector<collectors::PowerReport>& power,
                                   const std::vector<collectors::PerfRecord>& perf,
                                   const std::vector<std::string>& classes,
                                   const std::string& direction_filter = "");

// One orchestrated run reduced to the numbers comparisons consume.
struct RunObservation {
    std::string label;          // configuration under comparison
    double load_mbps = 0;       // swept parameter; NaN when not applicable
    double efficiency_mbit_per_j = 0;
    std::map<std::string, double> mean_power_w;  // report target name -> mean W
};

struct GroupStats {
    std::string label;
    double load_mbps = 0;
    DistributionStats efficiency;
    std::map<std::string, DistributionStats> mean_power_w;
};

struct Comparison {
    std::vector<GroupStats> groups;  // sorted by (label, load)
    // label -> target -> least-squares fit of mean power against load,
    // present only for labels observed at >= 2 distinct loads.
    std::map<std::string, std::map<std::string, RegressionLine>> power_slopes;
};

Comparison compare_configurations(const std::vector<RunObservation>& runs);

void to_json(nlohmann::json& j, const DistributionStats& s);
void to_json(nlohmann::json& j, const RunEfficiency& r);
void to_json(nlohmann::json& j, const EfficiencyReport& r);
void to_json(nlohmann::json& j, const GroupStats& g);
void to_json(nlohmann::json& j, const Comparison& c);

// Deterministic plot-data emission; re-emitting identical input is
// byte-identical. format: "csv" | "json". Throws IoError.
void emit_plot_data(const Comparison& c, const std::string& format,
                    const std::string& path);
void emit_plot_data(const EfficiencyReport& r, const std::string& format,
                    const std::string& path);

}  // namespace ranprof::analytics
