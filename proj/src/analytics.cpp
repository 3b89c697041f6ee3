// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <boost/math/distributions/students_t.hpp>

using nlohmann::json;

namespace ranprof::analytics {

namespace {

// %.10g keeps emission deterministic and round-trippable without trailing noise.
std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

struct GroupKey {
    std::string label;
    double load;
    bool operator<(const GroupKey& o) const {
        if (label != o.label) return label < o.label;
        // NaN loads group together after every real load.
        const bool a_nan = std::isnan(load), b_nan = std::isnan(o.load);
        if (a_nan != b_nan) return b_nan;
        return !a_nan && load < o.load;
    }
};

}  // namespace

double quantile_type7(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p outside [0,1]");
    std::sort(values.begin(), values.end());
    const double h = static_cast<double>(values.size() - 1) * p;
    const auto lo = static_cast<size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::pair<double, double> confidence_interval95(const std::vector<double>& values) {
    const size_t n = values.size();
    if (n < 2) throw InsufficientData("CI95 needs at least 2 values, got " + std::to_string(n));
    double mean = 0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(dist, 0.975);
    const double half = t * sd / std::sqrt(static_cast<double>(n));
    return {mean - half, mean + half};
}

DistributionStats distribution_stats(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("stats of empty set");
    DistributionStats s;
    s.n = values.size();
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(s.n);
    if (s.n >= 2) {
        double ss = 0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(s.n - 1));
    }
    s.median = quantile_type7(values, 0.5);
    s.q1 = quantile_type7(values, 0.25);
    s.q3 = quantile_type7(values, 0.75);
    // Tukey fences clipped to observed data: the whisker is the most extreme
    // sample still inside mean fence, never the fence itself.
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q3;
    s.whisker_hi = s.q1;
    for (double v : values) {
        if (v >= lo_fence) s.whisker_lo = std::min(s.whisker_lo, v);
        if (v <= hi_fence) s.whisker_hi = std::max(s.whisker_hi, v);
    }
    if (s.n >= 2) {
        auto [lo, hi] = confidence_interval95(values);
        s.has_ci = true;
        s.ci95_lo = lo;
        s.ci95_hi = hi;
    }
    return s;
}

RegressionLine least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw std::invalid_argument("x/y size mismatch");
    if (xs.size() < 2) throw std::invalid_argument("regression needs >= 2 points");
    const auto n = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("regression needs non-constant x");
    RegressionLine r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.n = xs.size();
    return r;
}

// ---- efficiency ----------------------------------------------------------------

EfficiencyReport energy_efficiency(const std::vector<collectors::PowerReport>& power,
                                   const std::vector<collectors::PerfRecord>& perf,
                                   const std::vector<std::string>& classes,
                                   const std::string& direction_filter) {
    if (power.size() != perf.size() || power.empty())
        throw std::invalid_argument("need equal non-empty power/perf report lists");
    EfficiencyReport rep;
    rep.classes = classes;
    bool saw_dl = false, saw_ul = false;
    for (size_t i = 0; i < power.size(); ++i) {
        if (power[i].test_id != perf[i].test_id)
            throw std::invalid_argument("test_id mismatch: " + power[i].test_id + " vs " +
                                        perf[i].test_id);
        RunEfficiency run;
        run.test_id = power[i].test_id;
        for (const auto& ue : perf[i].ue_results) {
            if (!direction_filter.empty() && ue.direction != direction_filter) continue;
            run.bits += ue.bits_transferred;
            (ue.direction == "downlink" ? saw_dl : saw_ul) = true;
        }
        for (const auto& cls : classes) {
            auto it = power[i].totals_energy_j.find(cls);
            if (it != power[i].totals_energy_j.end()) run.energy_j += it->second;
        }
        if (run.energy_j > 0)
            run.efficiency_mbit_per_j =
                (static_cast<double>(run.bits) / 1e6) / run.energy_j;
        rep.test_ids.push_back(run.test_id);
        rep.total_bits += run.bits;
        rep.total_energy_j += run.energy_j;
        rep.runs.push_back(run);
    }
    if (rep.total_energy_j <= 0)
        throw ZeroEnergy("selected classes carry no energy for the given runs");
    rep.efficiency_mbit_per_j =
        (static_cast<double>(rep.total_bits) / 1e6) / rep.total_energy_j;
    rep.direction = !direction_filter.empty() ? direction_filter
                    : (saw_dl && saw_ul)      ? "mixed"
                    : saw_ul                  ? "uplink"
                                              : "downlink";
    return rep;
}

EfficiencyReport energy_efficiency(const collectors::PowerReport& power,
                                   const collectors::PerfRecord& perf,
                                   const std::vector<std::string>& classes,
                                   const std::string& direction_filter) {
    return energy_efficiency(std::vector<collectors::PowerReport>{power},
                             std::vector<collectors::PerfRecord>{perf}, classes,
                             direction_filter);
}

// ---- comparisons ----------------------------------------------------------------

Comparison compare_configurations(const std::vector<RunObservation>& runs) {
    std::map<GroupKey, std::vector<const RunObservation*>> groups;
    for (const auto& r : runs) groups[{r.label, r.load_mbps}].push_back(&r);

    Comparison cmp;
    for (const auto& [key, members] : groups) {
        GroupStats g;
        g.label = key.label;
        g.load_mbps = key.load;
        std::vector<double> eff;
        std::map<std::string, std::vector<double>> powers;
        for (const auto* r : members) {
            eff.push_back(r->efficiency_mbit_per_j);
            for (const auto& [target, w] : r->mean_power_w) powers[target].push_back(w);
        }
        g.efficiency = distribution_stats(eff);
        for (const auto& [target, ws] : powers) g.mean_power_w[target] = distribution_stats(ws);
        cmp.groups.push_back(std::move(g));
    }

    // Power-vs-load fits per label, over raw runs (not group means), for every
    // target observed at two or more distinct loads.
    std::map<std::string, std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>> pts;
    for (const auto& r : runs) {
        if (std::isnan(r.load_mbps)) continue;
        for (const auto& [target, w] : r.mean_power_w) {
            auto& [xs, ys] = pts[r.label][target];
            xs.push_back(r.load_mbps);
            ys.push_back(w);
        }
    }
    for (const auto& [label, by_target] : pts)
        for (const auto& [target, xy] : by_target) {
            const auto& [xs, ys] = xy;
            const double x0 = xs.front();
            bool varied = false;
            for (double x : xs) varied |= (x != x0);
            if (varied) cmp.power_slopes[label][target] = least_squares(xs, ys);
        }
    return cmp;
}

// ---- serialization ----------------------------------------------------------------

void to_json(json& j, const DistributionStats& s) {
    j = {{"n", s.n},         {"mean", s.mean},
         {"stddev", s.stddev}, {"median", s.median},
         {"q1", s.q1},       {"q3", s.q3},
         {"whisker_lo", s.whisker_lo}, {"whisker_hi", s.whisker_hi}};
    if (s.has_ci) {
        j["ci95_lo"] = s.ci95_lo;
        j["ci95_hi"] = s.ci95_hi;
    } else {
        j["ci95_lo"] = nullptr;
        j["ci95_hi"] = nullptr;
    }
}

void to_json(json& j, const RunEfficiency& r) {
    j = {{"test_id", r.test_id},
         {"bits", r.bits},
         {"energy_j", r.energy_j},
         {"efficiency_mbit_per_j", r.efficiency_mbit_per_j}};
}

void to_json(json& j, const EfficiencyReport& r) {
    j = {{"test_ids", r.test_ids},
         {"direction", r.direction},
         {"classes", r.classes},
         {"total_bits", r.total_bits},
         {"total_energy_j", r.total_energy_j},
         {"efficiency_mbit_per_j", r.efficiency_mbit_per_j},
         {"runs", r.runs}};
}

void to_json(json& j, const GroupStats& g) {
    j = {{"label", g.label},
         {"load_mbps", std::isnan(g.load_mbps) ? json() : json(g.load_mbps)},
         {"efficiency", g.efficiency},
         {"mean_power_w", g.mean_power_w}};
}

void to_json(json& j, const Comparison& c) {
    j = {{"groups", c.groups}};
    json slopes = json::object();
    for (const auto& [label, by_target] : c.power_slopes) {
        json per = json::object();
        for (const auto& [target, line] : by_target)
            per[target] = {{"slope_w_per_mbps", line.slope},
                           {"intercept_w", line.intercept},
                           {"n", line.n}};
        slopes[label] = per;
    }
    j["power_slopes"] = slopes;
}

// ---- plot emission ----------------------------------------------------------------

namespace {

constexpr const char* kPlotHeader =
    "label,load_mbps,metric,n,mean,stddev,median,q1,q3,whisker_lo,whisker_hi,"
    "ci95_lo,ci95_hi,slope_w_per_mbps";

void stat_row(std::string& out, const std::string& label, double load,
              const std::string& metric, const DistributionStats& s,
              const RegressionLine* slope) {
    out += label + ',' + (std::isnan(load) ? "" : fmt(load)) + ',' + metric + ',' +
           std::to_string(s.n) + ',' + fmt(s.mean) + ',' + fmt(s.stddev) + ',' +
           fmt(s.median) + ',' + fmt(s.q1) + ',' + fmt(s.q3) + ',' + fmt(s.whisker_lo) +
           ',' + fmt(s.whisker_hi) + ',' + (s.has_ci ? fmt(s.ci95_lo) : "") + ',' +
           (s.has_ci ? fmt(s.ci95_hi) : "") + ',' + (slope ? fmt(slope->slope) : "") + '\n';
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << content;
    if (!out) throw IoError("short write to " + path);
}

}  // namespace

void emit_plot_data(const Comparison& c, const std::string& format, const std::string& path) {
    if (format == "json") {
        write_file(path, json(c).dump(2) + "\n");
        return;
    }
    if (format != "csv") throw std::invalid_argument("format must be csv or json");
    std::string out = std::string(kPlotHeader) + '\n';
    for (const auto& g : c.groups) {
        stat_row(out, g.label, g.load_mbps, "efficiency", g.efficiency, nullptr);
        for (const auto& [target, s] : g.mean_power_w) {
            const RegressionLine* slope = nullptr;
            if (auto lit = c.power_slopes.find(g.label); lit != c.power_slopes.end())
                if (auto tit = lit->second.find(target); tit != lit->second.end())
                    slope = &tit->second;
            stat_row(out, g.label, g.load_mbps, "power:" + target, s, slope);
        }
    }
    write_file(path, out);
}

void emit_plot_data(const EfficiencyReport& r, const std::string& format,
                    const std::string& path) {
    if (format == "json") {
        write_file(path, json(r).dump(2) + "\n");
        return;
    }
    if (format != "csv") throw std::invalid_argument("format must be csv or json");
    std::string out = "test_id,direction,bits,energy_j,efficiency_mbit_per_j\n";
    for (const auto& run : r.runs)
        out += run.test_id + ',' + r.direction + ',' + std::to_string(run.bits) + ',' +
               fmt(run.energy_j) + ',' + fmt(run.efficiency_mbit_per_j) + '\n';
    out += "total," + r.direction + ',' + std::to_string(r.total_bits) + ',' +
           fmt(r.total_energy_j) + ',' + fmt(r.efficiency_mbit_per_j) + '\n';
    write_file(path, out);
}

}  // namespace ranprof::analytics
