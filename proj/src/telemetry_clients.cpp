// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/telemetry_clients.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>

#include "ranprof/http_json.hpp"

namespace ranprof::telemetry {

namespace {

constexpr int64_t kPduIntervalNs = 1'000'000'000;
constexpr double kPduAccuracy = 0.005;
constexpr int64_t kWattmeterIntervalNs = 62'500'000;
constexpr double kWattmeterAccuracy = 0.015;

nlohmann::json fetch(const std::string& base_url, const std::string& path,
                     const char* source) {
    try {
        return http::get_json(base_url, path);
    } catch (const http::HttpError& e) {
        if (e.status() == 404) throw UnknownPod(e.what());
        throw SourceUnavailable(std::string(source) + ": " + e.what());
    }
}

}  // namespace

PduClient::PduClient(std::string base_url, int64_t offset_ns)
    : base_url_(std::move(base_url)), offset_ns_(offset_ns) {}

SampleSeries PduClient::poll(const std::string& outlet_id,
                             const Window& w) const {
    // Offset shifts the source clock, so query in source time.
    const std::string path = "/pdu/outlets/" + outlet_id +
                             "/samples?start=" + std::to_string(w.start_ns - offset_ns_) +
                             "&end=" + std::to_string(w.end_ns - offset_ns_);
    nlohmann::json body = fetch(base_url_, path, "pdu");

    SampleSeries s;
    s.source = Source::PDU;
    s.target = outlet_id;
    s.nominal_interval_ns = kPduIntervalNs;
    s.accuracy_fraction = kPduAccuracy;
    for (const auto& row : body) {
        const int64_t ts = row.at("ts_ns").get<int64_t>() + offset_ns_;
        if (ts < w.start_ns || ts >= w.end_ns) continue;
        s.samples.push_back({ts, row.at("power_w").get<double>()});
        s.energy_wh.push_back(row.at("energy_wh").get<double>());
        s.voltage_v.push_back(row.at("voltage_v").get<double>());
        s.current_a.push_back(row.at("current_a").get<double>());
    }
    refresh_gap_flag(s);
    return s;
}

PodMetricsClient::PodMetricsClient(std::string base_url, int64_t offset_ns)
    : base_url_(std::move(base_url)), offset_ns_(offset_ns) {}

SampleSeries PodMetricsClient::query_range(const std::string& pod,
                                           const Window& w,
                                           int64_t step_ns) const {
    std::string path = "/metrics/query_range?pod=" + pod +
                       "&start=" + std::to_string(w.start_ns - offset_ns_) +
                       "&end=" + std::to_string(w.end_ns - offset_ns_);
    if (step_ns > 0) path += "&step=" + std::to_string(step_ns);
    nlohmann::json body = fetch(base_url_, path, "pod-metrics");

    SampleSeries s;
    s.source = Source::POD_ESTIMATOR;
    s.target = pod;
    s.nominal_interval_ns = body.at("step_ns").get<int64_t>();
    s.accuracy_fraction = 0.0;  // estimator error is uncharacterized
    for (const auto& row : body.at("samples")) {
        const int64_t ts = row.at("ts_ns").get<int64_t>() + offset_ns_;
        if (ts < w.start_ns || ts >= w.end_ns) continue;
        s.samples.push_back({ts, row.at("power_w").get<double>()});
    }
    refresh_gap_flag(s);
    return s;
}

WattmeterTraceReader::WattmeterTraceReader(int64_t offset_ns)
    : offset_ns_(offset_ns) {}

SampleSeries WattmeterTraceReader::read(const std::string& path,
                                        const Window& w) const {
    std::ifstream in(path);
    if (!in) {
        throw SourceUnavailable("wattmeter trace: cannot open " + path + ": " +
                                std::strerror(errno));
    }

    SampleSeries s;
    s.source = Source::WATTMETER;
    s.target = path;
    s.nominal_interval_ns = kWattmeterIntervalNs;
    s.accuracy_fraction = kWattmeterAccuracy;

    std::string line;
    size_t row = 0;
    if (!std::getline(in, line)) throw FormatError(path + ": empty file");
    ++row;
    if (line != "ts_ns,power_w") {
        throw FormatError(path + ": row 1: bad header '" + line + "'");
    }
    int64_t prev_ts = INT64_MIN;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto bad = [&](const char* why) {
            return FormatError(path + ": row " + std::to_string(row) + ": " +
                               std::string(why) + " '" + line + "'");
        };
        const size_t comma = line.find(',');
        if (comma == std::string::npos) throw bad("missing comma");
        int64_t ts = 0;
        const auto [p1, ec1] =
            std::from_chars(line.data(), line.data() + comma, ts);
        if (ec1 != std::errc() || p1 != line.data() + comma) {
            throw bad("bad timestamp");
        }
        char* endp = nullptr;
        const double power = std::strtod(line.c_str() + comma + 1, &endp);
        if (endp == line.c_str() + comma + 1 || *endp != '\0') {
            throw bad("bad power");
        }
        if (ts <= prev_ts) throw bad("non-monotonic timestamp");
        prev_ts = ts;
        ts += offset_ns_;
        if (ts < w.start_ns || ts >= w.end_ns) continue;
        s.samples.push_back({ts, power});
    }
    refresh_gap_flag(s);
    return s;
}

}  // namespace ranprof::telemetry
