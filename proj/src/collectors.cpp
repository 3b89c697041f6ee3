// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/collectors.hpp"

#include <filesystem>
#include <fstream>
#include <future>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ranprof::collectors {

namespace {

bool safe_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.')
            return false;
    return true;
}

void write_json_atomic(const fs::path& path, const json& j) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << j.dump(2) << "\n";
    }
    fs::rename(tmp, path);
}

std::optional<json> read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    return json::parse(in);
}

// Pulls one target's telemetry, persists the raw series, integrates.
TargetResult pull_target(const CollectorConfig& cfg, ts::SeriesStore& store,
                         const Window& w, const CollectTarget& t) {
    TargetResult r;
    r.name = t.name;
    r.source = t.source;
    r.target = t.target;
    r.component_class = t.component_class;
    try {
        SampleSeries series;
        switch (t.source) {
            case Source::PDU:
                series = telemetry::PduClient(cfg.telemetry_url, cfg.offsets.pdu_ns)
                             .poll(t.target, w);
                break;
            case Source::POD_ESTIMATOR:
                series = telemetry::PodMetricsClient(cfg.telemetry_url, cfg.offsets.pod_ns)
                             .query_range(t.target, w);
                break;
            case Source::WATTMETER:
                series = telemetry::WattmeterTraceReader(cfg.offsets.wattmeter_ns)
                             .read(t.target, w);
                break;
        }
        series.target = t.store_as.empty() ? t.target : t.store_as;
        r.sample_count = series.samples.size();
        if (!series.samples.empty()) r.series_ref = store.store(series);
        r.energy = ts::integrate_energy(series, w);
        r.ok = true;
    } catch (const std::exception& e) {
        r.ok = false;
        r.error = e.what();
    }
    return r;
}

}  // namespace

const TargetResult* PowerReport::find(const std::string& name) const {
    for (const auto& t : targets)
        if (t.name == name) return &t;
    return nullptr;
}

// ---- JSON bindings -----------------------------------------------------------

void to_json(json& j, const CollectTarget& t) {
    j = {{"name", t.name},
         {"source", source_name(t.source)},
         {"target", t.target},
         {"class", t.component_class}};
    if (!t.store_as.empty()) j["store_as"] = t.store_as;
}

void from_json(const json& j, CollectTarget& t) {
    t.name = j.at("name").get<std::string>();
    t.source = source_from_name(j.at("source").get<std::string>());
    t.target = j.at("target").get<std::string>();
    t.component_class = j.at("class").get<std::string>();
    t.store_as = j.value("store_as", "");
}

void to_json(json& j, const CollectRequest& r) {
    j = {{"test_id", r.test_id},
         {"window", {{"start_ns", r.window.start_ns}, {"end_ns", r.window.end_ns}}},
         {"scenario_id", r.scenario_id},
         {"traffic_id", r.traffic_id},
         {"targets", r.targets}};
}

void from_json(const json& j, CollectRequest& r) {
    r.test_id = j.at("test_id").get<std::string>();
    r.window.start_ns = j.at("window").at("start_ns").get<int64_t>();
    r.window.end_ns = j.at("window").at("end_ns").get<int64_t>();
    r.scenario_id = j.value("scenario_id", int64_t{0});
    r.traffic_id = j.value("traffic_id", int64_t{0});
    r.targets = j.at("targets").get<std::vector<CollectTarget>>();
}

void to_json(json& j, const TargetResult& t) {
    j = {{"name", t.name},
         {"source", source_name(t.source)},
         {"target", t.target},
         {"class", t.component_class},
         {"ok", t.ok},
         {"error", t.error},
         {"energy_j", t.energy.energy_j},
         {"mean_power_w", t.energy.mean_power_w},
         {"covered_fraction", t.energy.covered_fraction},
         {"gap_count", t.energy.gap_count},
         {"empty", t.energy.empty},
         {"sample_count", t.sample_count},
         {"series_ref", t.series_ref}};
}

void from_json(const json& j, TargetResult& t) {
    t.name = j.at("name").get<std::string>();
    t.source = source_from_name(j.at("source").get<std::string>());
    t.target = j.at("target").get<std::string>();
    t.component_class = j.at("class").get<std::string>();
    t.ok = j.at("ok").get<bool>();
    t.error = j.at("error").get<std::string>();
    t.energy.energy_j = j.at("energy_j").get<double>();
    t.energy.mean_power_w = j.at("mean_power_w").get<double>();
    t.energy.covered_fraction = j.at("covered_fraction").get<double>();
    t.energy.gap_count = j.at("gap_count").get<int>();
    t.energy.empty = j.at("empty").get<bool>();
    t.sample_count = j.at("sample_count").get<size_t>();
    t.series_ref = j.at("series_ref").get<std::string>();
}

void to_json(json& j, const PowerReport& r) {
    j = {{"test_id", r.test_id},
         {"window", {{"start_ns", r.window.start_ns}, {"end_ns", r.window.end_ns}}},
         {"partial", r.partial},
         {"targets", r.targets},
         {"totals_energy_j", r.totals_energy_j}};
}

void from_json(const json& j, PowerReport& r) {
    r.test_id = j.at("test_id").get<std::string>();
    r.window.start_ns = j.at("window").at("start_ns").get<int64_t>();
    r.window.end_ns = j.at("window").at("end_ns").get<int64_t>();
    r.partial = j.at("partial").get<bool>();
    r.targets = j.at("targets").get<std::vector<TargetResult>>();
    r.totals_energy_j =
        j.at("totals_energy_j").get<std::map<std::string, double>>();
}

void to_json(json& j, const UeResult& u) {
    j = {{"ue_index", u.ue_index},
         {"protocol", u.protocol},
         {"direction", u.direction},
         {"duration_s", u.duration_s},
         {"bits_transferred", u.bits_transferred},
         {"mean_bitrate_bps", u.mean_bitrate_bps},
         {"jitter_ms", u.jitter_ms},
         {"lost_percent", u.lost_percent},
         {"retransmits", u.retransmits}};
}

void from_json(const json& j, UeResult& u) {
    u.ue_index = j.at("ue_index").get<int>();
    u.protocol = j.at("protocol").get<std::string>();
    u.direction = j.at("direction").get<std::string>();
    u.duration_s = j.at("duration_s").get<double>();
    u.bits_transferred = j.at("bits_transferred").get<int64_t>();
    u.mean_bitrate_bps = j.at("mean_bitrate_bps").get<double>();
    u.jitter_ms = j.at("jitter_ms").get<double>();
    u.lost_percent = j.at("lost_percent").get<double>();
    u.retransmits = j.at("retransmits").get<int>();
}

void to_json(json& j, const PerfRecord& r) {
    j = {{"test_id", r.test_id},
         {"ue_results", r.ue_results},
         {"aggregate_bits", r.aggregate_bits},
         {"aggregate_mean_bitrate_bps", r.aggregate_mean_bitrate_bps}};
}

void from_json(const json& j, PerfRecord& r) {
    r.test_id = j.at("test_id").get<std::string>();
    r.ue_results = j.at("ue_results").get<std::vector<UeResult>>();
    r.aggregate_bits = j.at("aggregate_bits").get<int64_t>();
    r.aggregate_mean_bitrate_bps = j.at("aggregate_mean_bitrate_bps").get<double>();
}

// ---- collection core ---------------------------------------------------------

PowerReport collect_power(const CollectorConfig& cfg, const CollectRequest& req) {
    if (!safe_id(req.test_id)) throw std::invalid_argument("bad test_id");
    if (!req.window.valid()) throw std::invalid_argument("window must satisfy start < end");
    if (req.targets.empty()) throw std::invalid_argument("at least one telemetry target required");
    if (!cfg.clock_url.empty()) {
        const int64_t now = http::get_json(cfg.clock_url, "/sim/clock").at("now_ns").get<int64_t>();
        if (req.window.end_ns > now)
            throw std::invalid_argument("window end is in the future");
    }

    ts::SeriesStore store(cfg.store_dir);
    std::vector<std::future<TargetResult>> futs;
    futs.reserve(req.targets.size());
    for (const auto& t : req.targets)
        futs.push_back(std::async(std::launch::async, [&cfg, &store, &req, t] {
            return pull_target(cfg, store, req.window, t);
        }));

    PowerReport report;
    report.test_id = req.test_id;
    report.window = req.window;
    for (auto& f : futs) report.targets.push_back(f.get());

    double pod_energy = 0.0;
    for (const auto& t : report.targets) {
        if (!t.ok) {
            report.partial = true;
            continue;
        }
        report.totals_energy_j[t.component_class] += t.energy.energy_j;
        if (t.source == Source::POD_ESTIMATOR) pod_energy += t.energy.energy_j;
    }
    // The platform class is the residual node draw: outlet energy minus every
    // pod attributed on the same nodes.
    if (auto it = report.totals_energy_j.find("platform"); it != report.totals_energy_j.end())
        it->second -= pod_energy;

    write_json_atomic(fs::path(cfg.reports_dir) / req.test_id / "power.json",
                      json(report));
    return report;
}

void record_perf(const CollectorConfig& cfg, const PerfRecord& rec) {
    if (!safe_id(rec.test_id)) throw std::invalid_argument("bad test_id");
    int64_t sum = 0;
    for (const auto& u : rec.ue_results) sum += u.bits_transferred;
    if (sum != rec.aggregate_bits)
        throw std::invalid_argument("aggregate_bits " + std::to_string(rec.aggregate_bits) +
                                    " does not match per-UE sum " + std::to_string(sum));
    write_json_atomic(fs::path(cfg.reports_dir) / rec.test_id / "perf.json", json(rec));
}

std::optional<PowerReport> load_power_report(const std::string& reports_dir,
                                             const std::string& test_id) {
    auto j = read_json(fs::path(reports_dir) / test_id / "power.json");
    if (!j) return std::nullopt;
    return j->get<PowerReport>();
}

std::optional<PerfRecord> load_perf_record(const std::string& reports_dir,
                                           const std::string& test_id) {
    auto j = read_json(fs::path(reports_dir) / test_id / "perf.json");
    if (!j) return std::nullopt;
    return j->get<PerfRecord>();
}

// ---- HTTP services -----------------------------------------------------------

PowerCollectorService::PowerCollectorService(CollectorConfig cfg) : cfg_(std::move(cfg)) {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        http::send_json(res, 200, {{"status", "ok"}});
    });
    server_.Post("/power/collect", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            CollectRequest cr = json::parse(req.body).get<CollectRequest>();
            PowerReport report;
            {
                std::lock_guard<std::mutex> lock(write_mu_);
                report = collect_power(cfg_, cr);
            }
            http::send_json(res, report.partial ? 207 : 200, json(report));
        } catch (const std::invalid_argument& e) {
            http::send_json(res, 400, {{"error", e.what()}});
        } catch (const std::exception& e) {
            http::send_json(res, 500, {{"error", e.what()}});
        }
    });
    server_.Get(R"(/reports/([A-Za-z0-9._-]+))",
                 [this](const httplib::Request& req, httplib::Response& res) {
                     const std::string id = req.matches[1];
                     auto power = load_power_report(cfg_.reports_dir, id);
                     auto perf = load_perf_record(cfg_.reports_dir, id);
                     if (!power && !perf) {
                         http::send_json(res, 404, {{"error", "unknown test_id '" + id + "'"}});
                         return;
                     }
                     json j = {{"test_id", id},
                               {"power", power ? json(*power) : json()},
                               {"perf", perf ? json(*perf) : json()}};
                     http::send_json(res, 200, j);
                 });
}

PerfCollectorService::PerfCollectorService(CollectorConfig cfg) : cfg_(std::move(cfg)) {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        http::send_json(res, 200, {{"status", "ok"}});
    });
    server_.Post("/perf/results", [this](const httplib::Request& req, httplib::Response& res) {
        try {
            PerfRecord rec = json::parse(req.body).get<PerfRecord>();
            {
                std::lock_guard<std::mutex> lock(write_mu_);
                record_perf(cfg_, rec);
            }
            http::send_json(res, 200, {{"test_id", rec.test_id}, {"ok", true}});
        } catch (const std::invalid_argument& e) {
            http::send_json(res, 400, {{"error", e.what()}});
        } catch (const std::exception& e) {
            http::send_json(res, 500, {{"error", e.what()}});
        }
    });
}

}  // namespace ranprof::collectors
