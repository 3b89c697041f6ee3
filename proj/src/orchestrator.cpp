// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/orchestrator.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "ranprof/http_json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ranprof::orch {

namespace {

constexpr const char* kStageNames[] = {"PARSED",  "DEPLOY_CORE", "DEPLOY_RAN",
                                       "ATTACH_UES", "EXECUTE",  "COLLECT",
                                       "AGGREGATE",  "DONE",     "FAILED"};

std::string stack_of(const std::string& cu_name) {
    auto pos = cu_name.find('-');
    return pos == std::string::npos ? cu_name : cu_name.substr(0, pos);
}

}  // namespace

const char* stage_name(RunStage s) { return kStageNames[static_cast<int>(s)]; }

RunStage stage_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(RunStage::FAILED); ++i)
        if (name == kStageNames[i]) return static_cast<RunStage>(i);
    throw std::invalid_argument("unknown stage '" + name + "'");
}

OrchestratorConfig OrchestratorConfig::from_json(const json& j) {
    OrchestratorConfig c;
    c.sim_url = j.value("sim_url", c.sim_url);
    c.power_collector_url = j.value("power_collector_url", c.power_collector_url);
    c.perf_collector_url = j.value("perf_collector_url", c.perf_collector_url);
    c.runs_dir = j.value("runs_dir", c.runs_dir);
    c.artifacts_dir = j.value("artifacts_dir", c.artifacts_dir);
    c.core_node = j.value("core_node", c.core_node);
    c.split8_node = j.value("split8_node", c.split8_node);
    c.split72_node = j.value("split72_node", c.split72_node);
    if (j.contains("node_outlets"))
        c.node_outlets = j.at("node_outlets").get<std::map<std::string, std::string>>();
    if (j.contains("scenario_profiles"))
        for (const auto& [id, p] : j.at("scenario_profiles").items())
            c.scenario_profiles[std::stoll(id)] = {p.value("xapp", "")};
    c.readiness_timeout_s = j.value("readiness_timeout_s", c.readiness_timeout_s);
    c.readiness_poll_s = j.value("readiness_poll_s", c.readiness_poll_s);
    c.ue_grace_s = j.value("ue_grace_s", c.ue_grace_s);
    c.collect_retries = j.value("collect_retries", c.collect_retries);
    c.collect_backoff_ms = j.value("collect_backoff_ms", c.collect_backoff_ms);
    return c;
}

// ---- node leases --------------------------------------------------------------

NodeLeaseRegistry::Lease& NodeLeaseRegistry::Lease::operator=(Lease&& o) noexcept {
    if (this != &o) {
        release();
        reg_ = o.reg_;
        nodes_ = std::move(o.nodes_);
        o.reg_ = nullptr;
    }
    return *this;
}

void NodeLeaseRegistry::Lease::release() {
    if (reg_) {
        reg_->release_nodes(nodes_);
        reg_ = nullptr;
    }
}

NodeLeaseRegistry::Lease NodeLeaseRegistry::acquire(std::vector<std::string> nodes) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] {
        for (const auto& n : nodes)
            if (leased_.count(n)) return false;
        return true;
    });
    for (const auto& n : nodes) leased_.insert(n);
    return {this, std::move(nodes)};
}

void NodeLeaseRegistry::release_nodes(const std::vector<std::string>& nodes) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        for (const auto& n : nodes) leased_.erase(n);
    }
    cv_.notify_all();
}

// ---- orchestrator ---------------------------------------------------------------

// All names a run deploys, derived from the vector + scenario profile. Pods
// are suffixed with the test id's first 8 hex digits so concurrent runs never
// collide, while the stack prefix stays first (rate lookups key on it).
struct Orchestrator::RunPlan {
    std::string stack;        // "oai" | "srsran"
    std::string gnb_pod, gnb_model, gnb_node;
    std::string ru_name, ru_model;
    std::string xapp_pod, xapp_model;  // empty when the profile has no xApp
    std::vector<std::pair<std::string, std::string>> core_pods;  // name, model
    std::vector<std::string> nodes;  // distinct metered nodes in use

    static RunPlan build(const OrchestratorConfig& cfg, const testspec::TestVector& v,
                         const std::string& test_id) {
        RunPlan p;
        const std::string id8 = test_id.substr(0, 8);
        p.stack = stack_of(v.network_scenario.ran.cu.name);
        ScenarioProfile profile;
        if (auto it = cfg.scenario_profiles.find(v.network_scenario.id);
            it != cfg.scenario_profiles.end())
            profile = it->second;

        if (profile.xapp.empty()) {
            p.gnb_pod = p.stack + "-gnb-" + id8;
            p.gnb_model = p.stack + "-gnb";
        } else {
            p.gnb_pod = p.stack + "-cudu-" + id8;
            p.gnb_model = p.stack + "-cudu-" + profile.xapp;
            p.xapp_pod = "xapp-" + profile.xapp + "-" + id8;
            p.xapp_model = "xapp-" + profile.xapp;
        }
        p.gnb_node = v.network_scenario.ran.functional_split == "8" ? cfg.split8_node
                                                                    : cfg.split72_node;
        p.ru_name = "ru-" + id8;
        if (v.network_scenario.ran.ru.name == "usrp")
            p.ru_model = "ru-usrp";
        else
            p.ru_model = profile.xapp.empty() ? "ru-foxconn" : "ru-foxconn-" + profile.xapp;
        for (const char* nf : {"upf", "amf", "smf"})
            p.core_pods.emplace_back(std::string(nf) + "-" + id8, nf);

        p.nodes = {cfg.core_node, p.gnb_node};
        std::sort(p.nodes.begin(), p.nodes.end());
        p.nodes.erase(std::unique(p.nodes.begin(), p.nodes.end()), p.nodes.end());
        return p;
    }

    std::map<std::string, std::string> placements(const OrchestratorConfig& cfg) const {
        std::map<std::string, std::string> m;
        for (const auto& [pod, _] : core_pods) m[pod] = cfg.core_node;
        m[gnb_pod] = gnb_node;
        if (!xapp_pod.empty()) m[xapp_pod] = cfg.core_node;
        m[ru_name] = "";  // separately metered radio site
        return m;
    }
};

Orchestrator::Orchestrator(OrchestratorConfig cfg, uint64_t seed)
    : cfg_(std::move(cfg)), rng_(seed) {}

int64_t Orchestrator::clock_now() const {
    return http::get_json(cfg_.sim_url, "/sim/clock").at("now_ns").get<int64_t>();
}

void Orchestrator::advance(double seconds) const {
    http::post_json(cfg_.sim_url, "/sim/clock/advance",
                    {{"dur_ns", seconds_to_ns(seconds)}});
}

void Orchestrator::journal(TestRun& run, RunStage stage, const json& data) {
    fs::create_directories(cfg_.runs_dir);
    std::ofstream out(fs::path(cfg_.runs_dir) / (run.test_id + ".jsonl"), std::ios::app);
    if (!out) throw std::runtime_error("cannot append to journal for " + run.test_id);
    json line = {{"ts_ns", clock_now()}, {"stage", stage_name(stage)}, {"data", data}};
    out << line.dump() << "\n";
    out.flush();
}

void Orchestrator::transition(TestRun& run, RunStage stage, const json& data) {
    journal(run, stage, data);
    run.stage = stage;
    run.history.push_back(stage);
}

void Orchestrator::deploy_and_await(const std::vector<json>& reqs,
                                    std::vector<std::string>* deployed) const {
    for (const auto& req : reqs) {
        try {
            http::post_json(cfg_.sim_url, "/sim/deploy", req);
        } catch (const http::HttpError& e) {
            throw DeployError("deploy " + req.at("name").get<std::string>() + ": " + e.what());
        }
        deployed->push_back(req.at("name").get<std::string>());
    }
    // One shared readiness loop: each advance tick counts for all components.
    std::set<std::string> pending;
    for (const auto& req : reqs) pending.insert(req.at("name").get<std::string>());
    double waited = 0;
    while (!pending.empty()) {
        json inv = http::get_json(cfg_.sim_url, "/sim/inventory");
        for (const auto& c : inv.at("components"))
            if (c.at("state") == "READY") pending.erase(c.at("name").get<std::string>());
        if (pending.empty()) break;
        if (waited >= cfg_.readiness_timeout_s)
            throw DeployError("component '" + *pending.begin() + "' not ready after " +
                              std::to_string(cfg_.readiness_timeout_s) + " s");
        advance(cfg_.readiness_poll_s);
        waited += cfg_.readiness_poll_s;
    }
}

void Orchestrator::teardown_all(const std::vector<std::string>& deployed) const {
    for (auto it = deployed.rbegin(); it != deployed.rend(); ++it) {
        try {
            http::post_json(cfg_.sim_url, "/sim/teardown", {{"name", *it}});
        } catch (const std::exception&) {
            // Teardown is best-effort cleanup; a failing call must not mask
            // the original failure.
        }
    }
}

void Orchestrator::do_collect(TestRun& run, const RunPlan& plan) {
    const fs::path art_dir = fs::path(cfg_.artifacts_dir) / run.test_id;
    fs::create_directories(art_dir);

    run.artifacts.ue_results_file = (art_dir / "ue-results.json").string();
    {
        std::ofstream out(run.artifacts.ue_results_file);
        out << json(run.ue_results).dump(2) << "\n";
    }

    run.artifacts.ru_trace_file = (art_dir / "ru-trace.csv").string();
    try {
        http::post_json(cfg_.sim_url, "/sim/ru/trace",
                        {{"ru", plan.ru_name},
                         {"start_ns", run.start_ns},
                         {"end_ns", run.end_ns},
                         {"file", run.artifacts.ru_trace_file}});
    } catch (const http::HttpError& e) {
        throw CollectError(std::string("ru trace: ") + e.what());
    }

    collectors::CollectRequest creq;
    creq.test_id = run.test_id;
    creq.window = {run.start_ns, run.end_ns};
    creq.scenario_id = run.vector.network_scenario.id;
    creq.traffic_id = run.vector.traffic_scenario.id;
    creq.targets.push_back(
        {"gnb", Source::POD_ESTIMATOR, plan.gnb_pod, "ran", ""});
    for (const auto& [pod, model] : plan.core_pods)
        creq.targets.push_back({model, Source::POD_ESTIMATOR, pod, "core", ""});
    if (!plan.xapp_pod.empty())
        creq.targets.push_back({"xapp", Source::POD_ESTIMATOR, plan.xapp_pod, "xapp", ""});
    creq.targets.push_back({"ru", Source::WATTMETER, run.artifacts.ru_trace_file, "radio",
                            plan.ru_name});
    for (const auto& node : plan.nodes) {
        auto it = cfg_.node_outlets.find(node);
        if (it != cfg_.node_outlets.end())
            creq.targets.push_back({"node:" + node, Source::PDU, it->second, "platform", ""});
    }

    collectors::PerfRecord perf;
    perf.test_id = run.test_id;
    perf.ue_results = run.ue_results;
    for (const auto& u : run.ue_results) {
        perf.aggregate_bits += u.bits_transferred;
        perf.aggregate_mean_bitrate_bps += u.mean_bitrate_bps;
    }

    json power_ack, perf_ack;
    try {
        power_ack = http::post_json_with_retry(cfg_.power_collector_url, "/power/collect",
                                               json(creq), cfg_.collect_retries,
                                               cfg_.collect_backoff_ms);
        perf_ack = http::post_json_with_retry(cfg_.perf_collector_url, "/perf/results",
                                              json(perf), cfg_.collect_retries,
                                              cfg_.collect_backoff_ms);
    } catch (const http::HttpError& e) {
        throw CollectError(e.what());
    }
    transition(run, RunStage::AGGREGATE,
               {{"power_ack_test_id", power_ack.value("test_id", "")},
                {"perf_ack_test_id", perf_ack.value("test_id", "")},
                {"totals_energy_j", power_ack.value("totals_energy_j", json::object())}});

    // Join completeness: both halves must be retrievable under this test_id.
    json joined;
    try {
        joined = http::get_json(cfg_.power_collector_url, "/reports/" + run.test_id);
    } catch (const http::HttpError& e) {
        throw CollectError(std::string("joined report: ") + e.what());
    }
    if (joined.at("power").is_null() || joined.at("perf").is_null())
        throw CollectError("joined report incomplete for " + run.test_id);
}

TestRun Orchestrator::run_test(const testspec::TestVector& v) {
    testspec::validate(v);
    if (!http::get_json(cfg_.sim_url, "/sim/health").contains("status"))
        throw std::runtime_error("simulator unreachable at " + cfg_.sim_url);

    TestRun run;
    run.vector = v;
    {
        std::lock_guard<std::mutex> lock(rng_mu_);
        run.test_id = make_uuid(rng_);
    }
    const RunPlan plan = RunPlan::build(cfg_, v, run.test_id);
    run.placements = plan.placements(cfg_);

    NodeLeaseRegistry::Lease lease = leases_.acquire(plan.nodes);
    transition(run, RunStage::PARSED,
               {{"test_id", run.test_id},
                {"vector", json::parse(testspec::serialize_test_vector(v))},
                {"placements", run.placements}});

    std::vector<std::string> deployed;
    try {
        transition(run, RunStage::DEPLOY_CORE, {});
        {
            std::vector<json> reqs;
            for (const auto& [pod, model] : plan.core_pods)
                reqs.push_back({{"name", pod},
                                {"kind", "pod"},
                                {"node", cfg_.core_node},
                                {"model", model},
                                {"gnb_link", "*"}});
            deploy_and_await(reqs, &deployed);
        }

        transition(run, RunStage::DEPLOY_RAN, {});
        {
            std::vector<json> reqs;
            reqs.push_back({{"name", plan.gnb_pod},
                            {"kind", "pod"},
                            {"node", plan.gnb_node},
                            {"model", plan.gnb_model}});
            reqs.push_back({{"name", plan.ru_name},
                            {"kind", "ru"},
                            {"model", plan.ru_model},
                            {"antenna_layout", v.network_scenario.ran.ru.antenna_layout},
                            {"gnb_link", plan.gnb_pod},
                            {"address", v.network_scenario.ran.ru.address}});
            if (!plan.xapp_pod.empty())
                reqs.push_back({{"name", plan.xapp_pod},
                                {"kind", "pod"},
                                {"node", cfg_.core_node},
                                {"model", plan.xapp_model},
                                {"gnb_link", plan.gnb_pod}});
            deploy_and_await(reqs, &deployed);
        }

        transition(run, RunStage::ATTACH_UES, {});
        for (size_t i = 0; i < v.traffic_scenario.ue_specification.size(); ++i) {
            try {
                http::post_json(cfg_.sim_url, "/sim/ue/attach",
                                {{"ue_index", static_cast<int>(i)}, {"gnb", plan.gnb_pod}});
            } catch (const http::HttpError& e) {
                throw DeployError("attach ue " + std::to_string(i) + ": " + e.what());
            }
        }

        run.start_ns = clock_now();
        transition(run, RunStage::EXECUTE, {{"start_ns", run.start_ns}});
        std::vector<std::string> sessions;
        double max_dur = 0;
        for (size_t i = 0; i < v.traffic_scenario.ue_specification.size(); ++i) {
            const auto& ue = v.traffic_scenario.ue_specification[i];
            json req = {{"ue_index", static_cast<int>(i)},
                        {"gnb", plan.gnb_pod},
                        {"protocol", ue.protocol},
                        {"direction", testspec::direction_of(ue)},
                        {"duration_s", ue.duration_s}};
            if (ue.protocol == "udp") req["target_mbps"] = *ue.bandwidth_mbps;
            try {
                sessions.push_back(http::post_json(cfg_.sim_url, "/sim/ue/traffic", req)
                                       .at("session_id")
                                       .get<std::string>());
            } catch (const http::HttpError& e) {
                throw TrafficError("start traffic ue " + std::to_string(i) + ": " + e.what());
            }
            max_dur = std::max(max_dur, ue.duration_s);
        }
        run.end_ns = run.start_ns + seconds_to_ns(max_dur);

        advance(max_dur);
        std::vector<bool> have(sessions.size(), false);
        run.ue_results.resize(sessions.size());
        double grace_used = 0;
        for (;;) {
            bool all = true;
            for (size_t i = 0; i < sessions.size(); ++i) {
                if (have[i]) continue;
                try {
                    json r = http::get_json(cfg_.sim_url,
                                            "/sim/ue/result?session_id=" + sessions[i]);
                    run.ue_results[i] = r.get<collectors::UeResult>();
                    have[i] = true;
                } catch (const http::HttpError& e) {
                    if (e.status() != 409) throw TrafficError(e.what());
                    all = false;
                }
            }
            if (all) break;
            if (grace_used >= cfg_.ue_grace_s) {
                size_t missing = 0;
                while (have[missing]) ++missing;
                throw TrafficError("ue " + std::to_string(missing) + " returned no result " +
                                   std::to_string(max_dur + grace_used) + " s after start");
            }
            advance(cfg_.readiness_poll_s);
            grace_used += cfg_.readiness_poll_s;
        }

        transition(run, RunStage::COLLECT,
                   {{"end_ns", run.end_ns},
                    {"ru_trace_file",
                     (fs::path(cfg_.artifacts_dir) / run.test_id / "ru-trace.csv").string()},
                    {"ue_results", json(run.ue_results)}});
        do_collect(run, plan);  // transitions to AGGREGATE internally

        teardown_all(deployed);
        transition(run, RunStage::DONE, {});
    } catch (const TrafficError& e) {
        // Best-effort collection first: the raw artifacts are worth keeping
        // even when a UE came back empty-handed.
        const RunStage at = run.stage;
        transition(run, RunStage::COLLECT,
                   {{"end_ns", run.end_ns}, {"note", "collect attempt after traffic failure"}});
        try {
            do_collect(run, plan);
        } catch (const std::exception&) {
        }
        teardown_all(deployed);
        run.failure = {at, e.what()};
        transition(run, RunStage::FAILED,
                   {{"failed_stage", stage_name(at)}, {"message", e.what()}});
    } catch (const std::exception& e) {
        const RunStage at = run.stage;
        teardown_all(deployed);
        run.failure = {at, e.what()};
        transition(run, RunStage::FAILED,
                   {{"failed_stage", stage_name(at)}, {"message", e.what()}});
    }
    return run;
}

TestRun Orchestrator::recover_run(const std::string& journal_path) {
    std::ifstream in(journal_path);
    if (!in) throw std::runtime_error("cannot open journal " + journal_path);
    TestRun run;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json entry = json::parse(line);
        RunStage stage = stage_from_name(entry.at("stage").get<std::string>());
        const json& data = entry.at("data");
        if (first) {
            if (stage != RunStage::PARSED)
                throw std::runtime_error("journal does not start with PARSED");
            run.test_id = data.at("test_id").get<std::string>();
            run.vector = testspec::parse_test_vector(data.at("vector").dump());
            run.placements =
                data.at("placements").get<std::map<std::string, std::string>>();
            first = false;
        }
        run.stage = stage;
        run.history.push_back(stage);
        if (stage == RunStage::EXECUTE) run.start_ns = data.at("start_ns").get<int64_t>();
        if (stage == RunStage::COLLECT) {
            run.end_ns = data.value("end_ns", run.end_ns);
            run.artifacts.ru_trace_file = data.value("ru_trace_file", "");
            if (data.contains("ue_results"))
                run.ue_results = data.at("ue_results").get<std::vector<collectors::UeResult>>();
        }
        if (stage == RunStage::FAILED)
            run.failure = {stage_from_name(data.at("failed_stage").get<std::string>()),
                           data.at("message").get<std::string>()};
    }
    if (first) throw std::runtime_error("empty journal " + journal_path);
    return run;
}

}  // namespace ranprof::orch
