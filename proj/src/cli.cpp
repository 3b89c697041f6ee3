// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/cli.hpp"

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "ranprof/analytics.hpp"
#include "ranprof/collectors.hpp"
#include "ranprof/http_json.hpp"
#include "ranprof/orchestrator.hpp"
#include "ranprof/rng.hpp"
#include "ranprof/sim/engine.hpp"
#include "ranprof/sim/service.hpp"
#include "ranprof/testspec.hpp"

namespace ranprof::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct HostPort {
    std::string host;
    int port = 0;
};

// Accepts "http://host:port"; the explicit port keeps service wiring
// unambiguous when several processes share a machine.
HostPort parse_host_port(const std::string& url) {
    const std::string prefix = "http://";
    if (url.rfind(prefix, 0) != 0)
        throw std::invalid_argument("url must start with http://: " + url);
    std::string rest = url.substr(prefix.size());
    auto colon = rest.rfind(':');
    if (colon == std::string::npos || colon == 0)
        throw std::invalid_argument("url must carry an explicit port: " + url);
    HostPort hp;
    hp.host = rest.substr(0, colon);
    std::string port_str = rest.substr(colon + 1);
    if (port_str.empty() ||
        port_str.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("invalid port in url: " + url);
    hp.port = std::atoi(port_str.c_str());
    if (hp.port < 1 || hp.port > 65535)
        throw std::invalid_argument("port out of range in url: " + url);
    return hp;
}

std::vector<std::string> split_csv(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

bool service_reachable(const std::string& base_url, const std::string& path) {
    try {
        http::get_json(base_url, path);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

// run/sweep need the whole pipeline up front; a late discovery would leave a
// half-orchestrated run behind.
int check_environment(const CliConfig& cfg) {
    struct Probe {
        const std::string& url;
        const char* path;
        const char* what;
    };
    const Probe probes[] = {
        {cfg.sim_url, "/sim/health", "simulator"},
        {cfg.power_collector_url, "/health", "power collector"},
        {cfg.perf_collector_url, "/health", "performance collector"},
    };
    for (const auto& p : probes) {
        if (!service_reachable(p.url, p.path)) {
            std::cerr << "error: " << p.what << " unreachable at " << p.url
                      << " (is `ranprof sim start` running?)\n";
            return kExitRun;
        }
    }
    return kExitOk;
}

orch::OrchestratorConfig make_orch_config(const CliConfig& cfg) {
    orch::OrchestratorConfig oc =
        orch::OrchestratorConfig::from_json(cfg.orchestrator_overrides);
    oc.sim_url = cfg.sim_url;
    oc.power_collector_url = cfg.power_collector_url;
    oc.perf_collector_url = cfg.perf_collector_url;
    oc.runs_dir = (fs::path(cfg.data_dir) / "runs").string();
    oc.artifacts_dir = (fs::path(cfg.data_dir) / "artifacts").string();
    return oc;
}

testspec::TestVector load_vector_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open vector file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    std::vector<std::string> warnings;
    testspec::TestVector tv = testspec::parse_test_vector(text, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << path << ": " << w << "\n";
    return tv;
}

void reset_sim(const CliConfig& cfg) {
    http::post_json(cfg.sim_url, "/sim/reset", json{{"seed", cfg.seed}});
}

int cmd_run(const CliConfig& cfg, const std::string& vector_path, int reps) {
    testspec::TestVector tv;
    try {
        tv = load_vector_or_throw(vector_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
    if (int rc = check_environment(cfg); rc != kExitOk) return rc;

    try {
        reset_sim(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: simulator reset failed: " << e.what() << "\n";
        return kExitRun;
    }

    orch::Orchestrator orchestrator(make_orch_config(cfg), cfg.seed);
    bool all_done = true;
    for (int rep = 0; rep < reps; ++rep) {
        std::cerr << "run " << (rep + 1) << "/" << reps << ": " << vector_path
                  << "\n";
        try {
            orch::TestRun run = orchestrator.run_test(tv);
            std::cout << run.test_id << "\n";
            if (run.stage != orch::RunStage::DONE) {
                all_done = false;
                std::cerr << "run " << run.test_id << " finished "
                          << orch::stage_name(run.stage);
                if (run.failure)
                    std::cerr << " (failed at "
                              << orch::stage_name(run.failure->stage) << ": "
                              << run.failure->message << ")";
                std::cerr << "\n";
            } else {
                std::cerr << "run " << run.test_id << " DONE\n";
            }
        } catch (const std::exception& e) {
            std::cerr << "error: run aborted: " << e.what() << "\n";
            return kExitRun;
        }
    }
    return all_done ? kExitOk : kExitRun;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

int cmd_sweep(const CliConfig& cfg, const std::string& vector_path,
              const std::string& param, const std::string& values_csv,
              int reps, std::string label) {
    testspec::TestVector base;
    try {
        base = load_vector_or_throw(vector_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    std::vector<double> values;
    for (const auto& tok : split_csv(values_csv)) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            std::cerr << "error: --values entry is not numeric: " << tok << "\n";
            return kExitParse;
        }
        values.push_back(v);
    }
    if (values.empty()) {
        std::cerr << "error: --values must list at least one number\n";
        return kExitParse;
    }

    // Validate the parameter path against the base document before any run
    // starts, so a typo cannot silently sweep nothing.
    std::vector<json> docs;
    for (double v : values) {
        json doc = json::parse(testspec::serialize_test_vector(base));
        try {
            apply_param(doc, param, v);
        } catch (const std::exception& e) {
            std::cerr << "error: --param " << param << ": " << e.what() << "\n";
            return kExitParse;
        }
        docs.push_back(std::move(doc));
    }

    if (label.empty()) label = fs::path(vector_path).stem().string();
    if (int rc = check_environment(cfg); rc != kExitOk) return rc;

    // The sweep id is a pure function of the request, so re-issuing the same
    // sweep overwrites its own manifest instead of accumulating clones.
    std::string spec = label + "|" + param + "|" + values_csv + "|" +
                       std::to_string(reps);
    uint64_t h = stable_hash64(cfg.seed, spec, 0);
    char idbuf[32];
    std::snprintf(idbuf, sizeof(idbuf), "sweep-%012llx",
                  static_cast<unsigned long long>(h & 0xffffffffffffULL));
    std::string sweep_id = idbuf;

    try {
        reset_sim(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: simulator reset failed: " << e.what() << "\n";
        return kExitRun;
    }

    orch::Orchestrator orchestrator(make_orch_config(cfg), cfg.seed);
    json manifest = {{"sweep_id", sweep_id}, {"label", label},
                     {"param", param},       {"values", values},
                     {"reps", reps},         {"runs", json::array()}};
    fs::path sweep_dir = fs::path(cfg.data_dir) / "sweeps";
    fs::create_directories(sweep_dir);
    fs::path manifest_path = sweep_dir / (sweep_id + ".json");
    bool all_done = true;

    for (size_t i = 0; i < values.size(); ++i) {
        testspec::TestVector tv;
        try {
            tv = testspec::parse_test_vector(docs[i].dump(), nullptr);
        } catch (const std::exception& e) {
            std::cerr << "error: value " << format_double(values[i])
                      << " yields an invalid vector: " << e.what() << "\n";
            return kExitParse;
        }
        for (int rep = 0; rep < reps; ++rep) {
            std::cerr << "sweep " << sweep_id << ": " << param << "="
                      << format_double(values[i]) << " rep " << (rep + 1) << "/"
                      << reps << "\n";
            try {
                orch::TestRun run = orchestrator.run_test(tv);
                if (run.stage != orch::RunStage::DONE) all_done = false;
                manifest["runs"].push_back(
                    {{"test_id", run.test_id},
                     {"value", values[i]},
                     {"rep", rep},
                     {"stage", orch::stage_name(run.stage)}});
                std::cerr << "  " << run.test_id << " "
                          << orch::stage_name(run.stage) << "\n";
            } catch (const std::exception& e) {
                std::cerr << "error: sweep aborted: " << e.what() << "\n";
                // Persist what ran so already-finished runs stay reportable.
                std::ofstream out(manifest_path, std::ios::trunc);
                out << manifest.dump(2) << "\n";
                return kExitRun;
            }
            // Rewrite after every run: the manifest is the join point for
            // `report`, so it must survive an interrupted sweep.
            std::ofstream out(manifest_path, std::ios::trunc);
            out << manifest.dump(2) << "\n";
        }
    }
    std::cout << sweep_id << "\n";
    std::cerr << "sweep manifest: " << manifest_path.string() << "\n";
    return all_done ? kExitOk : kExitRun;
}

int cmd_report(const CliConfig& cfg, const std::string& id,
               const std::string& format, const std::string& classes_csv,
               std::string out_path) {
    std::vector<std::string> classes = split_csv(classes_csv);
    if (classes.empty()) {
        std::cerr << "error: --classes must name at least one component class\n";
        return kExitParse;
    }
    fs::path data(cfg.data_dir);
    std::string reports_dir = (data / "reports").string();
    fs::path sweep_manifest = data / "sweeps" / (id + ".json");

    try {
        if (fs::exists(sweep_manifest)) {
            std::ifstream in(sweep_manifest);
            json manifest = json::parse(in);
            std::vector<analytics::RunObservation> observations;
            for (const auto& r : manifest["runs"]) {
                std::string test_id = r["test_id"].get<std::string>();
                if (r.value("stage", "") != std::string("DONE")) {
                    std::cerr << "skipping " << test_id << " (stage "
                              << r.value("stage", "?") << ")\n";
                    continue;
                }
                auto power = collectors::load_power_report(reports_dir, test_id);
                auto perf = collectors::load_perf_record(reports_dir, test_id);
                if (!power || !perf) {
                    std::cerr << "skipping " << test_id << " (no report)\n";
                    continue;
                }
                analytics::RunObservation obs;
                obs.label = manifest.value("label", id);
                obs.load_mbps = r["value"].get<double>();
                try {
                    analytics::EfficiencyReport er =
                        analytics::energy_efficiency(*power, *perf, classes);
                    obs.efficiency_mbit_per_j = er.efficiency_mbit_per_j;
                } catch (const analytics::ZeroEnergy&) {
                    std::cerr << "skipping " << test_id
                              << " (no energy in selected classes)\n";
                    continue;
                }
                for (const auto& t : power->targets)
                    if (t.ok && !t.energy.empty)
                        obs.mean_power_w[t.name] = t.energy.mean_power_w;
                observations.push_back(std::move(obs));
            }
            if (observations.empty()) {
                std::cerr << "error: sweep " << id
                          << " has no completed runs to report\n";
                return kExitRun;
            }
            analytics::Comparison cmp =
                analytics::compare_configurations(observations);
            if (out_path.empty())
                out_path = (data / "sweeps" / (id + ".report." + format)).string();
            analytics::emit_plot_data(cmp, format, out_path);
            std::cout << out_path << "\n";
            return kExitOk;
        }

        auto power = collectors::load_power_report(reports_dir, id);
        if (!power) {
            std::cerr << "error: unknown test or sweep id: " << id << "\n";
            return kExitUnknownId;
        }
        auto perf = collectors::load_perf_record(reports_dir, id);
        if (!perf) {
            std::cerr << "error: " << id
                      << " has power data but no performance record\n";
            return kExitUnknownId;
        }
        analytics::EfficiencyReport er =
            analytics::energy_efficiency(*power, *perf, classes);
        if (out_path.empty()) {
            fs::create_directories(data / "reports" / id);
            out_path = (data / "reports" / id / ("report." + format)).string();
        }
        analytics::emit_plot_data(er, format, out_path);
        std::cout << out_path << "\n";
        return kExitOk;
    } catch (const analytics::ZeroEnergy& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "error: report failed: " << e.what() << "\n";
        return kExitRun;
    }
}

std::atomic<bool> g_stop_requested{false};

void handle_stop_signal(int) { g_stop_requested.store(true); }

int cmd_sim_serve(const CliConfig& cfg) {
    HostPort sim_hp = parse_host_port(cfg.sim_url);
    HostPort power_hp = parse_host_port(cfg.power_collector_url);
    HostPort perf_hp = parse_host_port(cfg.perf_collector_url);

    json sim_json = cfg.sim_overrides;
    if (!sim_json.contains("seed")) sim_json["seed"] = cfg.seed;
    if (!sim_json.contains("warp")) sim_json["warp"] = cfg.warp;
    sim::SimEngine engine(sim::SimConfig::from_json(sim_json));
    sim::SimService sim_service(engine);
    if (!sim_service.start(sim_hp.host, sim_hp.port)) {
        std::cerr << "error: cannot bind simulator to " << cfg.sim_url << "\n";
        return kExitPortConflict;
    }

    collectors::CollectorConfig cc;
    cc.telemetry_url = cfg.sim_url;
    cc.clock_url = cfg.sim_url;
    cc.store_dir = (fs::path(cfg.data_dir) / "store").string();
    cc.reports_dir = (fs::path(cfg.data_dir) / "reports").string();
    collectors::PowerCollectorService power_service(cc);
    collectors::PerfCollectorService perf_service(cc);
    if (!power_service.start(power_hp.host, power_hp.port)) {
        std::cerr << "error: cannot bind power collector to "
                  << cfg.power_collector_url << "\n";
        sim_service.stop();
        return kExitPortConflict;
    }
    if (!perf_service.start(perf_hp.host, perf_hp.port)) {
        std::cerr << "error: cannot bind performance collector to "
                  << cfg.perf_collector_url << "\n";
        power_service.stop();
        sim_service.stop();
        return kExitPortConflict;
    }

    std::cerr << "simulator:             " << cfg.sim_url << "\n"
              << "power collector:       " << cfg.power_collector_url << "\n"
              << "performance collector: " << cfg.perf_collector_url << "\n"
              << "data dir:              " << cfg.data_dir << "\n";

    std::signal(SIGTERM, handle_stop_signal);
    std::signal(SIGINT, handle_stop_signal);
    while (!g_stop_requested.load())
        std::this_thread::sleep_for(std::chrono::milliseconds(100));

    std::cerr << "shutting down\n";
    perf_service.stop();
    power_service.stop();
    sim_service.stop();
    return kExitOk;
}

fs::path pidfile_path(const CliConfig& cfg) {
    return fs::path(cfg.data_dir) / "sim.pid";
}

std::optional<pid_t> read_pidfile(const fs::path& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    long pid = 0;
    in >> pid;
    if (pid <= 0) return std::nullopt;
    return static_cast<pid_t>(pid);
}

bool process_alive(pid_t pid) { return ::kill(pid, 0) == 0; }

int cmd_sim_start(const CliConfig& cfg, const std::string& config_path) {
    fs::create_directories(cfg.data_dir);
    fs::path pidfile = pidfile_path(cfg);
    if (auto pid = read_pidfile(pidfile); pid && process_alive(*pid)) {
        std::cerr << "error: simulator already running (pid " << *pid << ")\n";
        return kExitPortConflict;
    }
    // A simulator started from elsewhere (other data dir, foreground serve)
    // owns the port just the same; probing beats racing the child's bind.
    if (service_reachable(cfg.sim_url, "/sim/health")) {
        std::cerr << "error: something already answers at " << cfg.sim_url
                  << "\n";
        return kExitPortConflict;
    }

    char self_buf[4096];
    ssize_t n = ::readlink("/proc/self/exe", self_buf, sizeof(self_buf) - 1);
    if (n <= 0) {
        std::cerr << "error: cannot resolve own executable path\n";
        return kExitRun;
    }
    self_buf[n] = '\0';
    std::string log_path = (fs::path(cfg.data_dir) / "sim.log").string();

    pid_t child = ::fork();
    if (child < 0) {
        std::cerr << "error: fork failed: " << std::strerror(errno) << "\n";
        return kExitRun;
    }
    if (child == 0) {
        ::setsid();
        int fd = ::open(log_path.c_str(), O_CREAT | O_WRONLY | O_APPEND, 0644);
        if (fd >= 0) {
            ::dup2(fd, 1);
            ::dup2(fd, 2);
            if (fd > 2) ::close(fd);
        }
        ::close(0);
        std::vector<std::string> args = {
            self_buf,     "sim",
            "serve",      "--sim-url",
            cfg.sim_url,  "--power-url",
            cfg.power_collector_url,
            "--perf-url", cfg.perf_collector_url,
            "--data-dir", cfg.data_dir,
            "--seed",     std::to_string(cfg.seed),
            "--warp",     format_double(cfg.warp)};
        if (!config_path.empty()) {
            args.push_back("--config");
            args.push_back(config_path);
        }
        std::vector<char*> argv;
        argv.reserve(args.size() + 1);
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        ::execv(self_buf, argv.data());
        ::_exit(127);
    }

    // Parent: the child either binds and answers /sim/health, or exits with
    // its own diagnosis (port conflict => 5), which we pass through.
    for (int i = 0; i < 100; ++i) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
        int status = 0;
        pid_t r = ::waitpid(child, &status, WNOHANG);
        if (r == child) {
            int code = WIFEXITED(status) ? WEXITSTATUS(status) : kExitRun;
            std::cerr << "error: simulator exited during startup (code " << code
                      << "); see " << log_path << "\n";
            return code == kExitPortConflict ? kExitPortConflict : kExitRun;
        }
        if (service_reachable(cfg.sim_url, "/sim/health")) {
            std::ofstream out(pidfile, std::ios::trunc);
            out << child << "\n";
            std::cerr << "simulator started (pid " << child << ", log "
                      << log_path << ")\n";
            std::cout << child << "\n";
            return kExitOk;
        }
    }
    ::kill(child, SIGTERM);
    std::cerr << "error: simulator did not become healthy within 10 s\n";
    return kExitRun;
}

int cmd_sim_stop(const CliConfig& cfg) {
    fs::path pidfile = pidfile_path(cfg);
    auto pid = read_pidfile(pidfile);
    if (!pid || !process_alive(*pid)) {
        // Idempotent: stopping a stopped simulator succeeds.
        std::error_code ec;
        fs::remove(pidfile, ec);
        std::cerr << "simulator not running\n";
        return kExitOk;
    }
    ::kill(*pid, SIGTERM);
    for (int i = 0; i < 50 && process_alive(*pid); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    if (process_alive(*pid)) ::kill(*pid, SIGKILL);
    std::error_code ec;
    fs::remove(pidfile, ec);
    std::cerr << "simulator stopped (pid " << *pid << ")\n";
    return kExitOk;
}

int cmd_sim_status(const CliConfig& cfg) {
    try {
        json inventory = http::get_json(cfg.sim_url, "/sim/inventory");
        json clock = http::get_json(cfg.sim_url, "/sim/clock");
        json status = {{"sim_url", cfg.sim_url},
                       {"clock", clock},
                       {"inventory", inventory}};
        std::cout << status.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception&) {
        std::cerr << "error: simulator unreachable at " << cfg.sim_url << "\n";
        return kExitRun;
    }
}

}  // namespace

CliConfig CliConfig::load(const std::string& config_path) {
    CliConfig c;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in)
            throw std::invalid_argument("cannot open config file: " + config_path);
        json j = json::parse(in);
        c.sim_url = j.value("sim_url", c.sim_url);
        c.power_collector_url =
            j.value("power_collector_url", c.power_collector_url);
        c.perf_collector_url =
            j.value("perf_collector_url", c.perf_collector_url);
        c.data_dir = j.value("data_dir", c.data_dir);
        c.seed = j.value("seed", c.seed);
        c.warp = j.value("warp", c.warp);
        c.default_reps = j.value("default_reps", c.default_reps);
        if (j.contains("sim")) c.sim_overrides = j.at("sim");
        if (j.contains("orchestrator"))
            c.orchestrator_overrides = j.at("orchestrator");
    }
    if (const char* v = std::getenv("RANPROF_SIM_URL")) c.sim_url = v;
    if (const char* v = std::getenv("RANPROF_POWER_COLLECTOR_URL"))
        c.power_collector_url = v;
    if (const char* v = std::getenv("RANPROF_PERF_COLLECTOR_URL"))
        c.perf_collector_url = v;
    if (const char* v = std::getenv("RANPROF_DATA_DIR")) c.data_dir = v;
    if (const char* v = std::getenv("RANPROF_SEED"))
        c.seed = std::strtoull(v, nullptr, 10);
    if (const char* v = std::getenv("RANPROF_WARP"))
        c.warp = std::strtod(v, nullptr);
    if (const char* v = std::getenv("RANPROF_REPS"))
        c.default_reps = std::atoi(v);
    return c;
}

void CliConfig::validate() const {
    parse_host_port(sim_url);
    parse_host_port(power_collector_url);
    parse_host_port(perf_collector_url);
    if (data_dir.empty()) throw std::invalid_argument("data_dir must be set");
    if (warp < 1.0) throw std::invalid_argument("warp must be >= 1");
    if (default_reps < 1)
        throw std::invalid_argument("default_reps must be >= 1");
    if (!sim_overrides.is_object())
        throw std::invalid_argument("sim overrides must be a JSON object");
    if (!orchestrator_overrides.is_object())
        throw std::invalid_argument("orchestrator overrides must be a JSON object");
}

namespace {

void apply_param_impl(json& node, const std::vector<std::string>& segments,
                      size_t index, double value) {
    if (!node.is_object())
        throw std::invalid_argument("path segment '" + segments[index] +
                                    "' addresses a non-object");
    std::string key = segments[index];
    if (index == 0) {
        // Operator-facing aliases for the two scenario objects.
        if (key == "traffic") key = "traffic_scenario";
        else if (key == "network") key = "network_scenario";
    }
    const bool last = (index + 1 == segments.size());

    if (node.contains(key)) {
        json& child = node.at(key);
        if (last) {
            if (!child.is_number())
                throw std::invalid_argument("field '" + key +
                                            "' is not numeric");
            child = value;
            return;
        }
        apply_param_impl(child, segments, index + 1, value);
        return;
    }

    // Not a direct member: broadcast through the node's single list-of-objects
    // member (the UE list), applying the same segment to every entry.
    json* list = nullptr;
    for (auto& [member_key, member] : node.items()) {
        (void)member_key;
        if (!member.is_array() || member.empty()) continue;
        bool all_objects = true;
        for (const auto& entry : member)
            if (!entry.is_object()) all_objects = false;
        if (!all_objects) continue;
        if (list)
            throw std::invalid_argument("path segment '" + key +
                                        "' is ambiguous between lists");
        list = &member;
    }
    if (!list)
        throw std::invalid_argument("path segment '" + key + "' not found");
    for (auto& entry : *list) {
        if (last) {
            if (entry.contains(key)) {
                if (!entry.at(key).is_number())
                    throw std::invalid_argument("field '" + key +
                                                "' is not numeric");
                entry[key] = value;
            } else if (key == "bandwidth_mbps") {
                // The one optional numeric knob that may legitimately be
                // absent; anything else absent is treated as a typo.
                entry[key] = value;
            } else {
                throw std::invalid_argument("field '" + key +
                                            "' not present in list entries");
            }
        } else {
            apply_param_impl(entry, segments, index, value);
        }
    }
}

}  // namespace

void apply_param(json& doc, const std::string& path, double value) {
    std::vector<std::string> segments;
    std::string cur;
    for (char c : path) {
        if (c == '.') {
            if (cur.empty())
                throw std::invalid_argument("empty segment in param path: " +
                                            path);
            segments.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (cur.empty())
        throw std::invalid_argument("empty segment in param path: " + path);
    segments.push_back(cur);
    apply_param_impl(doc, segments, 0, value);
}

int run_cli(int argc, char** argv) {
    // --config must be known before CLI11 runs so flags can override file
    // values; pre-scan argv for it.
    std::string config_path;
    if (const char* v = std::getenv("RANPROF_CONFIG")) config_path = v;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0) config_path = arg.substr(9);
    }

    CliConfig cfg;
    try {
        cfg = CliConfig::load(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    CLI::App app{"ranprof: automated energy-efficiency profiling for "
                 "disaggregated RAN testbeds"};
    app.fallthrough();
    std::string config_flag;
    app.add_option("--config", config_flag, "JSON config file");
    app.add_option("--sim-url", cfg.sim_url, "simulator base URL");
    app.add_option("--power-url", cfg.power_collector_url,
                   "power collector base URL");
    app.add_option("--perf-url", cfg.perf_collector_url,
                   "performance collector base URL");
    app.add_option("--data-dir", cfg.data_dir,
                   "directory for stores, reports, runs, artifacts");
    app.add_option("--seed", cfg.seed, "deterministic seed for the whole run");
    app.add_option("--warp", cfg.warp, "virtual-clock pacing factor (>= 1)");
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute a test vector");
    std::string run_vector;
    int run_reps = 0;
    run_cmd->add_option("vector", run_vector, "test vector JSON file")
        ->required();
    run_cmd->add_option("--reps", run_reps, "repetitions");

    auto* sweep_cmd =
        app.add_subcommand("sweep", "run a vector across parameter values");
    std::string sweep_vector, sweep_param, sweep_values, sweep_label;
    int sweep_reps = 0;
    sweep_cmd->add_option("vector", sweep_vector, "test vector JSON file")
        ->required();
    sweep_cmd->add_option("--param", sweep_param,
                          "dotted path, e.g. traffic.bandwidth_mbps")
        ->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated numbers")
        ->required();
    sweep_cmd->add_option("--reps", sweep_reps, "repetitions per value");
    sweep_cmd->add_option("--label", sweep_label,
                          "group label (default: vector file stem)");

    auto* report_cmd =
        app.add_subcommand("report", "emit plot-ready data for a run or sweep");
    std::string report_id, report_format = "json",
                           report_classes = "ran,radio,xapp", report_out;
    report_cmd->add_option("id", report_id, "test id or sweep id")->required();
    report_cmd->add_option("--format", report_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    report_cmd->add_option("--classes", report_classes,
                           "component classes included in the energy total");
    report_cmd->add_option("--out", report_out, "output file path");

    auto* sim_cmd = app.add_subcommand("sim", "manage the testbed simulator");
    std::string sim_action;
    sim_cmd->add_option("action", sim_action, "start|stop|status|serve")
        ->required()
        ->check(CLI::IsMember({"start", "stop", "status", "serve"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }

    if (run_cmd->parsed())
        return cmd_run(cfg, run_vector,
                       run_reps > 0 ? run_reps : cfg.default_reps);
    if (sweep_cmd->parsed())
        return cmd_sweep(cfg, sweep_vector, sweep_param, sweep_values,
                         sweep_reps > 0 ? sweep_reps : cfg.default_reps,
                         sweep_label);
    if (report_cmd->parsed())
        return cmd_report(cfg, report_id, report_format, report_classes,
                          report_out);
    if (sim_cmd->parsed()) {
        if (sim_action == "serve") return cmd_sim_serve(cfg);
        if (sim_action == "start") return cmd_sim_start(cfg, config_path);
        if (sim_action == "stop") return cmd_sim_stop(cfg);
        return cmd_sim_status(cfg);
    }
    return kExitParse;
}

}  // namespace ranprof::cli
