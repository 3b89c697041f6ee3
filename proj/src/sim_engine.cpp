// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/sim/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "ranprof/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ranprof::sim {

namespace {

std::string stack_prefix(const std::string& name) {
    auto pos = name.find('-');
    return pos == std::string::npos ? name : name.substr(0, pos);
}

// Classic water-filling: ascending targets share `capacity` fairly.
std::vector<double> waterfill(const std::vector<double>& targets, double capacity) {
    std::vector<size_t> order(targets.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return targets[a] < targets[b]; });
    std::vector<double> alloc(targets.size(), 0.0);
    double rem = std::max(0.0, capacity);
    size_t left = targets.size();
    for (size_t i : order) {
        double share = rem / static_cast<double>(left);
        alloc[i] = std::min(targets[i], share);
        rem -= alloc[i];
        --left;
    }
    return alloc;
}

}  // namespace

// ---- configuration ----------------------------------------------------------

SimConfig SimConfig::defaults() {
    SimConfig c;
    c.nodes = {{"dell-r760-1", "pdu-1-outlet-3", 200.0},
               {"microway-1", "pdu-1-outlet-7", 200.0}};
    c.reachable_ru_addresses = {"192.168.40.20", "192.168.40.21"};

    auto linear = [](double intercept, double slope, double sigma) {
        PowerModel m;
        m.kind = ModelKind::LINEAR_LOAD;
        m.intercept_w = intercept;
        m.slope_w_per_mbps = slope;
        m.noise_sigma_w = sigma;
        return m;
    };
    auto constant = [](double watts, double sigma) {
        PowerModel m;
        m.kind = ModelKind::CONSTANT;
        m.power_w = watts;
        m.noise_sigma_w = sigma;
        return m;
    };
    auto lookup = [](std::map<int, double> table, double sigma) {
        PowerModel m;
        m.kind = ModelKind::LOOKUP_UE_COUNT;
        m.table_w = std::move(table);
        m.noise_sigma_w = sigma;
        return m;
    };
    auto ru = [](std::map<int, double> deltas, double sigma) {
        PowerModel m;
        m.kind = ModelKind::RU_PROFILE;
        m.idle_by_layout = {{"2x2", 35.6}, {"4x4", 38.7}};
        m.ue_delta_w = std::move(deltas);
        m.noise_sigma_w = sigma;
        m.boot_ramp_s = 2.0;
        return m;
    };

    // Calibrated software NFs: the monolithic gNB draw rises ~36 -> 40 W over
    // a 10..70 Mbps sweep, the UPF ~1.5 -> 5 W; srsRAN's gNB is flat at 48 W.
    c.models["oai-gnb"] = linear(35.333333, 0.0666667, 0.5);
    c.models["srsran-gnb"] = constant(48.0, 0.5);
    c.models["upf"] = linear(0.9166667, 0.0583333, 0.15);
    c.models["amf"] = constant(0.6, 0.05);
    c.models["smf"] = constant(0.5, 0.05);

    // Disaggregated CU/DU pod draw by attached-UE count, one table per
    // monitoring xApp flavour (the standard-compliant service model costs
    // less on the CU/DU side than the protobuf one at low counts).
    c.models["oai-cudu-protobuf"] =
        lookup({{0, 9.5}, {1, 11.9}, {2, 13.2}, {3, 24.35}, {4, 26.15}, {5, 26.3}}, 0.3);
    c.models["oai-cudu-standard"] =
        lookup({{0, 9.0}, {1, 10.95}, {2, 11.65}, {3, 22.55}, {4, 25.9}, {5, 26.15}}, 0.3);

    // Monitoring xApps grow linearly with the number of observed UEs.
    c.models["xapp-protobuf"] =
        lookup({{0, 1.0}, {1, 1.5}, {2, 2.0}, {3, 2.5}, {4, 3.0}, {5, 3.5}}, 0.05);
    c.models["xapp-standard"] =
        lookup({{0, 1.6}, {1, 2.3}, {2, 3.0}, {3, 3.7}, {4, 4.4}, {5, 5.1}}, 0.05);

    // Commercial O-RAN radio: layout-dependent idle plus small per-UE deltas
    // (relative to the 2x2 idle reference).
    c.models["ru-foxconn-protobuf"] = ru(
        {{1, -0.2394}, {2, -0.1190}, {3, -0.0890}, {4, -0.0164}, {5, 0.0025}}, 0.1);
    c.models["ru-foxconn-standard"] = ru(
        {{1, -0.3009}, {2, -0.1538}, {3, -0.0063}, {4, 0.0625}, {5, 0.0925}}, 0.1);
    c.models["ru-foxconn"] = c.models["ru-foxconn-protobuf"];
    {
        PowerModel m;
        m.kind = ModelKind::RU_PROFILE;
        m.idle_by_layout = {{"2x2", 55.0}, {"4x4", 58.0}};
        m.noise_sigma_w = 0.1;
        m.boot_ramp_s = 2.0;
        c.models["ru-usrp"] = m;
    }

    // Steady TCP operating points per stack and direction. power_load_mbps is
    // the load the NF models see (TCP backpressure keeps the radio side well
    // below the end-to-end goodput on the downlink).
    c.traffic.tcp["oai"]["downlink"] = {125.0, 38.5};
    c.traffic.tcp["oai"]["uplink"] = {12.25, -1};
    c.traffic.tcp["srsran"]["downlink"] = {114.5, -1};
    c.traffic.tcp["srsran"]["uplink"] = {12.43, -1};
    return c;
}

SimConfig SimConfig::from_json(const json& j) {
    SimConfig c = defaults();
    c.seed = j.value("seed", c.seed);
    c.warp = j.value("warp", c.warp);
    if (c.warp < 1.0) throw std::invalid_argument("warp must be >= 1");
    c.epoch_ns = j.value("epoch_ns", c.epoch_ns);
    c.startup_delay_s = j.value("startup_delay_s", c.startup_delay_s);
    c.scrape_interval_s = j.value("scrape_interval_s", c.scrape_interval_s);
    c.pdu_interval_s = j.value("pdu_interval_s", c.pdu_interval_s);
    c.pdu_accuracy = j.value("pdu_accuracy", c.pdu_accuracy);
    c.pdu_noise_sigma_w = j.value("pdu_noise_sigma_w", c.pdu_noise_sigma_w);
    c.pdu_voltage_v = j.value("pdu_voltage_v", c.pdu_voltage_v);
    c.wattmeter_interval_s = j.value("wattmeter_interval_s", c.wattmeter_interval_s);
    c.wattmeter_jitter_s = j.value("wattmeter_jitter_s", c.wattmeter_jitter_s);
    c.wattmeter_accuracy = j.value("wattmeter_accuracy", c.wattmeter_accuracy);
    if (j.contains("nodes")) {
        c.nodes.clear();
        for (const auto& n : j.at("nodes"))
            c.nodes.push_back({n.at("name").get<std::string>(),
                               n.at("outlet").get<std::string>(),
                               n.value("baseline_w", 200.0)});
    }
    if (j.contains("reachable_ru_addresses"))
        c.reachable_ru_addresses =
            j.at("reachable_ru_addresses").get<std::vector<std::string>>();
    if (j.contains("models"))
        for (auto& [name, m] : j.at("models").items()) c.models[name] = model_from_json(m);
    if (j.contains("traffic")) {
        const json& t = j.at("traffic");
        c.traffic.capacity_dl_mbps = t.value("capacity_dl_mbps", c.traffic.capacity_dl_mbps);
        c.traffic.capacity_ul_mbps = t.value("capacity_ul_mbps", c.traffic.capacity_ul_mbps);
        c.traffic.udp_loss_percent = t.value("udp_loss_percent", c.traffic.udp_loss_percent);
        c.traffic.tcp_rate_noise_frac =
            t.value("tcp_rate_noise_frac", c.traffic.tcp_rate_noise_frac);
        if (t.contains("tcp"))
            for (auto& [stack, dirs] : t.at("tcp").items())
                for (auto& [dir, r] : dirs.items())
                    c.traffic.tcp[stack][dir] = {r.at("rate_mbps").get<double>(),
                                                 r.value("power_load_mbps", -1.0)};
    }
    return c;
}

// ---- engine -----------------------------------------------------------------

SimEngine::SimEngine(SimConfig cfg) : cfg_(std::move(cfg)), now_ns_(cfg_.epoch_ns) {}

int64_t SimEngine::now_ns() const {
    std::lock_guard<std::mutex> lock(mu_);
    return now_ns_;
}

int64_t SimEngine::advance(int64_t dur_ns) {
    if (dur_ns < 0) throw SimError(400, "cannot advance backwards");
    int64_t now;
    {
        std::lock_guard<std::mutex> lock(mu_);
        now_ns_ += dur_ns;
        now = now_ns_;
    }
    // Pacing only; virtual results never depend on the sleep.
    auto wall_us = static_cast<int64_t>(static_cast<double>(dur_ns) / cfg_.warp / 1000.0);
    if (wall_us > 0) std::this_thread::sleep_for(std::chrono::microseconds(wall_us));
    return now;
}

void SimEngine::reset(uint64_t seed, int64_t epoch_ns) {
    std::lock_guard<std::mutex> lock(mu_);
    cfg_.seed = seed;
    cfg_.epoch_ns = epoch_ns;
    now_ns_ = epoch_ns;
    components_.clear();
    ues_.clear();
    sessions_.clear();
    session_counter_ = 0;
    faulted_sources_.clear();
    hung_ues_.clear();
    metrics_outages_.clear();
    outlet_tables_.clear();
}

const SimEngine::Incarnation* SimEngine::find_active(const std::string& name) const {
    for (auto it = components_.rbegin(); it != components_.rend(); ++it)
        if (it->name == name && !it->stop_ts) return &*it;
    return nullptr;
}

void SimEngine::deploy(const DeployRequest& req) {
    std::lock_guard<std::mutex> lock(mu_);
    if (req.name.empty()) throw SimError(400, "component name required");
    if (!cfg_.models.count(req.model))
        throw SimError(400, "unknown power model '" + req.model + "'");
    if (find_active(req.name)) throw SimError(409, "component '" + req.name + "' already deployed");
    if (!req.node.empty()) {
        bool known = false;
        for (const auto& n : cfg_.nodes) known |= (n.name == req.node);
        if (!known) throw SimError(404, "unknown node '" + req.node + "'");
    }

    Incarnation inc;
    inc.name = req.name;
    inc.kind = req.kind;
    inc.node = req.node;
    inc.model = req.model;
    inc.layout = req.antenna_layout;
    inc.gnb_link = req.gnb_link;
    inc.address = req.address;
    inc.deploy_ts = now_ns_;
    inc.ready_at = now_ns_ + seconds_to_ns(cfg_.startup_delay_s);
    if (req.kind == "ru" && !req.address.empty()) {
        bool reachable = false;
        for (const auto& a : cfg_.reachable_ru_addresses) reachable |= (a == req.address);
        // An unroutable front-haul address keeps the radio in STARTING forever.
        if (!reachable) inc.ready_at = INT64_MAX;
    }
    components_.push_back(inc);
}

void SimEngine::teardown(const std::string& name) {
    std::lock_guard<std::mutex> lock(mu_);
    for (auto& c : components_) {
        if (c.name == name && !c.stop_ts) {
            c.stop_ts = now_ns_;
            for (auto& ue : ues_)
                if (ue.gnb == name && !ue.detach_ts) ue.detach_ts = now_ns_;
        }
    }
}

std::string SimEngine::component_state(const std::string& name) const {
    std::lock_guard<std::mutex> lock(mu_);
    const Incarnation* latest = nullptr;
    for (const auto& c : components_)
        if (c.name == name) latest = &c;
    if (!latest) return "ABSENT";
    if (latest->stop_ts) return "STOPPED";
    return now_ns_ >= latest->ready_at ? "READY" : "STARTING";
}

json SimEngine::inventory() const {
    std::lock_guard<std::mutex> lock(mu_);
    json components = json::array();
    for (const auto& c : components_) {
        if (c.stop_ts) continue;
        components.push_back({{"name", c.name},
                              {"kind", c.kind},
                              {"node", c.node},
                              {"model", c.model},
                              {"state", now_ns_ >= c.ready_at ? "READY" : "STARTING"}});
    }
    json ues = json::array();
    for (const auto& ue : ues_)
        if (!ue.detach_ts) ues.push_back({{"ue_index", ue.ue_index}, {"gnb", ue.gnb}});
    return {{"now_ns", now_ns_}, {"components", components}, {"ues", ues}};
}

void SimEngine::attach_ue(int ue_index, const std::string& gnb) {
    std::lock_guard<std::mutex> lock(mu_);
    const Incarnation* g = find_active(gnb);
    if (!g || now_ns_ < g->ready_at)
        throw SimError(409, "gnb '" + gnb + "' is not ready");
    for (const auto& ue : ues_)
        if (ue.ue_index == ue_index && !ue.detach_ts)
            throw SimError(409, "ue " + std::to_string(ue_index) + " already attached");
    ues_.push_back({ue_index, gnb, now_ns_, std::nullopt});
}

void SimEngine::rebalance_udp(const Session& newcomer) {
    // Shared air interface: concurrent UDP flows of one cell and direction
    // split the capacity budget by water-filling. TCP flows hold their
    // configured operating point and consume budget first.
    double cap = newcomer.direction == "downlink" ? cfg_.traffic.capacity_dl_mbps
                                                  : cfg_.traffic.capacity_ul_mbps;
    std::vector<size_t> group;
    for (size_t i = 0; i < sessions_.size(); ++i) {
        Session& s = sessions_[i];
        if (s.gnb != newcomer.gnb || s.direction != newcomer.direction) continue;
        if (s.end_ns <= newcomer.start_ns || s.start_ns >= newcomer.end_ns) continue;
        if (s.protocol == "tcp")
            cap -= s.achieved_mbps;
        else
            group.push_back(i);
    }
    std::vector<double> targets;
    for (size_t i : group) targets.push_back(sessions_[i].target_mbps);
    std::vector<double> alloc = waterfill(targets, cap);
    for (size_t k = 0; k < group.size(); ++k) {
        sessions_[group[k]].achieved_mbps = alloc[k];
        sessions_[group[k]].power_load_mbps = alloc[k];
    }
}

std::string SimEngine::start_traffic(const TrafficRequest& req) {
    std::lock_guard<std::mutex> lock(mu_);
    if (req.duration_s <= 0.0) throw SimError(400, "duration_s must be positive");
    if (req.protocol != "udp" && req.protocol != "tcp")
        throw SimError(400, "protocol must be udp or tcp");
    if (req.direction != "downlink" && req.direction != "uplink")
        throw SimError(400, "direction must be downlink or uplink");
    bool attached = false;
    for (const auto& ue : ues_)
        attached |= (ue.ue_index == req.ue_index && ue.gnb == req.gnb && !ue.detach_ts);
    if (!attached)
        throw SimError(409, "ue " + std::to_string(req.ue_index) + " is not attached to '" +
                                req.gnb + "'");

    Session s;
    s.id = "s" + std::to_string(++session_counter_);
    s.ue_index = req.ue_index;
    s.gnb = req.gnb;
    s.protocol = req.protocol;
    s.direction = req.direction;
    s.start_ns = now_ns_;
    s.end_ns = now_ns_ + seconds_to_ns(req.duration_s);

    if (req.protocol == "tcp") {
        std::string stack = stack_prefix(req.gnb);
        auto stack_it = cfg_.traffic.tcp.find(stack);
        if (stack_it == cfg_.traffic.tcp.end() || !stack_it->second.count(req.direction))
            throw SimError(400, "no tcp rate configured for stack '" + stack + "' " +
                                    req.direction);
        const DirectionRates& r = stack_it->second.at(req.direction);
        std::string label = "tcprate:" + req.gnb + ":" + std::to_string(req.ue_index);
        double eps = gaussian_at(cfg_.seed, label, s.start_ns, cfg_.traffic.tcp_rate_noise_frac);
        s.target_mbps = r.rate_mbps;
        s.achieved_mbps = std::max(0.0, r.rate_mbps * (1.0 + eps));
        s.power_load_mbps = r.power_load_mbps >= 0.0 ? r.power_load_mbps : s.achieved_mbps;
        s.loss_percent = 0.0;
        sessions_.push_back(s);
    } else {
        if (req.target_mbps <= 0.0) throw SimError(400, "udp requires target_mbps");
        s.target_mbps = req.target_mbps;
        s.loss_percent = cfg_.traffic.udp_loss_percent;
        sessions_.push_back(s);
        rebalance_udp(sessions_.back());
    }
    return sessions_.back().id;
}

std::optional<json> SimEngine::traffic_result(const std::string& session_id) {
    std::lock_guard<std::mutex> lock(mu_);
    const Session* s = nullptr;
    for (const auto& x : sessions_)
        if (x.id == session_id) s = &x;
    if (!s) throw SimError(404, "unknown session '" + session_id + "'");
    if (hung_ues_.count(s->ue_index)) return std::nullopt;
    if (now_ns_ < s->end_ns) return std::nullopt;

    double duration_s = static_cast<double>(s->end_ns - s->start_ns) * 1e-9;
    double delivered_mbps = s->achieved_mbps * (1.0 - s->loss_percent / 100.0);
    auto bits = static_cast<int64_t>(std::llround(delivered_mbps * 1e6 * duration_s));
    json r = {{"ue_index", s->ue_index},
              {"protocol", s->protocol},
              {"direction", s->direction},
              {"duration_s", duration_s},
              {"bits_transferred", bits},
              {"mean_bitrate_bps", static_cast<double>(bits) / duration_s},
              {"jitter_ms", 0.0},
              {"lost_percent", 0.0},
              {"retransmits", 0}};
    if (s->protocol == "udp") {
        r["jitter_ms"] =
            0.3 + std::fabs(gaussian_at(cfg_.seed, "jitter:" + s->id, s->start_ns, 0.15));
        r["lost_percent"] = s->loss_percent;
    } else {
        r["retransmits"] =
            static_cast<int>(stable_hash64(cfg_.seed, "retx:" + s->id, s->start_ns) % 20);
    }
    return r;
}

// ---- power composition ------------------------------------------------------

double SimEngine::load_mbps_at(const Incarnation& c, int64_t t) const {
    // A component sees the traffic of its linked cell; "*" links core NFs to
    // everything that crosses the core.
    std::string key = c.gnb_link.empty() ? c.name : c.gnb_link;
    double load = 0.0;
    for (const auto& s : sessions_)
        if (s.active_at(t) && (key == "*" || s.gnb == key)) load += s.power_load_mbps;
    return load;
}

int SimEngine::ue_count_at(const std::string& gnb_key, int64_t t) const {
    int n = 0;
    for (const auto& ue : ues_)
        if (ue.attached_at(t) && (gnb_key == "*" || ue.gnb == gnb_key)) ++n;
    return n;
}

double SimEngine::component_power_nf(const Incarnation& c, int64_t t) const {
    if (!c.alive_at(t)) return 0.0;
    const PowerModel& model = cfg_.models.at(c.model);
    ModelInput in;
    in.load_mbps = load_mbps_at(c, t);
    in.ue_count = ue_count_at(c.gnb_link.empty() ? c.name : c.gnb_link, t);
    in.uptime_s = static_cast<double>(t - c.deploy_ts) * 1e-9;
    in.antenna_layout = c.layout;
    return model.evaluate(in);
}

double SimEngine::node_power_nf(const std::string& node, int64_t t) const {
    double baseline = 0.0;
    for (const auto& n : cfg_.nodes)
        if (n.name == node) baseline = n.baseline_w;
    double total = baseline;
    for (const auto& c : components_)
        if (c.node == node) total += component_power_nf(c, t);
    return total;
}

// ---- telemetry --------------------------------------------------------------

void SimEngine::ensure_outlet_tables(const std::string& outlet, const NodeConfig& node,
                                     int64_t up_to_idx) {
    auto& [power, cum] = outlet_tables_[outlet];
    int64_t interval = seconds_to_ns(cfg_.pdu_interval_s);
    double interval_h = cfg_.pdu_interval_s / 3600.0;
    for (auto k = static_cast<int64_t>(power.size()); k <= up_to_idx; ++k) {
        int64_t ts = cfg_.epoch_ns + k * interval;
        double p = node_power_nf(node.name, ts) +
                   gaussian_at(cfg_.seed, "pdu:" + outlet, ts, cfg_.pdu_noise_sigma_w);
        p = std::max(0.0, p);
        power.push_back(p);
        cum.push_back(k == 0 ? 0.0 : cum[k - 1] + 0.5 * (power[k - 1] + p) * interval_h);
    }
}

SampleSeries SimEngine::pdu_series(const std::string& outlet, const Window& w) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!w.valid()) throw SimError(400, "invalid window");
    if (faulted_sources_.count("pdu")) throw SimError(503, "pdu unavailable");
    const NodeConfig* node = nullptr;
    for (const auto& n : cfg_.nodes)
        if (n.outlet == outlet) node = &n;
    if (!node) throw SimError(404, "unknown outlet '" + outlet + "'");

    int64_t interval = seconds_to_ns(cfg_.pdu_interval_s);
    int64_t k0 = w.start_ns <= cfg_.epoch_ns
                     ? 0
                     : (w.start_ns - cfg_.epoch_ns + interval - 1) / interval;
    SampleSeries out;
    out.source = Source::PDU;
    out.target = outlet;
    out.nominal_interval_ns = interval;
    out.accuracy_fraction = cfg_.pdu_accuracy;
    for (int64_t k = k0;; ++k) {
        int64_t ts = cfg_.epoch_ns + k * interval;
        if (ts >= w.end_ns || ts > now_ns_) break;
        ensure_outlet_tables(outlet, *node, k);
        const auto& [power, cum] = outlet_tables_[outlet];
        out.samples.push_back({ts, power[k]});
        out.energy_wh.push_back(cum[k]);
        out.voltage_v.push_back(cfg_.pdu_voltage_v);
        out.current_a.push_back(power[k] / cfg_.pdu_voltage_v);
    }
    refresh_gap_flag(out);
    return out;
}

SampleSeries SimEngine::pod_series(const std::string& pod, const Window& w, int64_t step_ns) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!w.valid()) throw SimError(400, "invalid window");
    if (step_ns <= 0) step_ns = seconds_to_ns(cfg_.scrape_interval_s);
    if (faulted_sources_.count("metrics")) throw SimError(503, "metrics unavailable");

    std::vector<const Incarnation*> incs;
    for (const auto& c : components_)
        if (c.name == pod) incs.push_back(&c);
    if (incs.empty()) throw SimError(404, "unknown pod '" + pod + "'");
    bool existed = false;
    for (const auto* c : incs) {
        int64_t stop = c->stop_ts.value_or(INT64_MAX);
        existed |= (c->deploy_ts < w.end_ns && stop > w.start_ns);
    }
    if (!existed) throw SimError(404, "pod '" + pod + "' did not exist during the window");

    int64_t scrape = seconds_to_ns(cfg_.scrape_interval_s);
    int64_t lookback = 3 * scrape;
    auto scrape_valid = [&](int64_t ts) {
        if (ts > now_ns_) return false;
        bool alive = false;
        for (const auto* c : incs) alive |= c->alive_at(ts);
        if (!alive) return false;
        for (const auto& [name, win] : metrics_outages_)
            if (name == pod && win.contains(ts)) return false;
        return true;
    };
    auto pod_power = [&](int64_t ts) {
        double p = 0.0;
        double sigma = 0.0;
        for (const auto* c : incs)
            if (c->alive_at(ts)) {
                p += component_power_nf(*c, ts);
                sigma = cfg_.models.at(c->model).noise_sigma_w;
            }
        return std::max(0.0, p + gaussian_at(cfg_.seed, "pod:" + pod, ts, sigma));
    };

    SampleSeries out;
    out.source = Source::POD_ESTIMATOR;
    out.target = pod;
    out.nominal_interval_ns = step_ns;
    out.accuracy_fraction = 0.0;  // estimator accuracy is unknown by design
    for (int64_t t = w.start_ns; t < w.end_ns; t += step_ns) {
        if (t > now_ns_) break;
        // Latest scrape at or before the boundary, within the lookback.
        int64_t m = (std::min(t, now_ns_) - cfg_.epoch_ns) / scrape;
        bool found = false;
        int64_t scrape_ts = 0;
        for (; m >= 0; --m) {
            scrape_ts = cfg_.epoch_ns + m * scrape;
            if (scrape_ts > t) continue;
            if (t - scrape_ts > lookback) break;
            if (scrape_valid(scrape_ts)) {
                found = true;
                break;
            }
        }
        if (found) out.samples.push_back({t, pod_power(scrape_ts)});
    }
    refresh_gap_flag(out);
    return out;
}

size_t SimEngine::write_ru_trace(const std::string& ru, const Window& w,
                                 const std::string& file) {
    std::lock_guard<std::mutex> lock(mu_);
    if (!w.valid()) throw SimError(400, "invalid window");
    if (w.end_ns > now_ns_) throw SimError(400, "trace window extends into the future");
    bool known = false;
    for (const auto& c : components_) known |= (c.name == ru);
    if (!known) throw SimError(404, "unknown radio unit '" + ru + "'");

    fs::path path(file);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SimError(500, "cannot write trace file " + file);

    out << "ts_ns,power_w\n";
    size_t rows = 0;
    int64_t interval = seconds_to_ns(cfg_.wattmeter_interval_s);
    double sigma = 0.1;
    for (int64_t t = w.start_ns; t < w.end_ns;) {
        double p = 0.0;
        for (const auto& c : components_)
            if (c.name == ru) {
                p += component_power_nf(c, t);
                sigma = cfg_.models.at(c.model).noise_sigma_w;
            }
        p = std::max(0.0, p + gaussian_at(cfg_.seed, "wm:" + ru, t, sigma));
        char line[64];
        std::snprintf(line, sizeof(line), "%lld,%.10g\n", static_cast<long long>(t), p);
        out << line;
        ++rows;
        double jitter = (uniform_at(cfg_.seed, "wmjit:" + ru, t) * 2.0 - 1.0) *
                        cfg_.wattmeter_jitter_s;
        t += interval + seconds_to_ns(jitter);
    }
    return rows;
}

void SimEngine::set_source_fault(const std::string& source, bool unavailable) {
    std::lock_guard<std::mutex> lock(mu_);
    if (unavailable)
        faulted_sources_.insert(source);
    else
        faulted_sources_.erase(source);
}

void SimEngine::set_ue_hang(int ue_index, bool hung) {
    std::lock_guard<std::mutex> lock(mu_);
    if (hung)
        hung_ues_.insert(ue_index);
    else
        hung_ues_.erase(ue_index);
}

void SimEngine::add_metrics_outage(const std::string& pod, const Window& w) {
    std::lock_guard<std::mutex> lock(mu_);
    metrics_outages_.emplace_back(pod, w);
}

}  // namespace ranprof::sim
