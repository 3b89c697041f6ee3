// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/sim/service.hpp"

namespace ranprof::sim {

using nlohmann::json;
using ranprof::http::send_json;

namespace {

json parse_or_throw(const std::string& body) {
    json j = json::parse(body.empty() ? "{}" : body, nullptr, false);
    if (j.is_discarded()) throw SimError(400, "request body is not valid JSON");
    return j;
}

int64_t query_i64(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) throw SimError(400, std::string("missing query param ") + key);
    try {
        return std::stoll(req.get_param_value(key));
    } catch (...) {
        throw SimError(400, std::string("bad query param ") + key);
    }
}

// Wraps a handler with uniform SimError -> HTTP status mapping.
template <typename F>
httplib::Server::Handler wrap(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const SimError& e) {
            send_json(res, e.status(), {{"error", e.what()}});
        } catch (const std::exception& e) {
            send_json(res, 500, {{"error", e.what()}});
        }
    };
}

}  // namespace

SimService::SimService(SimEngine& engine) : engine_(engine) { route(); }

void SimService::route() {
    server_.Get("/sim/health", wrap([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}, {"now_ns", engine_.now_ns()}});
    }));

    server_.Get("/sim/clock", wrap([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"now_ns", engine_.now_ns()}, {"warp", engine_.warp()}});
    }));

    server_.Post("/sim/clock/advance",
                 wrap([this](const httplib::Request& req, httplib::Response& res) {
                     json body = parse_or_throw(req.body);
                     int64_t now = engine_.advance(body.at("dur_ns").get<int64_t>());
                     send_json(res, 200, {{"now_ns", now}});
                 }));

    server_.Post("/sim/deploy", wrap([this](const httplib::Request& req, httplib::Response& res) {
        json body = parse_or_throw(req.body);
        DeployRequest d;
        d.name = body.value("name", "");
        d.kind = body.value("kind", "pod");
        d.node = body.value("node", "");
        d.model = body.value("model", "");
        d.antenna_layout = body.value("antenna_layout", "2x2");
        d.gnb_link = body.value("gnb_link", "");
        d.address = body.value("address", "");
        engine_.deploy(d);
        send_json(res, 200, {{"name", d.name}, {"state", engine_.component_state(d.name)}});
    }));

    server_.Post("/sim/teardown",
                 wrap([this](const httplib::Request& req, httplib::Response& res) {
                     json body = parse_or_throw(req.body);
                     std::string name = body.at("name").get<std::string>();
                     engine_.teardown(name);
                     send_json(res, 200, {{"name", name}, {"state", engine_.component_state(name)}});
                 }));

    server_.Get("/sim/inventory", wrap([this](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, engine_.inventory());
    }));

    server_.Post("/sim/ue/attach",
                 wrap([this](const httplib::Request& req, httplib::Response& res) {
                     json body = parse_or_throw(req.body);
                     engine_.attach_ue(body.at("ue_index").get<int>(),
                                       body.at("gnb").get<std::string>());
                     send_json(res, 200, {{"attached", true}});
                 }));

    server_.Post("/sim/ue/traffic",
                 wrap([this](const httplib::Request& req, httplib::Response& res) {
                     json body = parse_or_throw(req.body);
                     TrafficRequest t;
                     t.ue_index = body.at("ue_index").get<int>();
                     t.gnb = body.at("gnb").get<std::string>();
                     t.protocol = body.at("protocol").get<std::string>();
                     t.direction = body.at("direction").get<std::string>();
                     t.target_mbps = body.value("target_mbps", 0.0);
                     t.duration_s = body.at("duration_s").get<double>();
                     send_json(res, 200, {{"session_id", engine_.start_traffic(t)}});
                 }));

    server_.Get("/sim/ue/result",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                    if (!req.has_param("session_id")) throw SimError(400, "missing session_id");
                    auto r = engine_.traffic_result(req.get_param_value("session_id"));
                    if (!r)
                        send_json(res, 409, {{"pending", true}});
                    else
                        send_json(res, 200, *r);
                }));

    server_.Post("/sim/ru/trace",
                 wrap([this](const httplib::Request& req, httplib::Response& res) {
                     json body = parse_or_throw(req.body);
                     Window w{body.at("start_ns").get<int64_t>(),
                              body.at("end_ns").get<int64_t>()};
                     std::string file = body.at("file").get<std::string>();
                     size_t rows =
                         engine_.write_ru_trace(body.at("ru").get<std::string>(), w, file);
                     send_json(res, 200, {{"file", file}, {"rows", rows}});
                 }));

    server_.Post("/sim/fault", wrap([this](const httplib::Request& req, httplib::Response& res) {
        json body = parse_or_throw(req.body);
        std::string target = body.at("target").get<std::string>();
        if (target == "pdu" || target == "metrics") {
            engine_.set_source_fault(target, body.value("unavailable", true));
        } else if (target == "ue") {
            engine_.set_ue_hang(body.at("ue_index").get<int>(), body.value("hung", true));
        } else if (target == "metrics_outage") {
            engine_.add_metrics_outage(body.at("pod").get<std::string>(),
                                       {body.at("start_ns").get<int64_t>(),
                                        body.at("end_ns").get<int64_t>()});
        } else {
            throw SimError(400, "unknown fault target '" + target + "'");
        }
        send_json(res, 200, {{"ok", true}});
    }));

    server_.Post("/sim/reset", wrap([this](const httplib::Request& req, httplib::Response& res) {
        json body = parse_or_throw(req.body);
        engine_.reset(body.value("seed", engine_.config().seed),
                      body.value("epoch_ns", engine_.config().epoch_ns));
        send_json(res, 200, {{"ok", true}});
    }));

    server_.Get("/pdu/outlets/:id/samples",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                    Window w{query_i64(req, "start"), query_i64(req, "end")};
                    SampleSeries s = engine_.pdu_series(req.path_params.at("id"), w);
                    json samples = json::array();
                    for (size_t i = 0; i < s.samples.size(); ++i)
                        samples.push_back({{"ts_ns", s.samples[i].ts_ns},
                                           {"voltage_v", s.voltage_v[i]},
                                           {"current_a", s.current_a[i]},
                                           {"power_w", s.samples[i].power_w},
                                           {"energy_wh", s.energy_wh[i]}});
                    send_json(res, 200, samples);
                }));

    server_.Get("/metrics/query_range",
                wrap([this](const httplib::Request& req, httplib::Response& res) {
                    if (!req.has_param("pod")) throw SimError(400, "missing query param pod");
                    std::string pod = req.get_param_value("pod");
                    Window w{query_i64(req, "start"), query_i64(req, "end")};
                    int64_t step = req.has_param("step") ? query_i64(req, "step") : 0;
                    SampleSeries s = engine_.pod_series(pod, w, step);
                    json samples = json::array();
                    for (const auto& p : s.samples)
                        samples.push_back({{"ts_ns", p.ts_ns}, {"power_w", p.power_w}});
                    send_json(res, 200,
                              {{"pod", pod},
                               {"step_ns", s.nominal_interval_ns},
                               {"samples", samples}});
                }));
}

}  // namespace ranprof::sim
