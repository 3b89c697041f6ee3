// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/http_json.hpp"

#include <chrono>

namespace ranprof::http {

using nlohmann::json;

namespace {

json parse_body(const httplib::Result& res, const std::string& path) {
    if (!res)
        throw HttpError(0, "transport failure on " + path + ": " +
                               httplib::to_string(res.error()));
    json body;
    if (!res->body.empty()) {
        body = json::parse(res->body, nullptr, false);
        if (body.is_discarded())
            throw HttpError(res->status, "non-JSON response from " + path);
    }
    if (res->status < 200 || res->status >= 300) {
        std::string msg = body.is_object() && body.contains("error")
                              ? body["error"].get<std::string>()
                              : ("HTTP " + std::to_string(res->status));
        throw HttpError(res->status, path + ": " + msg);
    }
    return body;
}

}  // namespace

json get_json(httplib::Client& c, const std::string& path) {
    return parse_body(c.Get(path), path);
}

json post_json(httplib::Client& c, const std::string& path, const json& body) {
    return parse_body(c.Post(path, body.dump(), "application/json"), path);
}

json post_json_with_retry(httplib::Client& c, const std::string& path, const json& body,
                          int retries, int initial_backoff_ms) {
    int backoff = initial_backoff_ms;
    for (int attempt = 0;; ++attempt) {
        try {
            return post_json(c, path, body);
        } catch (const HttpError& e) {
            bool retryable = e.status() == 0 || e.status() >= 500;
            if (!retryable || attempt >= retries) throw;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
        backoff *= 2;
    }
}

json get_json(const std::string& base_url, const std::string& path) {
    httplib::Client c(base_url);
    return get_json(c, path);
}

json post_json(const std::string& base_url, const std::string& path, const json& body) {
    httplib::Client c(base_url);
    return post_json(c, path, body);
}

json post_json_with_retry(const std::string& base_url, const std::string& path,
                          const json& body, int retries, int initial_backoff_ms) {
    httplib::Client c(base_url);
    return post_json_with_retry(c, path, body, retries, initial_backoff_ms);
}

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

bool reachable(httplib::Client& c, const std::string& health_path) {
    auto res = c.Get(health_path);
    return res && res->status == 200;
}

HttpService::~HttpService() { stop(); }

bool HttpService::start(const std::string& host, int port) {
    host_ = host;
    // httplib's default adds SO_REUSEPORT, which would let two services bind
    // the same port and silently split traffic; keep only SO_REUSEADDR so a
    // conflicting bind fails loudly.
    server_.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                   reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    if (port == 0) {
        port_ = server_.bind_to_any_port(host);
        if (port_ <= 0) return false;
    } else {
        if (!server_.bind_to_port(host, port)) return false;
        port_ = port;
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    while (!server_.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    return true;
}

void HttpService::stop() {
    if (thread_.joinable()) {
        server_.stop();
        thread_.join();
    }
    port_ = -1;
}

std::string HttpService::base_url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace ranprof::http
