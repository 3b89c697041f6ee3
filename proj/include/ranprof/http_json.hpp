// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace ranprof::http {

// Transport failures carry status 0; HTTP-level failures carry the code.
class HttpError : public std::runtime_error {
  public:
    HttpError(int status, const std::string& what)
        : std::runtime_error(what), status_(status) {}
    int status() const { return status_; }

  private:
    int status_;
};

nlohmann::json get_json(httplib::Client& c, const std::string& path);
nlohmann::json post_json(httplib::Client& c, const std::string& path,
                         const nlohmann::json& body);

// Convenience one-shot forms taking a base URL such as "http://127.0.0.1:9000".
nlohmann::json get_json(const std::string& base_url, const std::string& path);
nlohmann::json post_json(const std::string& base_url, const std::string& path,
                         const nlohmann::json& body);
nlohmann::json post_json_with_retry(const std::string& base_url, const std::string& path,
                                    const nlohmann::json& body, int retries = 3,
                                    int initial_backoff_ms = 250);

// POST retried on transport errors and 5xx: `retries` extra attempts with
// exponential backoff starting at `initial_backoff_ms` (wall time; service
// availability is a wall-clock concern, not a virtual-clock one).
nlohmann::json post_json_with_retry(httplib::Client& c, const std::string& path,
                                    const nlohmann::json& body, int retries = 3,
                                    int initial_backoff_ms = 250);

void send_json(httplib::Response& res, int status, const nlohmann::json& body);

bool reachable(httplib::Client& c, const std::string& health_path);

// Owns a listener thread around an httplib::Server. port 0 binds ephemerally.
class HttpService {
  public:
    virtual ~HttpService();
    bool start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();
    bool running() const { return port_ > 0; }
    int port() const { return port_; }
    std::string base_url() const;

  protected:
    httplib::Server server_;

  private:
    std::thread thread_;
    std::string host_ = "127.0.0.1";
    int port_ = -1;
};

}  // namespace ranprof::http
