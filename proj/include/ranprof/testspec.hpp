// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Declarative test-vector schema: what to deploy (core + RAN stack + radio)
// and what traffic to run against it. Parsing is strict: structural problems
// raise SchemaError with the JSON path of the offending field, cross-field
// contradictions raise ConstraintError, and unknown fields are ignored with
// a warning so older tooling can read newer documents.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranprof::testspec {

// Structural violation (missing/mistyped/out-of-range field). `path` is a
// JSON pointer-ish location such as "$.network_scenario.ran.ru.address".
class SchemaError : public std::runtime_error {
  public:
    SchemaError(std::string path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

// Fields are individually valid but mutually contradictory.
class ConstraintError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CoreNetwork {
    std::string name;  // "open5gs" | "commercial"
};

struct CuSpec {
    std::string name;
    std::string config_file;
};

struct DuSpec {
    std::string name;
    std::string config_file;
};

struct RuSpec {
    std::string name;     // "usrp" | "foxconn"
    std::string address;  // IPv4 dotted quad
    std::string antenna_layout = "2x2";  // "2x2" | "4x4"
};

struct RanSpec {
    CuSpec cu;
    DuSpec du;
    std::string functional_split;  // "7.2" | "8"
    RuSpec ru;
};

struct NetworkScenario {
    int64_t id = 0;  // positive
    CoreNetwork core_network;
    RanSpec ran;
};

struct UeSpec {
    int64_t slice_id = 0;
    std::string test_type;  // "iperf"
    // UDP target rate. Required for udp; optional and carried verbatim for tcp
    // (tcp rates are a property of the environment, not the vector).
    std::optional<double> bandwidth_mbps;
    double duration_s = 0.0;
    std::string protocol;  // "udp" | "tcp"
    bool reverse = false;  // true = downlink (server sends)
    bool json_output = false;
    std::string server_hostname;
    int server_port = 0;  // 1..65535
};

struct TrafficScenario {
    int64_t id = 0;  // positive
    std::vector<UeSpec> ue_specification;  // at least one entry
};

struct TestVector {
    NetworkScenario network_scenario;
    TrafficScenario traffic_scenario;
};

// Parses and fully validates a JSON document. Unknown fields append a
// human-readable note to `warnings` (when non-null) and are dropped.
// Throws SchemaError / ConstraintError; never crashes on hostile input.
TestVector parse_test_vector(const std::string& json_text,
                             std::vector<std::string>* warnings = nullptr);

// Canonical serialization: fixed key order, two-space indent, defaults
// materialized. parse(serialize(v)) == v and serialize is a fixpoint.
std::string serialize_test_vector(const TestVector& v);

// Re-checks cross-field constraints on an already-built vector.
void validate(const TestVector& v);

bool operator==(const TestVector& a, const TestVector& b);

// Downlink when the UE asks the server to send ("reverse" in iperf terms).
inline const char* direction_of(const UeSpec& ue) { return ue.reverse ? "downlink" : "uplink"; }

}  // namespace ranprof::testspec
