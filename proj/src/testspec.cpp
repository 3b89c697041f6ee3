// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/testspec.hpp"

#include <cmath>
#include <initializer_list>
#include <set>

#include <json.hpp>

namespace ranprof::testspec {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// ---- strict field access helpers -------------------------------------------

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    return j;
}

const json& require_field(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(path + "." + key, "missing required field");
    return *it;
}

std::string require_string(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_string()) throw SchemaError(path + "." + key, "expected a string");
    auto s = v.get<std::string>();
    if (s.empty()) throw SchemaError(path + "." + key, "must not be empty");
    return s;
}

int64_t require_positive_int(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_number_integer()) throw SchemaError(path + "." + key, "expected an integer");
    int64_t n = v.get<int64_t>();
    if (n <= 0) throw SchemaError(path + "." + key, "must be positive");
    return n;
}

double require_positive_number(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_number()) throw SchemaError(path + "." + key, "expected a number");
    double d = v.get<double>();
    if (!(d > 0.0) || !std::isfinite(d)) throw SchemaError(path + "." + key, "must be positive");
    return d;
}

bool require_bool(const json& obj, const std::string& path, const char* key) {
    const json& v = require_field(obj, path, key);
    if (!v.is_boolean()) throw SchemaError(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::string require_enum(const json& obj, const std::string& path, const char* key,
                         std::initializer_list<const char*> allowed) {
    std::string s = require_string(obj, path, key);
    for (const char* a : allowed)
        if (s == a) return s;
    std::string msg = "must be one of {";
    bool first = true;
    for (const char* a : allowed) {
        if (!first) msg += ", ";
        msg += a;
        first = false;
    }
    msg += "}";
    throw SchemaError(path + "." + key, msg);
}

void note_unknown_fields(const json& obj, const std::string& path,
                         const std::set<std::string>& known, std::vector<std::string>* warnings) {
    if (!warnings) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!known.count(it.key()))
            warnings->push_back(path + "." + it.key() + ": unknown field ignored");
}

bool is_ipv4(const std::string& s) {
    int octets = 0;
    size_t i = 0;
    while (i < s.size()) {
        if (!isdigit(static_cast<unsigned char>(s[i]))) return false;
        size_t start = i;
        int value = 0;
        while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) {
            value = value * 10 + (s[i] - '0');
            if (value > 255 || i - start >= 3) return false;
            ++i;
        }
        ++octets;
        if (i < s.size()) {
            if (s[i] != '.') return false;
            ++i;
            if (i == s.size()) return false;  // trailing dot
        }
    }
    return octets == 4;
}

// Stack prefix is the token before the first '-' of a CU/DU name.
std::string prefix_of(const std::string& name) {
    auto pos = name.find('-');
    return pos == std::string::npos ? name : name.substr(0, pos);
}

// ---- section parsers --------------------------------------------------------

UeSpec parse_ue(const json& j, const std::string& path, std::vector<std::string>* warnings) {
    require_object(j, path);
    note_unknown_fields(j, path,
                        {"slice_id", "test_type", "bandwidth_mbps", "duration", "protocol",
                         "reverse", "json_output", "server_hostname", "server_port"},
                        warnings);
    UeSpec ue;
    ue.slice_id = require_positive_int(j, path, "slice_id");
    ue.test_type = require_enum(j, path, "test_type", {"iperf"});
    ue.protocol = require_enum(j, path, "protocol", {"udp", "tcp"});
    if (j.contains("bandwidth_mbps"))
        ue.bandwidth_mbps = require_positive_number(j, path, "bandwidth_mbps");
    ue.duration_s = require_positive_number(j, path, "duration");
    ue.reverse = require_bool(j, path, "reverse");
    ue.json_output = require_bool(j, path, "json_output");
    ue.server_hostname = require_string(j, path, "server_hostname");
    int64_t port = require_positive_int(j, path, "server_port");
    if (port > 65535) throw SchemaError(path + ".server_port", "must be in 1..65535");
    ue.server_port = static_cast<int>(port);
    return ue;
}

RanSpec parse_ran(const json& j, const std::string& path, std::vector<std::string>* warnings) {
    require_object(j, path);
    note_unknown_fields(j, path, {"cu", "du", "functional_split", "ru"}, warnings);
    RanSpec ran;

    const json& cu = require_object(require_field(j, path, "cu"), path + ".cu");
    note_unknown_fields(cu, path + ".cu", {"name", "config_file"}, warnings);
    ran.cu.name = require_string(cu, path + ".cu", "name");
    ran.cu.config_file = require_string(cu, path + ".cu", "config_file");

    const json& du = require_object(require_field(j, path, "du"), path + ".du");
    note_unknown_fields(du, path + ".du", {"name", "config_file"}, warnings);
    ran.du.name = require_string(du, path + ".du", "name");
    ran.du.config_file = require_string(du, path + ".du", "config_file");

    ran.functional_split = require_enum(j, path, "functional_split", {"7.2", "8"});

    const json& ru = require_object(require_field(j, path, "ru"), path + ".ru");
    note_unknown_fields(ru, path + ".ru", {"name", "address", "antenna_layout"}, warnings);
    ran.ru.name = require_enum(ru, path + ".ru", "name", {"usrp", "foxconn"});
    ran.ru.address = require_string(ru, path + ".ru", "address");
    if (!is_ipv4(ran.ru.address))
        throw SchemaError(path + ".ru.address", "expected an IPv4 dotted-quad address");
    if (ru.contains("antenna_layout"))
        ran.ru.antenna_layout = require_enum(ru, path + ".ru", "antenna_layout", {"2x2", "4x4"});
    return ran;
}

}  // namespace

void validate(const TestVector& v) {
    const RanSpec& ran = v.network_scenario.ran;
    std::string cu_stack = prefix_of(ran.cu.name);
    std::string du_stack = prefix_of(ran.du.name);
    if (cu_stack != du_stack)
        throw ConstraintError("cu/du stack mismatch: '" + ran.cu.name + "' vs '" + ran.du.name +
                              "'");
    if (cu_stack != "oai" && cu_stack != "srsran")
        throw ConstraintError("unsupported RAN stack prefix '" + cu_stack +
                              "' (expected oai or srsran)");
    // Radio hardware is tied to the split: SDR front-ends terminate a split-8
    // lower PHY, O-RAN radios terminate split 7.2.
    if (ran.functional_split == "8" && ran.ru.name != "usrp")
        throw ConstraintError("functional_split 8 requires ru.name 'usrp', got '" + ran.ru.name +
                              "'");
    if (ran.functional_split == "7.2" && ran.ru.name != "foxconn")
        throw ConstraintError("functional_split 7.2 requires ru.name 'foxconn', got '" +
                              ran.ru.name + "'");
    for (size_t i = 0; i < v.traffic_scenario.ue_specification.size(); ++i) {
        const UeSpec& ue = v.traffic_scenario.ue_specification[i];
        if (ue.protocol == "udp" && !ue.bandwidth_mbps)
            throw ConstraintError("ue_specification[" + std::to_string(i) +
                                  "]: udp requires bandwidth_mbps");
    }
}

TestVector parse_test_vector(const std::string& json_text, std::vector<std::string>* warnings) {
    json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) throw SchemaError("$", "document is not valid JSON");
    require_object(doc, "$");
    note_unknown_fields(doc, "$", {"network_scenario", "traffic_scenario"}, warnings);

    TestVector v;

    const json& net =
        require_object(require_field(doc, "$", "network_scenario"), "$.network_scenario");
    note_unknown_fields(net, "$.network_scenario", {"id", "core_network", "ran"}, warnings);
    v.network_scenario.id = require_positive_int(net, "$.network_scenario", "id");

    const json& core = require_object(require_field(net, "$.network_scenario", "core_network"),
                                      "$.network_scenario.core_network");
    note_unknown_fields(core, "$.network_scenario.core_network", {"name"}, warnings);
    v.network_scenario.core_network.name = require_enum(core, "$.network_scenario.core_network",
                                                        "name", {"open5gs", "commercial"});

    v.network_scenario.ran = parse_ran(require_field(net, "$.network_scenario", "ran"),
                                       "$.network_scenario.ran", warnings);

    const json& traffic =
        require_object(require_field(doc, "$", "traffic_scenario"), "$.traffic_scenario");
    note_unknown_fields(traffic, "$.traffic_scenario", {"id", "ue_specification"}, warnings);
    v.traffic_scenario.id = require_positive_int(traffic, "$.traffic_scenario", "id");

    const json& ues = require_field(traffic, "$.traffic_scenario", "ue_specification");
    if (!ues.is_array())
        throw SchemaError("$.traffic_scenario.ue_specification", "expected an array");
    if (ues.empty())
        throw SchemaError("$.traffic_scenario.ue_specification", "must contain at least one UE");
    for (size_t i = 0; i < ues.size(); ++i)
        v.traffic_scenario.ue_specification.push_back(parse_ue(
            ues[i], "$.traffic_scenario.ue_specification[" + std::to_string(i) + "]", warnings));

    validate(v);
    return v;
}

std::string serialize_test_vector(const TestVector& v) {
    ordered_json doc;
    ordered_json net;
    net["id"] = v.network_scenario.id;
    net["core_network"] = {{"name", v.network_scenario.core_network.name}};
    ordered_json ran;
    ran["cu"] = {{"name", v.network_scenario.ran.cu.name},
                 {"config_file", v.network_scenario.ran.cu.config_file}};
    ran["du"] = {{"name", v.network_scenario.ran.du.name},
                 {"config_file", v.network_scenario.ran.du.config_file}};
    ran["functional_split"] = v.network_scenario.ran.functional_split;
    ran["ru"] = {{"name", v.network_scenario.ran.ru.name},
                 {"address", v.network_scenario.ran.ru.address},
                 {"antenna_layout", v.network_scenario.ran.ru.antenna_layout}};
    net["ran"] = ran;
    doc["network_scenario"] = net;

    ordered_json traffic;
    traffic["id"] = v.traffic_scenario.id;
    ordered_json ues = ordered_json::array();
    for (const UeSpec& ue : v.traffic_scenario.ue_specification) {
        ordered_json u;
        u["slice_id"] = ue.slice_id;
        u["test_type"] = ue.test_type;
        if (ue.bandwidth_mbps) u["bandwidth_mbps"] = *ue.bandwidth_mbps;
        u["duration"] = ue.duration_s;
        u["protocol"] = ue.protocol;
        u["reverse"] = ue.reverse;
        u["json_output"] = ue.json_output;
        u["server_hostname"] = ue.server_hostname;
        u["server_port"] = ue.server_port;
        ues.push_back(u);
    }
    traffic["ue_specification"] = ues;
    doc["traffic_scenario"] = traffic;
    return doc.dump(2) + "\n";
}

bool operator==(const TestVector& a, const TestVector& b) {
    auto ue_eq = [](const UeSpec& x, const UeSpec& y) {
        return x.slice_id == y.slice_id && x.test_type == y.test_type &&
               x.bandwidth_mbps == y.bandwidth_mbps && x.duration_s == y.duration_s &&
               x.protocol == y.protocol && x.reverse == y.reverse &&
               x.json_output == y.json_output && x.server_hostname == y.server_hostname &&
               x.server_port == y.server_port;
    };
    const auto& an = a.network_scenario;
    const auto& bn = b.network_scenario;
    if (an.id != bn.id || an.core_network.name != bn.core_network.name) return false;
    if (an.ran.cu.name != bn.ran.cu.name || an.ran.cu.config_file != bn.ran.cu.config_file)
        return false;
    if (an.ran.du.name != bn.ran.du.name || an.ran.du.config_file != bn.ran.du.config_file)
        return false;
    if (an.ran.functional_split != bn.ran.functional_split) return false;
    if (an.ran.ru.name != bn.ran.ru.name || an.ran.ru.address != bn.ran.ru.address ||
        an.ran.ru.antenna_layout != bn.ran.ru.antenna_layout)
        return false;
    if (a.traffic_scenario.id != b.traffic_scenario.id) return false;
    if (a.traffic_scenario.ue_specification.size() != b.traffic_scenario.ue_specification.size())
        return false;
    for (size_t i = 0; i < a.traffic_scenario.ue_specification.size(); ++i)
        if (!ue_eq(a.traffic_scenario.ue_specification[i], b.traffic_scenario.ue_specification[i]))
            return false;
    return true;
}

}  // namespace ranprof::testspec
