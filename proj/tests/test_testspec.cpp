// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "ranprof/rng.hpp"
#include "ranprof/testspec.hpp"

using namespace ranprof;
using nlohmann::json;

namespace {

// Canonical single-UE document: commercial core, OAI CU/DU at split 8 against
// an SDR front-end, one downlink UDP UE at 70 Mbps for 60 s.
const char* kExampleVector = R"({
  "network_scenario": {
    "id": 1,
    "core_network": { "name": "commercial" },
    "ran": {
      "cu": { "name": "oai-cu", "config_file": "oai_cu.conf" },
      "du": { "name": "oai-du", "config_file": "oai_162prb.conf" },
      "functional_split": "8",
      "ru": { "name": "usrp", "address": "192.168.40.20" }
    }
  },
  "traffic_scenario": {
    "id": 1,
    "ue_specification": [
      {
        "slice_id": 1,
        "test_type": "iperf",
        "bandwidth_mbps": 70,
        "duration": 60,
        "protocol": "udp",
        "reverse": true,
        "json_output": true,
        "server_hostname": "iperf-server.core.svc",
        "server_port": 32205
      }
    ]
  }
})";

json example_doc() { return json::parse(kExampleVector); }

// Deterministic generator of valid vectors for round-trip properties.
testspec::TestVector random_vector(SplitMix64& rng) {
    testspec::TestVector v;
    v.network_scenario.id = 1 + static_cast<int64_t>(rng.next_u64() % 100);
    v.network_scenario.core_network.name =
        (rng.next_u64() & 1) ? "open5gs" : "commercial";
    bool oai = rng.next_u64() & 1;
    std::string stack = oai ? "oai" : "srsran";
    v.network_scenario.ran.cu = {stack + "-cu", stack + "_cu.conf"};
    v.network_scenario.ran.du = {stack + "-du", stack + "_du.conf"};
    bool split8 = rng.next_u64() & 1;
    v.network_scenario.ran.functional_split = split8 ? "8" : "7.2";
    v.network_scenario.ran.ru.name = split8 ? "usrp" : "foxconn";
    v.network_scenario.ran.ru.address =
        "10.0." + std::to_string(rng.next_u64() % 256) + "." + std::to_string(rng.next_u64() % 256);
    v.network_scenario.ran.ru.antenna_layout = (rng.next_u64() & 1) ? "2x2" : "4x4";
    v.traffic_scenario.id = 1 + static_cast<int64_t>(rng.next_u64() % 100);
    size_t ue_count = 1 + rng.next_u64() % 5;
    for (size_t i = 0; i < ue_count; ++i) {
        testspec::UeSpec ue;
        ue.slice_id = 1 + static_cast<int64_t>(rng.next_u64() % 8);
        ue.test_type = "iperf";
        ue.protocol = (rng.next_u64() & 1) ? "udp" : "tcp";
        if (ue.protocol == "udp")
            ue.bandwidth_mbps = 1.0 + static_cast<double>(rng.next_u64() % 2000) / 10.0;
        else if (rng.next_u64() & 1)
            ue.bandwidth_mbps = static_cast<double>(1 + rng.next_u64() % 100);
        ue.duration_s = 1.0 + static_cast<double>(rng.next_u64() % 3600);
        ue.reverse = rng.next_u64() & 1;
        ue.json_output = rng.next_u64() & 1;
        ue.server_hostname = "host-" + std::to_string(rng.next_u64() % 1000) + ".svc";
        ue.server_port = 1 + static_cast<int>(rng.next_u64() % 65535);
        v.traffic_scenario.ue_specification.push_back(ue);
    }
    return v;
}

}  // namespace

TEST_CASE("example document parses to the documented structure") {
    std::vector<std::string> warnings;
    testspec::TestVector v = testspec::parse_test_vector(kExampleVector, &warnings);
    CHECK(warnings.empty());

    CHECK(v.network_scenario.id == 1);
    CHECK(v.network_scenario.core_network.name == "commercial");
    CHECK(v.network_scenario.ran.cu.name == "oai-cu");
    CHECK(v.network_scenario.ran.cu.config_file == "oai_cu.conf");
    CHECK(v.network_scenario.ran.du.name == "oai-du");
    CHECK(v.network_scenario.ran.functional_split == "8");
    CHECK(v.network_scenario.ran.ru.name == "usrp");
    CHECK(v.network_scenario.ran.ru.address == "192.168.40.20");
    CHECK(v.network_scenario.ran.ru.antenna_layout == "2x2");  // default

    REQUIRE(v.traffic_scenario.ue_specification.size() == 1);
    const testspec::UeSpec& ue = v.traffic_scenario.ue_specification[0];
    CHECK(ue.slice_id == 1);
    CHECK(ue.test_type == "iperf");
    REQUIRE(ue.bandwidth_mbps.has_value());
    CHECK(*ue.bandwidth_mbps == doctest::Approx(70.0));
    CHECK(ue.duration_s == doctest::Approx(60.0));
    CHECK(ue.protocol == "udp");
    CHECK(ue.reverse);
    CHECK(ue.json_output);
    CHECK(ue.server_hostname == "iperf-server.core.svc");
    CHECK(ue.server_port == 32205);
    CHECK(std::string(testspec::direction_of(ue)) == "downlink");
}

TEST_CASE("serialization round-trips and is a fixpoint") {
    testspec::TestVector v = testspec::parse_test_vector(kExampleVector);
    std::string s1 = testspec::serialize_test_vector(v);
    testspec::TestVector v2 = testspec::parse_test_vector(s1);
    CHECK(v == v2);
    std::string s2 = testspec::serialize_test_vector(v2);
    CHECK(s1 == s2);
    // Defaults are materialized in canonical form.
    CHECK(s1.find("\"antenna_layout\": \"2x2\"") != std::string::npos);
}

TEST_CASE("unknown fields warn and are dropped") {
    json doc = example_doc();
    doc["network_scenario"]["ran"]["ru"]["firmware"] = "v7";
    doc["debug"] = true;
    std::vector<std::string> warnings;
    testspec::TestVector v = testspec::parse_test_vector(doc.dump(), &warnings);
    REQUIRE(warnings.size() == 2);
    bool saw_firmware = false, saw_debug = false;
    for (const auto& w : warnings) {
        if (w.find("firmware") != std::string::npos) saw_firmware = true;
        if (w.find("debug") != std::string::npos) saw_debug = true;
    }
    CHECK(saw_firmware);
    CHECK(saw_debug);
    // The canonical form no longer mentions the unknown fields.
    std::string s = testspec::serialize_test_vector(v);
    CHECK(s.find("firmware") == std::string::npos);
}

TEST_CASE("structural violations raise SchemaError naming the field") {
    auto expect_schema_error = [](const json& doc, const std::string& needle) {
        try {
            testspec::parse_test_vector(doc.dump());
            FAIL_CHECK("expected SchemaError for ", needle);
        } catch (const testspec::SchemaError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    json doc = example_doc();
    doc.erase("network_scenario");
    expect_schema_error(doc, "network_scenario");

    doc = example_doc();
    doc["network_scenario"]["id"] = 0;
    expect_schema_error(doc, "id");

    doc = example_doc();
    doc["network_scenario"]["core_network"]["name"] = "aether";
    expect_schema_error(doc, "core_network");

    doc = example_doc();
    doc["network_scenario"]["ran"]["functional_split"] = "6";
    expect_schema_error(doc, "functional_split");

    doc = example_doc();
    doc["network_scenario"]["ran"]["ru"]["address"] = "not-an-ip";
    expect_schema_error(doc, "address");

    doc = example_doc();
    doc["network_scenario"]["ran"]["ru"]["antenna_layout"] = "8x8";
    expect_schema_error(doc, "antenna_layout");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"] = json::array();
    expect_schema_error(doc, "ue_specification");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0]["duration"] = -5;
    expect_schema_error(doc, "duration");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0]["bandwidth_mbps"] = 0;
    expect_schema_error(doc, "bandwidth_mbps");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0]["protocol"] = "sctp";
    expect_schema_error(doc, "protocol");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0]["server_port"] = 70000;
    expect_schema_error(doc, "server_port");

    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0]["test_type"] = "ping";
    expect_schema_error(doc, "test_type");

    CHECK_THROWS_AS(testspec::parse_test_vector("{ not json"),
                    testspec::SchemaError);
    CHECK_THROWS_AS(testspec::parse_test_vector("[1,2,3]"),
                    testspec::SchemaError);
}

TEST_CASE("cross-field rules raise ConstraintError") {
    // Split 7.2 terminates on the O-RAN radio, split 8 on the SDR.
    json doc = example_doc();
    doc["network_scenario"]["ran"]["functional_split"] = "7.2";
    CHECK_THROWS_AS(testspec::parse_test_vector(doc.dump()),
                    testspec::ConstraintError);

    doc = example_doc();
    doc["network_scenario"]["ran"]["ru"]["name"] = "foxconn";
    CHECK_THROWS_AS(testspec::parse_test_vector(doc.dump()),
                    testspec::ConstraintError);

    // CU and DU must come from the same stack.
    doc = example_doc();
    doc["network_scenario"]["ran"]["du"]["name"] = "srsran-du";
    CHECK_THROWS_AS(testspec::parse_test_vector(doc.dump()),
                    testspec::ConstraintError);

    // UDP without a target rate is contradictory, not just incomplete.
    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0].erase("bandwidth_mbps");
    CHECK_THROWS_AS(testspec::parse_test_vector(doc.dump()),
                    testspec::ConstraintError);

    // TCP without a target rate is fine.
    doc = example_doc();
    doc["traffic_scenario"]["ue_specification"][0].erase("bandwidth_mbps");
    doc["traffic_scenario"]["ue_specification"][0]["protocol"] = "tcp";
    CHECK_NOTHROW(testspec::parse_test_vector(doc.dump()));
}

TEST_CASE("generated vectors round-trip exactly") {
    SplitMix64 rng(0x5eedbeef);
    for (int i = 0; i < 500; ++i) {
        testspec::TestVector v = random_vector(rng);
        CHECK_NOTHROW(testspec::validate(v));
        std::string s = testspec::serialize_test_vector(v);
        testspec::TestVector v2 = testspec::parse_test_vector(s);
        REQUIRE(v == v2);
        REQUIRE(testspec::serialize_test_vector(v2) == s);
    }
}

TEST_CASE("10k fuzzed documents never crash") {
    SplitMix64 rng(0xfadedcafe);
    std::string base = example_doc().dump();
    int parsed = 0, schema = 0, constraint = 0;
    for (int i = 0; i < 10000; ++i) {
        std::string text = base;
        // Mutate: byte flips, truncation, splice of random JSON fragments.
        switch (rng.next_u64() % 4) {
            case 0:
                for (int k = 0; k < 1 + static_cast<int>(rng.next_u64() % 8); ++k)
                    text[rng.next_u64() % text.size()] =
                        static_cast<char>(33 + rng.next_u64() % 90);
                break;
            case 1:
                text = text.substr(0, rng.next_u64() % text.size());
                break;
            case 2: {
                json doc = example_doc();
                // Randomly retype one of a fixed set of fields.
                const char* victims[] = {"id", "ran", "core_network"};
                doc["network_scenario"][victims[rng.next_u64() % 3]] =
                    static_cast<double>(rng.next_u64() % 1000) / 7.0;
                text = doc.dump();
                break;
            }
            default: {
                json doc = example_doc();
                auto& ue = doc["traffic_scenario"]["ue_specification"][0];
                const char* keys[] = {"slice_id",  "bandwidth_mbps", "duration",
                                      "protocol",  "server_port",    "reverse"};
                ue[keys[rng.next_u64() % 6]] = json::array({1, "x", nullptr});
                text = doc.dump();
                break;
            }
        }
        try {
            testspec::parse_test_vector(text);
            ++parsed;
        } catch (const testspec::SchemaError&) {
            ++schema;
        } catch (const testspec::ConstraintError&) {
            ++constraint;
        }
        // Anything else escaping is a crash-equivalent and fails the test.
    }
    // The mutator must actually exercise both accept and reject paths.
    CHECK(schema > 0);
    CHECK(parsed + schema + constraint == 10000);
}
