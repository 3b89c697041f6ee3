// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "ranprof/orchestrator.hpp"
#include "support/harness.hpp"

using namespace ranprof;
using namespace ranprof::orch;
using nlohmann::json;
using test_support::ServiceStack;

namespace {

namespace fs = std::filesystem;

const std::vector<RunStage> kHappyPath = {
    RunStage::PARSED,     RunStage::DEPLOY_CORE, RunStage::DEPLOY_RAN,
    RunStage::ATTACH_UES, RunStage::EXECUTE,     RunStage::COLLECT,
    RunStage::AGGREGATE,  RunStage::DONE,
};

std::string journal_path(const OrchestratorConfig& cfg, const TestRun& run) {
    return (fs::path(cfg.runs_dir) / (run.test_id + ".jsonl")).string();
}

}  // namespace

TEST_CASE("stage names round-trip") {
    for (int i = 0; i <= static_cast<int>(RunStage::FAILED); ++i) {
        auto s = static_cast<RunStage>(i);
        CHECK(stage_from_name(stage_name(s)) == s);
    }
    CHECK_THROWS_AS(stage_from_name("LIMBO"), std::invalid_argument);
}

TEST_CASE("config parsing keeps defaults and reads profiles") {
    OrchestratorConfig c = OrchestratorConfig::from_json(json::object());
    CHECK(c.core_node == "dell-r760-1");
    CHECK(c.split8_node == "microway-1");
    CHECK(c.node_outlets.at("microway-1") == "pdu-1-outlet-7");
    CHECK(c.scenario_profiles.empty());

    c = OrchestratorConfig::from_json(
        {{"core_node", "rack-9"},
         {"scenario_profiles", {{"3", {{"xapp", "protobuf"}}}, {"4", {{"xapp", "standard"}}}}}});
    CHECK(c.core_node == "rack-9");
    REQUIRE(c.scenario_profiles.size() == 2);
    CHECK(c.scenario_profiles.at(3).xapp == "protobuf");
    CHECK(c.scenario_profiles.at(4).xapp == "standard");
}

TEST_CASE("node leases serialize overlapping placements") {
    NodeLeaseRegistry reg;
    std::atomic<bool> acquired{false};
    auto lease = reg.acquire({"node-b", "node-a", "node-a"});  // dupes collapse

    std::thread waiter([&] {
        auto l2 = reg.acquire({"node-a", "node-c"});
        acquired = true;
    });
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    CHECK_FALSE(acquired.load());  // still blocked on node-a

    lease.release();
    waiter.join();
    CHECK(acquired.load());

    // Disjoint sets never block each other.
    auto l3 = reg.acquire({"node-a"});
    auto l4 = reg.acquire({"node-b"});
}

TEST_CASE("a udp downlink vector runs to DONE") {
    std::string dir = test_support::temp_dir("orch-done");
    ServiceStack stack(dir);
    Orchestrator orch(stack.orch_config(), 1);
    testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");

    TestRun run = orch.run_test(v);

    CHECK(run.done());
    CHECK(run.stage == RunStage::DONE);
    CHECK_FALSE(run.failure.has_value());
    CHECK(run.history == kHappyPath);
    CHECK(run.test_id.size() == 36);  // uuid shape

    // The measurement window is exactly the longest UE session.
    CHECK(run.end_ns - run.start_ns == seconds_to_ns(60));

    // Placement policy: core NFs on the server node, split-8 gNB on the SDR
    // host, radio at its own metered site.
    int core_pods = 0;
    for (const auto& [name, node] : run.placements) {
        if (node == "dell-r760-1") ++core_pods;
        if (name.rfind("oai-gnb-", 0) == 0) CHECK(node == "microway-1");
        if (name.rfind("ru-", 0) == 0) CHECK(node.empty());
    }
    CHECK(core_pods == 3);  // upf, amf, smf

    // UDP below capacity delivers the requested 70 Mbit/s for 60 s, exactly.
    REQUIRE(run.ue_results.size() == 1);
    CHECK(run.ue_results[0].bits_transferred == 4'200'000'000LL);
    CHECK(run.ue_results[0].direction == "downlink");

    SUBCASE("artifacts and reports are persisted and joined") {
        CHECK(fs::exists(run.artifacts.ru_trace_file));
        CHECK(fs::exists(run.artifacts.ue_results_file));
        CHECK(fs::exists(journal_path(orch.config(), run)));

        auto power = collectors::load_power_report(stack.reports_dir(), run.test_id);
        auto perf = collectors::load_perf_record(stack.reports_dir(), run.test_id);
        REQUIRE(power.has_value());
        REQUIRE(perf.has_value());
        CHECK(power->window.start_ns == run.start_ns);
        CHECK(power->window.end_ns == run.end_ns);
        CHECK_FALSE(power->partial);
        CHECK(perf->aggregate_bits == 4'200'000'000LL);

        // One target per NF, the radio, and both metered nodes.
        for (const char* name :
             {"gnb", "upf", "amf", "smf", "ru", "node:dell-r760-1", "node:microway-1"})
            CHECK(power->find(name) != nullptr);
        // Sustained 70 Mbit/s puts the monolithic gNB near 40 W.
        CHECK(power->find("gnb")->energy.mean_power_w == doctest::Approx(40.0).epsilon(0.02));
        CHECK(power->find("ru")->energy.mean_power_w == doctest::Approx(55.0).epsilon(0.02));
    }

    SUBCASE("teardown leaves an empty inventory") {
        json inv = http::get_json(stack.sim_url(), "/sim/inventory");
        for (const auto& c : inv.at("components")) CHECK(c.at("state") == "STOPPED");
        CHECK(inv.at("ues").empty());
    }

    SUBCASE("the journal reconstructs the run") {
        TestRun rec = Orchestrator::recover_run(journal_path(orch.config(), run));
        CHECK(rec.test_id == run.test_id);
        CHECK(rec.stage == RunStage::DONE);
        CHECK(rec.history == run.history);
        CHECK(rec.start_ns == run.start_ns);
        CHECK(rec.end_ns == run.end_ns);
        CHECK(rec.placements == run.placements);
        CHECK(testspec::serialize_test_vector(rec.vector) ==
              testspec::serialize_test_vector(run.vector));
        REQUIRE(rec.ue_results.size() == 1);
        CHECK(rec.ue_results[0].bits_transferred == run.ue_results[0].bits_transferred);
        CHECK(rec.artifacts.ru_trace_file == run.artifacts.ru_trace_file);

        CHECK_THROWS_AS(Orchestrator::recover_run(dir + "/absent.jsonl"),
                        std::runtime_error);
    }

    SUBCASE("sequential runs get distinct ids and disjoint windows") {
        TestRun second = orch.run_test(v);
        CHECK(second.done());
        CHECK(second.test_id != run.test_id);
        CHECK(second.start_ns >= run.end_ns);
        CHECK(collectors::load_power_report(stack.reports_dir(), second.test_id)
                  .has_value());
    }
}

TEST_CASE("scenario profiles add the xapp sidecar") {
    std::string dir = test_support::temp_dir("orch-xapp");
    ServiceStack stack(dir);
    testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");
    Orchestrator orch(stack.orch_config({{v.network_scenario.id, {"protobuf"}}}), 1);

    TestRun run = orch.run_test(v);
    REQUIRE(run.done());

    bool has_xapp = false, has_cudu = false;
    for (const auto& [name, node] : run.placements) {
        if (name.rfind("xapp-protobuf-", 0) == 0) {
            has_xapp = true;
            CHECK(node == "dell-r760-1");
        }
        if (name.rfind("oai-cudu-", 0) == 0) has_cudu = true;
    }
    CHECK(has_xapp);
    CHECK(has_cudu);

    auto power = collectors::load_power_report(stack.reports_dir(), run.test_id);
    REQUIRE(power.has_value());
    REQUIRE(power->find("xapp") != nullptr);
    CHECK(power->find("xapp")->component_class == "xapp");
    // One attached UE: the protobuf monitoring xApp draws ~1.5 W.
    CHECK(power->find("xapp")->energy.mean_power_w == doctest::Approx(1.5).epsilon(0.05));
}

TEST_CASE("an unroutable radio address fails the run at DEPLOY_RAN") {
    std::string dir = test_support::temp_dir("orch-ru-fail");
    ServiceStack stack(dir);
    Orchestrator orch(stack.orch_config(), 1);
    testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");
    v.network_scenario.ran.ru.address = "10.99.99.99";

    TestRun run = orch.run_test(v);

    CHECK(run.stage == RunStage::FAILED);
    REQUIRE(run.failure.has_value());
    CHECK(run.failure->stage == RunStage::DEPLOY_RAN);
    CHECK(run.failure->message.find("not ready") != std::string::npos);
    const std::vector<RunStage> expect = {RunStage::PARSED, RunStage::DEPLOY_CORE,
                                          RunStage::DEPLOY_RAN, RunStage::FAILED};
    CHECK(run.history == expect);

    // Cleanup still ran: nothing left active, UEs never attached.
    json inv = http::get_json(stack.sim_url(), "/sim/inventory");
    for (const auto& c : inv.at("components")) CHECK(c.at("state") == "STOPPED");
    CHECK(inv.at("ues").empty());

    // The journal carries the failure for post-mortems.
    TestRun rec = Orchestrator::recover_run(journal_path(orch.config(), run));
    CHECK(rec.stage == RunStage::FAILED);
    REQUIRE(rec.failure.has_value());
    CHECK(rec.failure->stage == RunStage::DEPLOY_RAN);
}

TEST_CASE("a hung UE fails the run but salvages collection") {
    std::string dir = test_support::temp_dir("orch-hang");
    ServiceStack stack(dir);
    OrchestratorConfig cfg = stack.orch_config();
    cfg.collect_retries = 0;
    Orchestrator orch(cfg, 1);
    testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");

    stack.engine->set_ue_hang(0, true);
    TestRun run = orch.run_test(v);

    CHECK(run.stage == RunStage::FAILED);
    REQUIRE(run.failure.has_value());
    CHECK(run.failure->stage == RunStage::EXECUTE);
    CHECK(run.failure->message.find("no result") != std::string::npos);

    // Best-effort collection still happened after the traffic failure.
    const std::vector<RunStage> expect = {
        RunStage::PARSED,     RunStage::DEPLOY_CORE, RunStage::DEPLOY_RAN,
        RunStage::ATTACH_UES, RunStage::EXECUTE,     RunStage::COLLECT,
        RunStage::AGGREGATE,  RunStage::FAILED,
    };
    CHECK(run.history == expect);
    CHECK(fs::exists(run.artifacts.ru_trace_file));
    CHECK(collectors::load_power_report(stack.reports_dir(), run.test_id).has_value());

    json inv = http::get_json(stack.sim_url(), "/sim/inventory");
    for (const auto& c : inv.at("components")) CHECK(c.at("state") == "STOPPED");
}

TEST_CASE("a dead collector fails the run after teardown") {
    std::string dir = test_support::temp_dir("orch-collector-down");
    ServiceStack stack(dir);
    OrchestratorConfig cfg = stack.orch_config();
    cfg.collect_retries = 0;
    Orchestrator orch(cfg, 1);
    testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");

    stack.power_service->stop();
    TestRun run = orch.run_test(v);

    CHECK(run.stage == RunStage::FAILED);
    REQUIRE(run.failure.has_value());
    CHECK(run.failure->stage == RunStage::COLLECT);
    CHECK(run.history.back() == RunStage::FAILED);
    CHECK(run.history[run.history.size() - 2] == RunStage::COLLECT);

    // Traffic succeeded and its artifacts survive even though the power
    // collector never answered.
    REQUIRE(run.ue_results.size() == 1);
    CHECK(run.ue_results[0].bits_transferred == 4'200'000'000LL);
    CHECK(fs::exists(run.artifacts.ue_results_file));
    CHECK(fs::exists(run.artifacts.ru_trace_file));

    json inv = http::get_json(stack.sim_url(), "/sim/inventory");
    for (const auto& c : inv.at("components")) CHECK(c.at("state") == "STOPPED");
}

TEST_CASE("identical seeds replay identical runs") {
    auto run_once = [](const std::string& dir) {
        ServiceStack stack(dir);
        Orchestrator orch(stack.orch_config(), 17);
        testspec::TestVector v = test_support::load_vector_fixture("oai_udp_downlink");
        TestRun run = orch.run_test(v);
        REQUIRE(run.done());
        auto power = collectors::load_power_report(stack.reports_dir(), run.test_id);
        REQUIRE(power.has_value());
        return std::pair<std::string, json>(run.test_id, json(*power));
    };
    auto [id1, p1] = run_once(test_support::temp_dir("orch-replay-1"));
    auto [id2, p2] = run_once(test_support::temp_dir("orch-replay-2"));
    CHECK(id1 == id2);  // orchestrator rng drives the id

    // The ru target's query string is the trace's absolute path, which embeds
    // the scratch directory; everything measured must replay bit-for-bit.
    auto strip_paths = [](json& report) {
        for (auto& t : report.at("targets"))
            if (t.at("source") == "WATTMETER") t["target"] = "";
    };
    strip_paths(p1);
    strip_paths(p2);
    CHECK(p1 == p2);
}
