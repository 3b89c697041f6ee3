// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ranprof/rng.hpp"
#include "ranprof/timeseries.hpp"
#include "support/harness.hpp"

using namespace ranprof;

namespace {

SampleSeries make_series(std::vector<std::pair<double, double>> pts,
                         double nominal_s = 1.0) {
    SampleSeries s;
    s.source = Source::POD_ESTIMATOR;
    s.target = "pod";
    s.nominal_interval_ns = seconds_to_ns(nominal_s);
    for (auto [t, p] : pts) s.samples.push_back({seconds_to_ns(t), p});
    refresh_gap_flag(s);
    return s;
}

Window win(double a, double b) { return {seconds_to_ns(a), seconds_to_ns(b)}; }

// Independent integration oracle: clip every adjacent sample pair against the
// half-open window and integrate the linear piece over the intersection in
// closed form. Structurally different from the implementation's edge-case
// walk, so shared off-by-one mistakes are unlikely.
struct OracleResult {
    double energy_j = 0.0;
    int64_t covered_ns = 0;
    int gaps = 0;
    bool empty = true;
};

OracleResult oracle(const SampleSeries& s, const Window& w) {
    OracleResult r;
    for (const auto& p : s.samples)
        if (w.contains(p.ts_ns)) r.empty = false;
    if (r.empty) return r;
    int64_t thr = s.nominal_interval_ns > 0
                      ? gap_threshold_ns(s.nominal_interval_ns)
                      : INT64_MAX;
    for (size_t i = 0; i + 1 < s.samples.size(); ++i) {
        const auto& a = s.samples[i];
        const auto& b = s.samples[i + 1];
        int64_t lo = std::max(a.ts_ns, w.start_ns);
        int64_t hi = std::min(b.ts_ns, w.end_ns);
        if (lo >= hi) continue;
        if (b.ts_ns - a.ts_ns > thr) {
            r.gaps += 1;
            continue;
        }
        auto value_at = [&](int64_t t) {
            double f = static_cast<double>(t - a.ts_ns) /
                       static_cast<double>(b.ts_ns - a.ts_ns);
            return a.power_w + f * (b.power_w - a.power_w);
        };
        r.energy_j += 0.5 * (value_at(lo) + value_at(hi)) *
                      static_cast<double>(hi - lo) * 1e-9;
        r.covered_ns += hi - lo;
    }
    return r;
}

SampleSeries random_series(SplitMix64& rng) {
    SampleSeries s;
    s.source = Source::POD_ESTIMATOR;
    s.target = "pod";
    s.nominal_interval_ns = kNsPerSec;
    size_t n = 2 + rng.next_range(0, 198);
    int64_t t = static_cast<int64_t>(rng.next_range(0, 5)) * kNsPerSec;
    for (size_t i = 0; i < n; ++i) {
        // Deltas from 0.2x to 5x nominal: some pairs land beyond the 3x
        // gap threshold on purpose.
        t += static_cast<int64_t>((0.2 + 4.8 * rng.next_double()) * 1e9);
        s.samples.push_back({t, 100.0 * rng.next_double()});
    }
    refresh_gap_flag(s);
    return s;
}

}  // namespace

TEST_CASE("fixed example: three samples over two seconds") {
    SampleSeries s = make_series({{0, 10}, {1, 20}, {2, 30}});
    ts::EnergyResult r = ts::integrate_energy(s, win(0, 2));
    CHECK(r.energy_j == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(r.mean_power_w == doctest::Approx(20.0).epsilon(1e-12));
    CHECK(r.covered_fraction == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.gap_count == 0);
    CHECK_FALSE(r.empty);
}

TEST_CASE("fixed example: ten-second hole in a minute of constant draw") {
    std::vector<std::pair<double, double>> pts;
    for (int t = 0; t <= 60; ++t)
        if (t <= 20 || t >= 30) pts.push_back({static_cast<double>(t), 10.0});
    SampleSeries s = make_series(pts);
    CHECK(s.has_gaps);
    ts::EnergyResult r = ts::integrate_energy(s, win(0, 60));
    CHECK(r.energy_j == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(r.covered_fraction == doctest::Approx(50.0 / 60.0).epsilon(1e-12));
    CHECK(r.mean_power_w == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.gap_count == 1);
}

TEST_CASE("boundary behavior") {
    SampleSeries s = make_series({{0, 10}, {1, 20}, {2, 30}, {3, 40}});

    SUBCASE("sample at end_ns anchors but adds no mass") {
        // [0,2) ends exactly on the 30 W sample: the piece 1->2 integrates to
        // the interpolated boundary value, identical to integrating [0,2)
        // of the underlying signal.
        ts::EnergyResult r = ts::integrate_energy(s, win(0, 2));
        CHECK(r.energy_j == doctest::Approx(40.0).epsilon(1e-12));
        // Dropping everything from end_ns on changes nothing.
        SampleSeries cut = make_series({{0, 10}, {1, 20}, {2, 30}});
        CHECK(ts::integrate_energy(cut, win(0, 2)).energy_j ==
              doctest::Approx(r.energy_j).epsilon(1e-12));
    }

    SUBCASE("window fully between samples is empty") {
        SampleSeries wide = make_series({{0, 10}, {100, 10}}, 200.0);
        ts::EnergyResult r = ts::integrate_energy(wide, win(40, 60));
        CHECK(r.empty);
        CHECK(r.energy_j == 0.0);
        CHECK(r.covered_fraction == 0.0);
    }

    SUBCASE("single in-window sample has no integrable piece") {
        SampleSeries lone = make_series({{5, 50}}, 1.0);
        ts::EnergyResult r = ts::integrate_energy(lone, win(0, 10));
        CHECK_FALSE(r.empty);
        CHECK(r.energy_j == 0.0);
        CHECK(r.covered_fraction == 0.0);
        CHECK(r.mean_power_w == 0.0);
    }

    SUBCASE("out-of-window anchors extend to the window edges") {
        // Samples at 0.5 and 2.5 s anchor the [1,2) window from both sides.
        SampleSeries anchored = make_series({{0.5, 10}, {1.5, 20}, {2.5, 30}});
        ts::EnergyResult r = ts::integrate_energy(anchored, win(1, 2));
        // Signal is 10 W/s slope: value 15 at t=1, 25 at t=2 -> 20 J.
        CHECK(r.energy_j == doctest::Approx(20.0).epsilon(1e-12));
        CHECK(r.covered_fraction == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("anchoring never crosses a gap") {
        // Previous sample is 10 s before the window under a 1 s nominal
        // interval: left edge must stay uncovered.
        SampleSeries gappy = make_series({{0, 10}, {10, 10}, {11, 10}});
        ts::EnergyResult r = ts::integrate_energy(gappy, win(9.5, 11));
        CHECK(r.gap_count == 1);
        CHECK(r.energy_j == doctest::Approx(10.0).epsilon(1e-12));  // 10->11 only
        CHECK(r.covered_fraction == doctest::Approx(1.0 / 1.5).epsilon(1e-12));
    }

    SUBCASE("invalid inputs throw") {
        CHECK_THROWS_AS(ts::integrate_energy(s, win(2, 2)), std::invalid_argument);
        CHECK_THROWS_AS(ts::integrate_energy(s, win(3, 1)), std::invalid_argument);
        SampleSeries bad = make_series({{1, 10}, {1, 20}});
        CHECK_THROWS_AS(ts::integrate_energy(bad, win(0, 2)), std::invalid_argument);
    }
}

TEST_CASE("1000 random series agree with the brute-force oracle") {
    SplitMix64 rng(0x0bace1e5);
    for (int iter = 0; iter < 1000; ++iter) {
        SampleSeries s = random_series(rng);
        int64_t lo = s.samples.front().ts_ns;
        int64_t hi = s.samples.back().ts_ns;
        int64_t span = hi - lo;
        // Window styles: inside, straddling either edge, exact sample hits.
        Window w;
        switch (rng.next_range(0, 3)) {
            case 0:
                w.start_ns = lo + static_cast<int64_t>(rng.next_double() * span / 2);
                w.end_ns = w.start_ns + 1 +
                           static_cast<int64_t>(rng.next_double() * span / 2);
                break;
            case 1:
                w.start_ns = lo - kNsPerSec * 2;
                w.end_ns = hi + kNsPerSec * 2;
                break;
            case 2: {
                size_t i = rng.next_range(0, s.samples.size() - 1);
                size_t j = rng.next_range(0, s.samples.size() - 1);
                w.start_ns = std::min(s.samples[i].ts_ns, s.samples[j].ts_ns);
                w.end_ns = std::max(s.samples[i].ts_ns, s.samples[j].ts_ns) + 1;
                break;
            }
            default:
                w.start_ns = hi - span / 4;
                w.end_ns = hi + span / 4 + 1;
                break;
        }
        CAPTURE(iter);
        ts::EnergyResult got = ts::integrate_energy(s, w);
        OracleResult want = oracle(s, w);
        REQUIRE(got.empty == want.empty);
        REQUIRE(got.gap_count == want.gaps);
        REQUIRE(got.energy_j ==
                doctest::Approx(want.energy_j).epsilon(1e-9).scale(1.0));
        double want_cov = static_cast<double>(want.covered_ns) /
                          static_cast<double>(w.span_ns());
        REQUIRE(got.covered_fraction == doctest::Approx(want_cov).epsilon(1e-12));
        if (want.covered_ns > 0)
            REQUIRE(got.mean_power_w ==
                    doctest::Approx(want.energy_j /
                                    (static_cast<double>(want.covered_ns) * 1e-9))
                        .epsilon(1e-9));
    }
}

TEST_CASE("integration is additive across adjacent windows") {
    SplitMix64 rng(0xadd171fe);
    for (int iter = 0; iter < 300; ++iter) {
        SampleSeries s = random_series(rng);
        int64_t lo = s.samples.front().ts_ns - kNsPerSec;
        int64_t hi = s.samples.back().ts_ns + kNsPerSec;
        int64_t mid = lo + 1 + static_cast<int64_t>(rng.next_double() *
                                                    static_cast<double>(hi - lo - 2));
        if (rng.next_range(0, 3) == 0) {
            // Split exactly on a sample timestamp now and then.
            mid = s.samples[rng.next_range(0, s.samples.size() - 1)].ts_ns;
            if (mid <= lo || mid >= hi) continue;
        }
        double whole = ts::integrate_energy(s, {lo, hi}).energy_j;
        double left = ts::integrate_energy(s, {lo, mid}).energy_j;
        double right = ts::integrate_energy(s, {mid, hi}).energy_j;
        REQUIRE(whole ==
                doctest::Approx(left + right).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("energy scales linearly with power") {
    SplitMix64 rng(0x5ca1ab1e);
    for (int iter = 0; iter < 100; ++iter) {
        SampleSeries s = random_series(rng);
        SampleSeries scaled = s;
        const double k = 3.75;
        for (auto& p : scaled.samples) p.power_w *= k;
        Window w{s.samples.front().ts_ns, s.samples.back().ts_ns + 1};
        ts::EnergyResult a = ts::integrate_energy(s, w);
        ts::EnergyResult b = ts::integrate_energy(scaled, w);
        REQUIRE(b.energy_j == doctest::Approx(k * a.energy_j).epsilon(1e-12));
        REQUIRE(b.covered_fraction ==
                doctest::Approx(a.covered_fraction).epsilon(1e-15));
        REQUIRE(b.gap_count == a.gap_count);
    }
}

TEST_CASE("align integrates every series in a set over one window") {
    SampleSeries a = make_series({{0, 10}, {1, 10}});
    a.target = "a";
    SampleSeries b = make_series({{0, 20}, {1, 20}});
    b.target = "b";
    auto out = ts::align({a, b}, win(0, 1));
    CHECK(out.at("a").energy_j == doctest::Approx(10.0));
    CHECK(out.at("b").energy_j == doctest::Approx(20.0));
}

TEST_CASE("series store") {
    std::string root = test_support::temp_dir("store");
    ts::SeriesStore store(root);

    SampleSeries s = make_series({{0, 10}, {1, 20}, {2, 30}});
    s.source = Source::PDU;
    s.target = "pdu-1-outlet-3";
    s.accuracy_fraction = 0.005;
    s.energy_wh = {0.0, 0.1, 0.2};
    s.voltage_v = {208, 208, 208};
    s.current_a = {0.05, 0.10, 0.14};

    SUBCASE("round-trip preserves every column and attribute") {
        std::string id = store.store(s);
        CHECK(id.rfind("PDU/pdu-1-outlet-3/", 0) == 0);
        SampleSeries back = store.fetch(id);
        CHECK(back.source == s.source);
        CHECK(back.target == s.target);
        CHECK(back.nominal_interval_ns == s.nominal_interval_ns);
        CHECK(back.accuracy_fraction == doctest::Approx(s.accuracy_fraction));
        REQUIRE(back.samples.size() == s.samples.size());
        for (size_t i = 0; i < s.samples.size(); ++i) {
            CHECK(back.samples[i].ts_ns == s.samples[i].ts_ns);
            CHECK(back.samples[i].power_w == s.samples[i].power_w);
            CHECK(back.energy_wh[i] == s.energy_wh[i]);
            CHECK(back.voltage_v[i] == s.voltage_v[i]);
            CHECK(back.current_a[i] == s.current_a[i]);
        }
    }

    SUBCASE("re-storing identical data is a no-op") {
        std::string id1 = store.store(s);
        auto count_files = [&] {
            size_t n = 0;
            for (auto& e : std::filesystem::recursive_directory_iterator(root))
                if (e.is_regular_file()) ++n;
            return n;
        };
        size_t files_before = count_files();
        std::string id2 = store.store(s);
        CHECK(id1 == id2);
        CHECK(count_files() == files_before);
    }

    SUBCASE("fetch_range merges segments and clips half-open") {
        SampleSeries first = make_series({{0, 1}, {1, 2}, {2, 3}});
        first.source = Source::WATTMETER;
        first.target = "ru-1";
        SampleSeries second = make_series({{2, 3}, {3, 4}, {4, 5}});
        second.source = Source::WATTMETER;
        second.target = "ru-1";
        store.store(first);
        store.store(second);
        SampleSeries merged =
            store.fetch_range(Source::WATTMETER, "ru-1", win(1, 4));
        REQUIRE(merged.samples.size() == 3);  // ts 1, 2, 3; dupes collapsed
        CHECK(merged.samples[0].ts_ns == seconds_to_ns(1));
        CHECK(merged.samples[1].ts_ns == seconds_to_ns(2));
        CHECK(merged.samples[2].ts_ns == seconds_to_ns(3));
        CHECK(merged.samples[2].power_w == doctest::Approx(4.0));
    }

    SUBCASE("errors") {
        CHECK_THROWS_AS(store.fetch("PDU/nope/seg-0"), ts::NotFound);
        CHECK_THROWS_AS(store.fetch_range(Source::PDU, "nope", win(0, 1)),
                        ts::NotFound);
        SampleSeries empty;
        empty.target = "x";
        CHECK_THROWS_AS(store.store(empty), ts::StoreError);
    }

    SUBCASE("csv export") {
        std::string id = store.store(s);
        std::string csv = store.to_csv(id);
        CHECK(csv.rfind("ts_ns,power_w,energy_wh\n", 0) == 0);
        size_t rows = static_cast<size_t>(
            std::count(csv.begin(), csv.end(), '\n'));
        CHECK(rows == s.samples.size() + 1);

        SampleSeries bare = make_series({{0, 10}, {1, 20}});
        bare.source = Source::POD_ESTIMATOR;
        bare.target = "pod-x";
        std::string csv2 = store.to_csv(store.store(bare));
        CHECK(csv2.rfind("ts_ns,power_w\n", 0) == 0);
    }
}
