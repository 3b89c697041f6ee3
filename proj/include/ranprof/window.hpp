// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

namespace ranprof {

// Half-open time window [start_ns, end_ns) in virtual nanoseconds.
struct Window {
    int64_t start_ns = 0;
    int64_t end_ns = 0;

    bool valid() const { return end_ns > start_ns; }
    int64_t span_ns() const { return end_ns - start_ns; }
    double span_s() const { return static_cast<double>(end_ns - start_ns) * 1e-9; }
    bool contains(int64_t ts_ns) const { return ts_ns >= start_ns && ts_ns < end_ns; }
};

inline constexpr int64_t kNsPerSec = 1'000'000'000;

inline int64_t seconds_to_ns(double s) { return static_cast<int64_t>(s * 1e9 + 0.5); }

}  // namespace ranprof
