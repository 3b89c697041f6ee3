// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace ranprof {

// SplitMix64 stream. Small, fast, and identical on every platform, which is
// what keeps fixed-seed reruns byte-identical (std:: distributions are
// implementation-defined and must not be used anywhere results depend on).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}

    uint64_t next_u64();

    // Uniform in [0, 1).
    double next_double();

    // Uniform integer in [lo, hi] inclusive.
    uint64_t next_range(uint64_t lo, uint64_t hi);

    // Standard normal via Box-Muller on two explicit uniforms.
    double next_gaussian();

    // Derives an independent child stream; used for per-rep seeds.
    SplitMix64 fork(uint64_t salt) const;

    uint64_t state() const { return state_; }

  private:
    uint64_t state_;
};

// One-shot mixing of (seed, label, ts) into a 64-bit value. Pure function of
// its inputs, so telemetry noise can be re-queried for any window and any
// number of times without drifting.
uint64_t stable_hash64(uint64_t seed, const std::string& label, int64_t ts_ns);

// Deterministic N(0, sigma) draw addressed by (seed, label, ts).
double gaussian_at(uint64_t seed, const std::string& label, int64_t ts_ns, double sigma);

// Deterministic U[0,1) draw addressed by (seed, label, ts).
double uniform_at(uint64_t seed, const std::string& label, int64_t ts_ns);

// RFC-4122 style v4 UUID string drawn from the given stream.
std::string make_uuid(SplitMix64& rng);

}  // namespace ranprof
