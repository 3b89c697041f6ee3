// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/rng.hpp"

#include <cmath>
#include <cstdio>

namespace ranprof {

namespace {

constexpr uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// FNV-1a over a byte string.
uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

double to_unit(uint64_t v) {
    // 53 random bits -> [0, 1).
    return static_cast<double>(v >> 11) * 0x1.0p-53;
}

}  // namespace

uint64_t SplitMix64::next_u64() {
    state_ += kGamma;
    return mix(state_);
}

double SplitMix64::next_double() { return to_unit(next_u64()); }

uint64_t SplitMix64::next_range(uint64_t lo, uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
}

double SplitMix64::next_gaussian() {
    double u1 = next_double();
    double u2 = next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

SplitMix64 SplitMix64::fork(uint64_t salt) const {
    return SplitMix64(mix(state_ ^ mix(salt * kGamma)));
}

uint64_t stable_hash64(uint64_t seed, const std::string& label, int64_t ts_ns) {
    uint64_t h = fnv1a(label.data(), label.size());
    h = fnv1a(&seed, sizeof(seed), h);
    h = fnv1a(&ts_ns, sizeof(ts_ns), h);
    return mix(h);
}

double gaussian_at(uint64_t seed, const std::string& label, int64_t ts_ns, double sigma) {
    if (sigma <= 0.0) return 0.0;
    uint64_t h = stable_hash64(seed, label, ts_ns);
    double u1 = to_unit(h);
    double u2 = to_unit(mix(h ^ kGamma));
    if (u1 < 1e-300) u1 = 1e-300;
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double uniform_at(uint64_t seed, const std::string& label, int64_t ts_ns) {
    return to_unit(stable_hash64(seed, label, ts_ns));
}

std::string make_uuid(SplitMix64& rng) {
    uint64_t a = rng.next_u64();
    uint64_t b = rng.next_u64();
    // Set version 4 and RFC variant bits.
    a = (a & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
    b = (b & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
    char buf[37];
    std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                  static_cast<uint32_t>(a >> 32), static_cast<uint32_t>((a >> 16) & 0xffff),
                  static_cast<uint32_t>(a & 0xffff), static_cast<uint32_t>(b >> 48),
                  static_cast<unsigned long long>(b & 0xffffffffffffULL));
    return std::string(buf);
}

}  // namespace ranprof
