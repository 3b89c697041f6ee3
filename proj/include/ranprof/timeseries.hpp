// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Power-to-energy integration and the file-backed series store.
//
// Integration semantics (these are load-bearing for everything downstream):
//  * The series defines a piecewise-linear power signal through its samples.
//  * integrate_energy integrates that signal over the half-open window
//    [start_ns, end_ns) clipped to the sampled domain. At most one sample
//    just outside each window edge serves as an interpolation anchor; a
//    sample exactly at end_ns is such an anchor, never an in-window sample.
//  * Adjacent samples spaced more than 3x the nominal interval apart are a
//    gap: no energy is invented across it, covered_fraction drops, and
//    gap_count increments. Anchoring never crosses a gap.
//  * Zero in-window samples means EmptyWindow: energy 0, covered 0, flagged.
// These rules make integration exactly additive across adjacent windows and
// strictly local to the window, which the property suite checks at 1e-9.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranprof/sample_series.hpp"
#include "ranprof/window.hpp"

namespace ranprof::ts {

class StoreError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NotFound : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct EnergyResult {
    double energy_j = 0.0;
    double mean_power_w = 0.0;       // energy / covered duration
    double covered_fraction = 0.0;   // covered duration / window duration
    int gap_count = 0;
    bool empty = false;              // no samples inside the window
};

// Trapezoidal integration of `series` over `window` per the rules above.
EnergyResult integrate_energy(const SampleSeries& series, const Window& window);

// Integrates every series over the same window, keyed by target name.
std::map<std::string, EnergyResult> align(const std::vector<SampleSeries>& series_set,
                                          const Window& window);

// Append-oriented on-disk store, one stream per (source, target):
//   <root>/<source>/<target>/<segment>.bin  plus  index.json per stream.
// Segment files are immutable; the segment name is a content hash so
// re-storing identical data is a no-op and re-collection stays idempotent.
class SeriesStore {
  public:
    explicit SeriesStore(std::string root_dir);

    // Persists the series and returns its series id
    // ("<source>/<target>/<segment>"). Empty series are rejected.
    std::string store(const SampleSeries& series);

    // Loads one stored segment verbatim.
    SampleSeries fetch(const std::string& series_id) const;

    // Merges every stored segment of the stream that overlaps `window`,
    // restricted to the window (half-open). Duplicate timestamps collapse.
    // Throws NotFound when the stream has never been written.
    SampleSeries fetch_range(Source source, const std::string& target,
                             const Window& window) const;

    // CSV export of a stored segment: "ts_ns,power_w[,energy_wh]" header.
    std::string to_csv(const std::string& series_id) const;

    const std::string& root() const { return root_; }

  private:
    std::string root_;
    mutable std::mutex mu_;
};

}  // namespace ranprof::ts
