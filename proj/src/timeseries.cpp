// SPDX-FileCopyrightText: 2026 The ranprof Authors
// SPDX-License-Identifier: Apache-2.0

#include "ranprof/timeseries.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace ranprof {

const char* source_name(Source s) {
    switch (s) {
        case Source::PDU: return "PDU";
        case Source::POD_ESTIMATOR: return "POD_ESTIMATOR";
        case Source::WATTMETER: return "WATTMETER";
    }
    return "UNKNOWN";
}

Source source_from_name(const std::string& name) {
    if (name == "PDU") return Source::PDU;
    if (name == "POD_ESTIMATOR") return Source::POD_ESTIMATOR;
    if (name == "WATTMETER") return Source::WATTMETER;
    throw std::invalid_argument("unknown telemetry source '" + name + "'");
}

void refresh_gap_flag(SampleSeries& s) {
    s.has_gaps = false;
    if (s.nominal_interval_ns <= 0) return;
    int64_t thr = gap_threshold_ns(s.nominal_interval_ns);
    for (size_t i = 1; i < s.samples.size(); ++i) {
        if (s.samples[i].ts_ns - s.samples[i - 1].ts_ns > thr) {
            s.has_gaps = true;
            return;
        }
    }
}

}  // namespace ranprof

namespace ranprof::ts {

namespace {

double lerp_at(const PowerSample& a, const PowerSample& b, int64_t ts) {
    double f = static_cast<double>(ts - a.ts_ns) / static_cast<double>(b.ts_ns - a.ts_ns);
    return a.power_w + f * (b.power_w - a.power_w);
}

// Trapezoid area of the linear piece between (t0,v0) and (t1,v1), in joules.
double piece_energy(int64_t t0, double v0, int64_t t1, double v1) {
    return 0.5 * (v0 + v1) * static_cast<double>(t1 - t0) * 1e-9;
}

void check_monotone(const SampleSeries& s) {
    for (size_t i = 1; i < s.samples.size(); ++i)
        if (s.samples[i].ts_ns <= s.samples[i - 1].ts_ns)
            throw std::invalid_argument("series timestamps must be strictly increasing");
}

}  // namespace

EnergyResult integrate_energy(const SampleSeries& series, const Window& window) {
    if (!window.valid()) throw std::invalid_argument("window end must be after start");
    check_monotone(series);

    const auto& xs = series.samples;
    const int64_t s = window.start_ns;
    const int64_t e = window.end_ns;

    auto lo = std::lower_bound(xs.begin(), xs.end(), s,
                               [](const PowerSample& p, int64_t t) { return p.ts_ns < t; });
    auto hi = std::lower_bound(xs.begin(), xs.end(), e,
                               [](const PowerSample& p, int64_t t) { return p.ts_ns < t; });
    size_t i0 = static_cast<size_t>(lo - xs.begin());
    size_t i1 = static_cast<size_t>(hi - xs.begin());

    EnergyResult r;
    if (i0 == i1) {
        r.empty = true;
        return r;
    }

    const int64_t thr = series.nominal_interval_ns > 0
                            ? gap_threshold_ns(series.nominal_interval_ns)
                            : INT64_MAX;
    double energy = 0.0;
    int64_t covered = 0;

    // Left edge: the sample just before the window anchors interpolation
    // back to start_ns, unless the pair straddles a gap.
    if (i0 > 0 && xs[i0].ts_ns > s) {
        const PowerSample& a = xs[i0 - 1];
        const PowerSample& b = xs[i0];
        if (b.ts_ns - a.ts_ns > thr) {
            r.gap_count += 1;
        } else {
            energy += piece_energy(s, lerp_at(a, b, s), b.ts_ns, b.power_w);
            covered += b.ts_ns - s;
        }
    }

    // Interior pairs, both samples inside the window.
    for (size_t i = i0; i + 1 < i1; ++i) {
        const PowerSample& a = xs[i];
        const PowerSample& b = xs[i + 1];
        if (b.ts_ns - a.ts_ns > thr) {
            r.gap_count += 1;
        } else {
            energy += piece_energy(a.ts_ns, a.power_w, b.ts_ns, b.power_w);
            covered += b.ts_ns - a.ts_ns;
        }
    }

    // Right edge: the first sample at or past end_ns anchors interpolation
    // up to end_ns. A sample exactly at end_ns therefore shapes the boundary
    // piece but never adds mass of its own.
    if (i1 < xs.size()) {
        const PowerSample& a = xs[i1 - 1];
        const PowerSample& b = xs[i1];
        if (b.ts_ns - a.ts_ns > thr) {
            r.gap_count += 1;
        } else if (a.ts_ns < e) {
            energy += piece_energy(a.ts_ns, a.power_w, e, lerp_at(a, b, e));
            covered += e - a.ts_ns;
        }
    }

    r.energy_j = energy;
    r.covered_fraction = static_cast<double>(covered) / static_cast<double>(e - s);
    r.mean_power_w = covered > 0 ? energy / (static_cast<double>(covered) * 1e-9) : 0.0;
    return r;
}

std::map<std::string, EnergyResult> align(const std::vector<SampleSeries>& series_set,
                                          const Window& window) {
    std::map<std::string, EnergyResult> out;
    for (const SampleSeries& s : series_set) out[s.target] = integrate_energy(s, window);
    return out;
}

// ---- on-disk store ----------------------------------------------------------

namespace {

constexpr uint32_t kMagic = 0x52505331;  // "RPS1"

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out += (isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' || c == '_')
                   ? c
                   : '_';
    return out.empty() ? std::string("_") : out;
}

template <typename T>
void put(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(const std::string& buf, size_t& off) {
    if (off + sizeof(T) > buf.size()) throw StoreError("segment file truncated");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

std::string encode_segment(const SampleSeries& s) {
    json header = {{"source", source_name(s.source)},
                   {"target", s.target},
                   {"nominal_interval_ns", s.nominal_interval_ns},
                   {"accuracy_fraction", s.accuracy_fraction},
                   {"has_gaps", s.has_gaps},
                   {"energy", !s.energy_wh.empty()},
                   {"voltage", !s.voltage_v.empty()},
                   {"current", !s.current_a.empty()}};
    std::string hdr = header.dump();
    std::string buf;
    put(buf, kMagic);
    put(buf, static_cast<uint32_t>(hdr.size()));
    buf += hdr;
    put(buf, static_cast<uint64_t>(s.samples.size()));
    for (const PowerSample& p : s.samples) {
        put(buf, p.ts_ns);
        put(buf, p.power_w);
    }
    for (double v : s.energy_wh) put(buf, v);
    for (double v : s.voltage_v) put(buf, v);
    for (double v : s.current_a) put(buf, v);
    return buf;
}

SampleSeries decode_segment(const std::string& buf) {
    size_t off = 0;
    if (take<uint32_t>(buf, off) != kMagic) throw StoreError("bad segment magic");
    uint32_t hlen = take<uint32_t>(buf, off);
    if (off + hlen > buf.size()) throw StoreError("segment file truncated");
    json header = json::parse(buf.substr(off, hlen), nullptr, false);
    if (header.is_discarded()) throw StoreError("bad segment header");
    off += hlen;

    SampleSeries s;
    s.source = source_from_name(header.at("source").get<std::string>());
    s.target = header.at("target").get<std::string>();
    s.nominal_interval_ns = header.at("nominal_interval_ns").get<int64_t>();
    s.accuracy_fraction = header.at("accuracy_fraction").get<double>();
    s.has_gaps = header.at("has_gaps").get<bool>();

    uint64_t count = take<uint64_t>(buf, off);
    s.samples.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        PowerSample p;
        p.ts_ns = take<int64_t>(buf, off);
        p.power_w = take<double>(buf, off);
        s.samples.push_back(p);
    }
    auto column = [&](bool present, std::vector<double>& out) {
        if (!present) return;
        out.reserve(count);
        for (uint64_t i = 0; i < count; ++i) out.push_back(take<double>(buf, off));
    };
    column(header.value("energy", false), s.energy_wh);
    column(header.value("voltage", false), s.voltage_v);
    column(header.value("current", false), s.current_a);
    return s;
}

uint64_t content_hash(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StoreError("cannot open " + p.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

void write_file_atomic(const fs::path& p, const std::string& data) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StoreError("cannot write " + tmp.string());
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
    }
    fs::rename(tmp, p);
}

}  // namespace

SeriesStore::SeriesStore(std::string root_dir) : root_(std::move(root_dir)) {
    fs::create_directories(root_);
}

std::string SeriesStore::store(const SampleSeries& series) {
    if (series.empty()) throw StoreError("refusing to store an empty series");
    check_monotone(series);
    auto aligned = [&](const std::vector<double>& col) {
        return col.empty() || col.size() == series.samples.size();
    };
    if (!aligned(series.energy_wh) || !aligned(series.voltage_v) || !aligned(series.current_a))
        throw StoreError("optional columns must be sample-aligned");

    std::lock_guard<std::mutex> lock(mu_);
    fs::path dir = fs::path(root_) / source_name(series.source) / sanitize(series.target);
    fs::create_directories(dir);

    std::string bytes = encode_segment(series);
    char segname[32];
    std::snprintf(segname, sizeof(segname), "seg-%016llx",
                  static_cast<unsigned long long>(content_hash(bytes)));
    fs::path segfile = dir / (std::string(segname) + ".bin");
    if (!fs::exists(segfile)) write_file_atomic(segfile, bytes);

    fs::path idxfile = dir / "index.json";
    json idx = {{"source", source_name(series.source)},
                {"target", series.target},
                {"segments", json::array()}};
    if (fs::exists(idxfile)) {
        idx = json::parse(read_file(idxfile), nullptr, false);
        if (idx.is_discarded()) throw StoreError("corrupt index " + idxfile.string());
    }
    bool known = false;
    for (const auto& seg : idx["segments"])
        if (seg.at("file") == std::string(segname) + ".bin") known = true;
    if (!known) {
        idx["segments"].push_back({{"file", std::string(segname) + ".bin"},
                                   {"start_ns", series.samples.front().ts_ns},
                                   {"last_ns", series.samples.back().ts_ns},
                                   {"count", series.samples.size()}});
        write_file_atomic(idxfile, idx.dump(2));
    }
    return std::string(source_name(series.source)) + "/" + sanitize(series.target) + "/" +
           segname;
}

SampleSeries SeriesStore::fetch(const std::string& series_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    fs::path p = fs::path(root_) / (series_id + ".bin");
    if (!fs::exists(p)) throw NotFound("no stored series '" + series_id + "'");
    return decode_segment(read_file(p));
}

SampleSeries SeriesStore::fetch_range(Source source, const std::string& target,
                                      const Window& window) const {
    if (!window.valid()) throw std::invalid_argument("window end must be after start");
    std::lock_guard<std::mutex> lock(mu_);
    fs::path dir = fs::path(root_) / source_name(source) / sanitize(target);
    fs::path idxfile = dir / "index.json";
    if (!fs::exists(idxfile))
        throw NotFound(std::string("no stream ") + source_name(source) + "/" + target);
    json idx = json::parse(read_file(idxfile), nullptr, false);
    if (idx.is_discarded()) throw StoreError("corrupt index " + idxfile.string());

    SampleSeries merged;
    bool first = true;
    std::map<int64_t, size_t> by_ts;  // ts -> index into merged.samples
    for (const auto& seg : idx["segments"]) {
        int64_t seg_start = seg.at("start_ns").get<int64_t>();
        int64_t seg_last = seg.at("last_ns").get<int64_t>();
        if (seg_last < window.start_ns || seg_start >= window.end_ns) continue;
        SampleSeries s = decode_segment(read_file(dir / seg.at("file").get<std::string>()));
        if (first) {
            merged.source = s.source;
            merged.target = s.target;
            merged.nominal_interval_ns = s.nominal_interval_ns;
            merged.accuracy_fraction = s.accuracy_fraction;
            first = false;
        }
        bool columns = !s.energy_wh.empty();
        for (size_t i = 0; i < s.samples.size(); ++i) {
            int64_t ts = s.samples[i].ts_ns;
            if (!window.contains(ts) || by_ts.count(ts)) continue;
            by_ts[ts] = merged.samples.size();
            merged.samples.push_back(s.samples[i]);
            if (columns) merged.energy_wh.push_back(s.energy_wh[i]);
            if (!s.voltage_v.empty()) merged.voltage_v.push_back(s.voltage_v[i]);
            if (!s.current_a.empty()) merged.current_a.push_back(s.current_a[i]);
        }
    }
    // Re-sort by timestamp; by_ts gives the order, columns follow it.
    SampleSeries out = merged;
    out.samples.clear();
    out.energy_wh.clear();
    out.voltage_v.clear();
    out.current_a.clear();
    for (const auto& [ts, i] : by_ts) {
        out.samples.push_back(merged.samples[i]);
        if (merged.energy_wh.size() == merged.samples.size())
            out.energy_wh.push_back(merged.energy_wh[i]);
        if (merged.voltage_v.size() == merged.samples.size())
            out.voltage_v.push_back(merged.voltage_v[i]);
        if (merged.current_a.size() == merged.samples.size())
            out.current_a.push_back(merged.current_a[i]);
    }
    refresh_gap_flag(out);
    return out;
}

std::string SeriesStore::to_csv(const std::string& series_id) const {
    SampleSeries s = fetch(series_id);
    bool energy = !s.energy_wh.empty();
    std::string out = energy ? "ts_ns,power_w,energy_wh\n" : "ts_ns,power_w\n";
    char line[128];
    for (size_t i = 0; i < s.samples.size(); ++i) {
        if (energy)
            std::snprintf(line, sizeof(line), "%lld,%.10g,%.10g\n",
                          static_cast<long long>(s.samples[i].ts_ns), s.samples[i].power_w,
                          s.energy_wh[i]);
        else
            std::snprintf(line, sizeof(line), "%lld,%.10g\n",
                          static_cast<long long>(s.samples[i].ts_ns), s.samples[i].power_w);
        out += line;
    }
    return out;
}

}  // namespace ranprof::ts
