#include "core/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fxc {

SensorFrame SessionRecording::frame(std::size_t i) const {
    SensorFrame f;
    f.ts_ms = ts[i];
    f.values.assign(data.begin() + i * channels, data.begin() + (i + 1) * channels);
    return f;
}

void SessionRecording::push(std::int64_t ts_ms, const std::vector<double>& values) {
    if (channels == 0) channels = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != channels)
        fail(errc::channel_count_mismatch, "frame has " + std::to_string(values.size()) +
                                               " channels, recording has " +
                                               std::to_string(channels));
    if (!ts.empty() && ts_ms <= ts.back())
        fail(errc::misaligned, "timestamps must be strictly increasing");
    ts.push_back(ts_ms);
    data.insert(data.end(), values.begin(), values.end());
}

SessionRecording normalize(const SessionRecording& rec, NormalizationStats* stats_out) {
    if (rec.frames() < 2) fail(errc::empty_recording, "recording needs at least 2 frames");
    SessionRecording out = rec;
    NormalizationStats stats;
    stats.mean.resize(rec.channels);
    stats.shifted_min.resize(rec.channels);
    stats.shifted_max.resize(rec.channels);
    std::size_t n = rec.frames();
    for (int c = 0; c < rec.channels; ++c) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += rec.at(i, c);
        double mean = sum / static_cast<double>(n);
        double lo = 1e300, hi = -1e300;
        for (std::size_t i = 0; i < n; ++i) {
            double v = rec.at(i, c) - mean;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        stats.mean[c] = mean;
        stats.shifted_min[c] = lo;
        stats.shifted_max[c] = hi;
        double span = hi - lo;
        for (std::size_t i = 0; i < n; ++i) {
            double v = rec.at(i, c) - mean;
            out.data[i * rec.channels + c] = span > 0.0 ? (v - lo) / span : 0.5;
        }
    }
    if (stats_out) *stats_out = stats;
    return out;
}

WindowDataset make_windows(const SessionRecording& rec, const PrimitiveSeries& targets) {
    std::size_t n = rec.frames();
    if (n < static_cast<std::size_t>(kWindowLen))
        fail(errc::too_short, "recording has " + std::to_string(n) + " frames; need >= " +
                                  std::to_string(kWindowLen));
    if (targets.ts.size() != n)
        fail(errc::misaligned, "targets and recording differ in length");
    for (std::size_t i = 0; i < n; ++i) {
        if (targets.ts[i] != rec.ts[i])
            fail(errc::misaligned, "timestamp mismatch at frame " + std::to_string(i));
        if (i > 0 && rec.ts[i] <= rec.ts[i - 1])
            fail(errc::misaligned, "timestamps not strictly increasing at frame " +
                                       std::to_string(i));
    }
    WindowDataset ds;
    ds.channels = rec.channels;
    ds.count = n - (kWindowLen - 1);
    ds.inputs.resize(ds.count * kWindowLen * rec.channels);
    ds.targets.resize(ds.count * 3);
    ds.source_ts.resize(ds.count);
    for (std::size_t j = 0; j < ds.count; ++j) {
        std::copy(rec.data.begin() + j * rec.channels,
                  rec.data.begin() + (j + kWindowLen) * rec.channels,
                  ds.inputs.begin() + j * kWindowLen * rec.channels);
        const auto& t = targets.values[j + kTargetIndex];
        std::copy(t.begin(), t.end(), ds.targets.begin() + j * 3);
        ds.source_ts[j] = rec.ts[j + kTargetIndex];
    }
    return ds;
}

void WindowDataset::append(const WindowDataset& other) {
    if (count == 0) {
        *this = other;
        return;
    }
    if (other.channels != channels || other.window_len != window_len ||
        other.target_dim != target_dim)
        fail(errc::shape_mismatch, "cannot append datasets of different shapes");
    inputs.insert(inputs.end(), other.inputs.begin(), other.inputs.end());
    targets.insert(targets.end(), other.targets.begin(), other.targets.end());
    source_ts.insert(source_ts.end(), other.source_ts.begin(), other.source_ts.end());
    count += other.count;
}

WindowDataset WindowDataset::slice(std::size_t begin, std::size_t end) const {
    WindowDataset out;
    out.window_len = window_len;
    out.channels = channels;
    out.target_dim = target_dim;
    out.count = end - begin;
    out.inputs.assign(inputs.begin() + begin * window_len * channels,
                      inputs.begin() + end * window_len * channels);
    out.targets.assign(targets.begin() + begin * target_dim, targets.begin() + end * target_dim);
    out.source_ts.assign(source_ts.begin() + begin, source_ts.begin() + end);
    return out;
}

SessionSplit split_sessions(std::size_t num_sessions) {
    if (num_sessions < 2)
        fail(errc::insufficient_sessions, "need >= 2 sessions to split train/test");
    SessionSplit s;
    for (std::size_t i = 0; i + 1 < num_sessions; ++i) s.train.push_back(i);
    s.test = num_sessions - 1;
    return s;
}

namespace {

template <typename T>
void write_raw(const std::string& path, const std::vector<T>& v) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(errc::io, "cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(T));
        if (!out) fail(errc::io, "write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(errc::io, "rename failed: " + path);
}

template <typename T>
std::vector<T> read_raw(const std::string& path, std::size_t expect_count) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) fail(errc::io, "cannot open " + path);
    std::size_t bytes = static_cast<std::size_t>(in.tellg());
    if (bytes != expect_count * sizeof(T))
        fail(errc::corrupt_file, path + ": expected " + std::to_string(expect_count * sizeof(T)) +
                                     " bytes, found " + std::to_string(bytes));
    std::vector<T> v(expect_count);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(v.data()), bytes);
    if (!in) fail(errc::io, "read failed: " + path);
    return v;
}

} // namespace

void save_windows(const WindowDataset& ds, const std::string& dir,
                  const std::vector<std::string>& channel_names,
                  const std::vector<std::string>& session_ids,
                  const std::vector<NormalizationStats>& norm_stats,
                  const std::array<std::array<double, 2>, 3>& target_ranges) {
    std::filesystem::create_directories(dir);
    write_raw(dir + "/windows.f64", ds.inputs);
    write_raw(dir + "/targets.f64", ds.targets);
    write_raw(dir + "/ts.i64", ds.source_ts);
    nlohmann::json j;
    j["format"] = "fxc-windows-v1";
    j["count"] = ds.count;
    j["window_len"] = ds.window_len;
    j["channels"] = ds.channels;
    j["target_dim"] = ds.target_dim;
    j["inputs_file"] = "windows.f64";
    j["targets_file"] = "targets.f64";
    j["ts_file"] = "ts.i64";
    j["channel_names"] = channel_names;
    j["session_ids"] = session_ids;
    j["target_ranges"] = target_ranges;
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& s : norm_stats) {
        stats.push_back({{"mean", s.mean},
                         {"shifted_min", s.shifted_min},
                         {"shifted_max", s.shifted_max}});
    }
    j["normalization"] = stats;
    csv::atomic_write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

WindowDataset load_windows(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in) fail(errc::io, "cannot open " + dir + "/manifest.json");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        fail(errc::parse, dir + "/manifest.json: " + e.what());
    }
    if (j.value("format", "") != "fxc-windows-v1")
        fail(errc::version_mismatch, dir + ": unknown window manifest format");
    WindowDataset ds;
    ds.count = j.at("count").get<std::size_t>();
    ds.window_len = j.at("window_len").get<int>();
    ds.channels = j.at("channels").get<int>();
    ds.target_dim = j.at("target_dim").get<int>();
    ds.inputs = read_raw<double>(dir + "/" + j.at("inputs_file").get<std::string>(),
                                 ds.count * ds.window_len * ds.channels);
    ds.targets = read_raw<double>(dir + "/" + j.at("targets_file").get<std::string>(),
                                  ds.count * ds.target_dim);
    ds.source_ts = read_raw<std::int64_t>(dir + "/" + j.at("ts_file").get<std::string>(), ds.count);
    return ds;
}

} // namespace fxc
