// ============================================================================
// core/pipeline.hpp - Frames, normalization, sliding windows, session split
// ============================================================================
#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace fxc {

struct SensorFrame {
    std::int64_t ts_ms = 0;
    std::vector<double> values; // per-channel raw frequency, Hz
};

// flat storage: data[frame * channels + ch]
struct SessionRecording {
    std::string id;
    int channels = 0;
    std::vector<std::int64_t> ts;
    std::vector<double> data;

    std::size_t frames() const { return ts.size(); }
    double at(std::size_t frame, int ch) const { return data[frame * channels + ch]; }
    SensorFrame frame(std::size_t i) const;
    void push(std::int64_t ts_ms, const std::vector<double>& values);
};

struct PrimitiveSeries {
    std::vector<std::int64_t> ts;
    std::vector<std::array<double, 3>> values; // cm
};

struct NormalizationStats {
    std::vector<double> mean;       // per channel
    std::vector<double> shifted_min; // min/max after mean subtraction
    std::vector<double> shifted_max;
};

// per channel: subtract the channel mean, then min-max scale to [0, 1];
// constant channels map to all-0.5
SessionRecording normalize(const SessionRecording& rec, NormalizationStats* stats_out = nullptr);

constexpr int kWindowLen = 30;
constexpr int kTargetIndex = 15; // middle frame of the 1 s window

struct WindowDataset {
    int window_len = kWindowLen;
    int channels = 0;
    int target_dim = 3;
    std::size_t count = 0;
    std::vector<double> inputs;       // [count, window_len, channels]
    std::vector<double> targets;      // [count, target_dim]
    std::vector<std::int64_t> source_ts;

    const double* window(std::size_t i) const { return inputs.data() + i * window_len * channels; }
    const double* target(std::size_t i) const { return targets.data() + i * target_dim; }
    void append(const WindowDataset& other);
    WindowDataset slice(std::size_t begin, std::size_t end) const;
};

// T frames yield T-29 windows; window j covers frames [j, j+29] and targets
// frame j+15. The recording and the target series must agree timestamp by
// timestamp.
WindowDataset make_windows(const SessionRecording& rec, const PrimitiveSeries& targets);

struct SessionSplit {
    std::vector<std::size_t> train; // indices into the session list
    std::size_t test = 0;
};

// deterministic: all but the last session train, the last tests
SessionSplit split_sessions(std::size_t num_sessions);

// flat binary tensors + JSON manifest
void save_windows(const WindowDataset& ds, const std::string& dir,
                  const std::vector<std::string>& channel_names,
                  const std::vector<std::string>& session_ids,
                  const std::vector<NormalizationStats>& norm_stats,
                  const std::array<std::array<double, 2>, 3>& target_ranges);
WindowDataset load_windows(const std::string& dir);

} // namespace fxc
