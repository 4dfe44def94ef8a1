// ============================================================================
// core/dataio.hpp - Recorded-data ingestion and timestamp alignment
// ============================================================================
#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "core/geometry.hpp"
#include "core/pipeline.hpp"

namespace fxc {

// capacitance CSV schema: header `ts_ms,ch0,...,chN-1`, strictly increasing
// integer timestamps
SessionRecording parse_capacitance_csv(const std::string& path);
void write_capacitance_csv(const std::string& path, const SessionRecording& rec);

// primitives CSV schema: header `ts_ms,p1,p2,p3`, values in cm
PrimitiveSeries parse_primitives_csv(const std::string& path);
void write_primitives_csv(const std::string& path, const PrimitiveSeries& series);

struct MarkerSample {
    std::int64_t ts_ms = 0;
    int marker_id = 0;
    double x_px = 0.0, y_px = 0.0;
};

// marker CSV schema: header `ts_ms,marker_id,x_px,y_px`; per-marker timestamps
// must be strictly increasing
std::vector<MarkerSample> parse_marker_csv(const std::string& path);

// Each primitive is the pixel distance between two markers; the table maps
// primitive endpoints to marker ids. Config section [markers]:
//   p1 = <id_a> <id_b>, p2 = ..., p3 = ..., scale_cm_per_px = ...
// default ids: 0 = top-left, 1 = top-right, 2 = base-left, 3 = base-right;
// the diagonal runs base-left to top-right
struct MarkerCorrespondence {
    std::array<std::array<int, 2>, 3> endpoints{{{0, 1}, {2, 3}, {2, 1}}};
    double scale_cm_per_px = 0.1;

    static MarkerCorrespondence from_config(const Config& cfg);
};

struct MarkerExtraction {
    PrimitiveSeries series;
    std::size_t dropped_frames = 0; // frames missing a required marker
};

MarkerExtraction markers_to_primitives(const std::vector<MarkerSample>& samples,
                                       const MarkerCorrespondence& table);

struct AlignedDataset {
    SessionRecording frames;
    PrimitiveSeries targets;  // resampled onto the capacitive clock
    double offset_ms = 0.0;   // added to target timestamps during alignment
    double peak_correlation = 0.0;
    bool weak = false;        // peak below the 0.3 confidence threshold
};

// Coarse alignment by unix timestamps, then offset refinement by maximizing
// the normalized cross-correlation between the first capacitive channel's
// derivative and the first primitive's derivative; targets are then
// nearest-neighbor resampled onto the capacitive clock. A manual offset (ms)
// skips the search.
AlignedDataset align(const SessionRecording& frames, const PrimitiveSeries& targets,
                     double search_window_s, const double* manual_offset_ms = nullptr);

} // namespace fxc
