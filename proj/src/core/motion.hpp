// ============================================================================
// core/motion.hpp - Ground-truth trajectory generation and material effects
// ============================================================================
#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/f2c.hpp"
#include "core/geometry.hpp"
#include "core/pipeline.hpp"

namespace fxc {

enum class MotionKind {
    symmetric_open,
    symmetric_close,
    asymmetric_left,
    asymmetric_right,
    diagonal_skew,
    hold,
};

MotionKind motion_kind_from_string(const std::string& name);
std::string motion_kind_name(MotionKind kind);

struct MotionElement {
    MotionKind kind = MotionKind::hold;
    double duration_s = 2.0;
    double amplitude = 0.5; // fraction of the deployable range
};

struct MaterialProfile {
    std::string name = "cloth";
    double noise_sigma = 200.0;     // Hz
    double drift_rate = 5.0;        // Hz/s random-walk scale
    double hysteresis_gamma = 0.02; // first-order state-lag blend

    static MaterialProfile cloth();
    static MaterialProfile paper();
    static MaterialProfile named(const std::string& name);
    static MaterialProfile from_config(const Config& cfg, const std::string& name);
};

struct Trajectory {
    double sample_rate = 30.0;
    std::vector<FoldState> states;
};

// Cosine-eased interpolation between element targets on the deployment
// controls; the seed picks the starting configuration. Elements with
// amplitude outside [0, 1] raise range_violation.
Trajectory generate_trajectory(const FoldPattern& pattern,
                               const std::vector<MotionElement>& elements, std::uint64_t seed,
                               double sample_rate = 30.0);

// arbitrary element mix covering roughly total_s seconds
std::vector<MotionElement> random_elements(std::uint64_t seed, double total_s);
std::vector<MotionElement> elements_from_config(const Config& cfg);

// Gaussian noise + integrated random-walk drift + first-order lag on the
// clean signal; one decorrelated stream per channel, deterministic in seed.
std::vector<double> apply_material(const std::vector<double>& freq_stream,
                                   const MaterialProfile& profile, std::uint64_t seed);
SessionRecording apply_material(const SessionRecording& rec, const MaterialProfile& profile,
                                std::uint64_t seed);

struct SynthesizedSession {
    SessionRecording recording;        // corrupted frequency stream
    PrimitiveSeries truth;             // ground-truth primitives per frame
    std::vector<FoldState> states;     // the underlying trajectory
};

// trajectory -> channel capacitances -> frontend frequencies -> material
SynthesizedSession synthesize_session(const FoldPattern& pattern, const Trajectory& traj,
                                      const MaterialProfile& material, const FrontendConfig& fe,
                                      const ChannelModel& model, std::uint64_t seed,
                                      std::int64_t base_ts_ms, const std::string& session_id);

} // namespace fxc
