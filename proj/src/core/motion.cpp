#include "core/motion.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fxc {

namespace {
constexpr double kPi = 3.14159265358979323846;

// deployment controls: one fraction per rail (per arm for vfold)
struct Control {
    double a = 0.5, b = 0.5;
};

FoldState state_from_control(const FoldPattern& p, const Control& c) {
    double lo = p.deploy_min, hi = p.deploy_max;
    double ea = lo + (hi - lo) * c.a;
    double eb = lo + (hi - lo) * c.b;
    if (p.kind == PatternKind::sunray) eb = ea; // radial fold: one degree of freedom
    FoldState s = FoldState::from_extents(p, ea, eb);
    if (p.kind == PatternKind::vfold) {
        // arms skew toward the hinge normal as they deploy
        const double a_lo = 0.2, a_hi = 1.1;
        s.arm_angles[0] = a_hi - c.a * (a_hi - a_lo);
        s.arm_angles[1] = a_hi - c.b * (a_hi - a_lo);
    }
    return s;
}

Control element_target(MotionKind kind, double amp, const Control& c) {
    Control t = c;
    auto toward_far = [](double x, double amp) {
        return x <= 0.5 ? std::min(1.0, x + amp) : std::max(0.0, x - amp);
    };
    switch (kind) {
        case MotionKind::symmetric_open:
            t.a = std::min(1.0, c.a + amp);
            t.b = std::min(1.0, c.b + amp);
            break;
        case MotionKind::symmetric_close:
            t.a = std::max(0.0, c.a - amp);
            t.b = std::max(0.0, c.b - amp);
            break;
        case MotionKind::asymmetric_left: t.a = toward_far(c.a, amp); break;
        case MotionKind::asymmetric_right: t.b = toward_far(c.b, amp); break;
        case MotionKind::diagonal_skew:
            t.a = std::min(1.0, c.a + amp);
            t.b = std::max(0.0, c.b - amp);
            break;
        case MotionKind::hold: break;
    }
    return t;
}

} // namespace

MotionKind motion_kind_from_string(const std::string& name) {
    if (name == "symmetric-open") return MotionKind::symmetric_open;
    if (name == "symmetric-close") return MotionKind::symmetric_close;
    if (name == "asymmetric-left") return MotionKind::asymmetric_left;
    if (name == "asymmetric-right") return MotionKind::asymmetric_right;
    if (name == "diagonal-skew") return MotionKind::diagonal_skew;
    if (name == "hold") return MotionKind::hold;
    fail(errc::config, "unknown motion element '" + name + "'");
}

std::string motion_kind_name(MotionKind kind) {
    switch (kind) {
        case MotionKind::symmetric_open: return "symmetric-open";
        case MotionKind::symmetric_close: return "symmetric-close";
        case MotionKind::asymmetric_left: return "asymmetric-left";
        case MotionKind::asymmetric_right: return "asymmetric-right";
        case MotionKind::diagonal_skew: return "diagonal-skew";
        case MotionKind::hold: return "hold";
    }
    return "?";
}

MaterialProfile MaterialProfile::cloth() { return {"cloth", 200.0, 5.0, 0.02}; }
MaterialProfile MaterialProfile::paper() { return {"paper", 600.0, 15.0, 0.15}; }

MaterialProfile MaterialProfile::named(const std::string& name) {
    if (name == "cloth") return cloth();
    if (name == "paper") return paper();
    fail(errc::config, "unknown material '" + name + "' (valid: cloth, paper)");
}

MaterialProfile MaterialProfile::from_config(const Config& cfg, const std::string& name) {
    MaterialProfile m = named(name);
    std::string sec = "material." + name;
    m.noise_sigma = cfg.get_number(sec, "noise_sigma", m.noise_sigma);
    m.drift_rate = cfg.get_number(sec, "drift_rate", m.drift_rate);
    m.hysteresis_gamma = cfg.get_number(sec, "hysteresis_gamma", m.hysteresis_gamma);
    if (m.noise_sigma < 0.0 || m.drift_rate < 0.0 || m.hysteresis_gamma < 0.0 ||
        m.hysteresis_gamma >= 1.0)
        fail(errc::config, "bad material profile");
    return m;
}

Trajectory generate_trajectory(const FoldPattern& pattern,
                               const std::vector<MotionElement>& elements, std::uint64_t seed,
                               double sample_rate) {
    pattern.validate();
    if (elements.empty()) fail(errc::config, "element list is empty");
    for (const auto& e : elements) {
        if (e.duration_s <= 0.0) fail(errc::config, "element duration must be positive");
        if (e.amplitude < 0.0 || e.amplitude > 1.0)
            fail(errc::range_violation, "element amplitude exceeds the pattern's deployable range");
    }
    Rng rng(seed);
    Control c{0.25 + 0.5 * rng.uniform(), 0.25 + 0.5 * rng.uniform()};
    if (pattern.kind == PatternKind::sunray) c.b = c.a;

    Trajectory traj;
    traj.sample_rate = sample_rate;
    for (const auto& e : elements) {
        Control t = element_target(e.kind, e.amplitude, c);
        int frames = std::max(1, static_cast<int>(std::lround(e.duration_s * sample_rate)));
        for (int i = 0; i < frames; ++i) {
            double tau = (i + 1.0) / frames;
            double w = 0.5 * (1.0 - std::cos(kPi * tau)); // eased, zero end velocities
            Control cur{c.a + (t.a - c.a) * w, c.b + (t.b - c.b) * w};
            traj.states.push_back(state_from_control(pattern, cur));
        }
        c = t;
    }
    return traj;
}

std::vector<MotionElement> random_elements(std::uint64_t seed, double total_s) {
    Rng rng(seed ^ 0xA5F152u);
    std::vector<MotionElement> out;
    double t = 0.0;
    while (t < total_s) {
        MotionElement e;
        double pick = rng.uniform();
        if (pick < 0.30) e.kind = MotionKind::symmetric_open;
        else if (pick < 0.60) e.kind = MotionKind::symmetric_close;
        else if (pick < 0.75) e.kind = MotionKind::asymmetric_left;
        else if (pick < 0.90) e.kind = MotionKind::asymmetric_right;
        else if (pick < 0.95) e.kind = MotionKind::diagonal_skew;
        else e.kind = MotionKind::hold;
        e.duration_s = rng.uniform(2.0, 6.0);
        e.amplitude = rng.uniform(0.15, 0.9);
        if (t + e.duration_s > total_s) e.duration_s = total_s - t;
        if (e.duration_s > 1.0 / 30.0) out.push_back(e);
        t += e.duration_s;
    }
    if (out.empty()) out.push_back({MotionKind::hold, total_s, 0.0});
    return out;
}

std::vector<MotionElement> elements_from_config(const Config& cfg) {
    std::vector<MotionElement> out;
    for (const auto& sec : cfg.sections_with_prefix("element.")) {
        MotionElement e;
        e.kind = motion_kind_from_string(cfg.get_string(sec, "kind"));
        e.duration_s = cfg.get_number(sec, "duration_s", 2.0);
        e.amplitude = cfg.get_number(sec, "amplitude", 0.5);
        out.push_back(e);
    }
    if (out.empty()) fail(errc::config, "no [element.*] sections in motion script");
    return out;
}

std::vector<double> apply_material(const std::vector<double>& freq_stream,
                                   const MaterialProfile& profile, std::uint64_t seed) {
    if (freq_stream.empty()) fail(errc::empty_recording, "stream is empty");
    Rng rng(seed);
    const double dt = 1.0 / 30.0;
    double drift = 0.0;
    double lagged = freq_stream.front();
    std::vector<double> out(freq_stream.size());
    for (std::size_t i = 0; i < freq_stream.size(); ++i) {
        lagged = (1.0 - profile.hysteresis_gamma) * freq_stream[i] +
                 profile.hysteresis_gamma * lagged;
        if (profile.drift_rate > 0.0)
            drift += rng.gaussian() * profile.drift_rate * std::sqrt(dt);
        double noise = profile.noise_sigma > 0.0 ? rng.gaussian() * profile.noise_sigma : 0.0;
        out[i] = lagged + drift + noise;
    }
    return out;
}

SessionRecording apply_material(const SessionRecording& rec, const MaterialProfile& profile,
                                std::uint64_t seed) {
    SessionRecording out = rec;
    for (int c = 0; c < rec.channels; ++c) {
        std::vector<double> chan(rec.frames());
        for (std::size_t i = 0; i < rec.frames(); ++i) chan[i] = rec.at(i, c);
        std::uint64_t chan_seed = seed ^ (0x9E3779B97F4A7C15ull * (c + 1));
        chan = apply_material(chan, profile, chan_seed);
        for (std::size_t i = 0; i < rec.frames(); ++i) out.data[i * rec.channels + c] = chan[i];
    }
    return out;
}

SynthesizedSession synthesize_session(const FoldPattern& pattern, const Trajectory& traj,
                                      const MaterialProfile& material, const FrontendConfig& fe,
                                      const ChannelModel& model, std::uint64_t seed,
                                      std::int64_t base_ts_ms, const std::string& session_id) {
    pattern.validate();
    if (traj.states.empty()) fail(errc::config, "trajectory is empty");
    SynthesizedSession out;
    out.states = traj.states;
    out.recording.id = session_id;
    out.recording.channels = static_cast<int>(pattern.channels.size());
    std::size_t n = traj.states.size();
    out.recording.ts.resize(n);
    out.recording.data.resize(n * pattern.channels.size());
    out.truth.ts.resize(n);
    out.truth.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t t = base_ts_ms + std::llround(i * 1000.0 / traj.sample_rate);
        out.recording.ts[i] = t;
        out.truth.ts[i] = t;
        auto caps = all_channel_capacitances(pattern, traj.states[i], model);
        for (std::size_t c = 0; c < caps.size(); ++c)
            out.recording.data[i * caps.size() + c] = cap_to_freq(caps[c], fe);
        auto prim = extract_primitives(pattern, traj.states[i]);
        out.truth.values[i] = {prim.p1, prim.p2, prim.p3};
    }
    out.recording = apply_material(out.recording, material, seed);
    return out;
}

} // namespace fxc
