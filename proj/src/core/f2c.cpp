#include "core/f2c.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace fxc {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

FrontendConfig FrontendConfig::from_config(const Config& cfg) {
    FrontendConfig fe;
    fe.inductance_L = cfg.get_number("frontend", "inductance_L", fe.inductance_L);
    fe.fixed_cap_C0 = cfg.get_number("frontend", "fixed_cap_C0", fe.fixed_cap_C0);
    fe.freq_min = cfg.get_number("frontend", "freq_min", fe.freq_min);
    fe.freq_max = cfg.get_number("frontend", "freq_max", fe.freq_max);
    if (fe.inductance_L <= 0.0 || fe.fixed_cap_C0 <= 0.0 || fe.freq_min <= 0.0 ||
        fe.freq_max <= fe.freq_min)
        fail(errc::config, "bad frontend configuration");
    return fe;
}

double FrontendConfig::empty_resonance() const {
    return 1.0 / (kTwoPi * std::sqrt(inductance_L * fixed_cap_C0));
}

double freq_to_cap(double freq, const FrontendConfig& cfg) {
    if (freq < cfg.freq_min || freq > cfg.freq_max)
        fail(errc::out_of_range, "frequency " + std::to_string(freq) + " Hz outside band [" +
                                     std::to_string(cfg.freq_min) + ", " +
                                     std::to_string(cfg.freq_max) + "]");
    double w = kTwoPi * freq;
    double c = 1.0 / (cfg.inductance_L * w * w) - cfg.fixed_cap_C0;
    if (c < 0.0)
        fail(errc::negative_capacitance,
             "frequency above empty resonance: inconsistent frontend configuration");
    return c;
}

double cap_to_freq(double cap, const FrontendConfig& cfg) {
    if (cap < 0.0) fail(errc::config, "capacitance must be non-negative");
    return 1.0 / (kTwoPi * std::sqrt(cfg.inductance_L * (cfg.fixed_cap_C0 + cap)));
}

double segment_cap(double a, double w, double dh, double eps, double clamp_frac) {
    if (a <= 0.0 || w <= 0.0 || eps <= 0.0) fail(errc::config, "segment_cap: bad geometry");
    if (dh < 0.0 || dh >= a)
        fail(errc::invalid_state, "segment_cap: dh must lie in [0, a)");
    double floor = a * clamp_frac;
    if (dh <= 0.0 && floor <= 0.0)
        fail(errc::singular, "segment_cap: dh = 0 is singular with clamping disabled");
    if (dh < floor) dh = floor;
    double q = a / dh;
    return eps * w * std::sqrt(q * q - 1.0);
}

double cap_to_height(double dC, double a, double w, double eps) {
    if (dC < 0.0) fail(errc::config, "cap_to_height: dC must be non-negative");
    double ew = eps * w;
    return ew * a / std::sqrt(ew * ew + dC * dC);
}

double segment_volume(double a, double w, double dh) {
    if (dh < 0.0 || dh > a) fail(errc::invalid_state, "segment_volume: dh must lie in [0, a]");
    return 0.5 * w * dh * std::sqrt(std::max(0.0, a * a - dh * dh));
}

IdealCurveConstants IdealCurveConstants::from_geometry(double a, double w, double eps, double r1,
                                                       double r2, double r3) {
    IdealCurveConstants k;
    k.r1 = r1;
    k.r2 = r2;
    k.r3 = r3;
    k.k1 = a * std::sqrt(w / 2.0) * r1;
    k.k2 = (eps * w) * (eps * w) * r2;
    k.k3 = a * a * r3;
    k.validate();
    return k;
}

IdealCurveConstants IdealCurveConstants::from_config(const Config& cfg) {
    double a = cfg.get_number("curve", "segment_len_a", 0.01);
    double w = cfg.get_number("curve", "width", 0.02);
    double eps = cfg.get_number("curve", "epsilon", kVacuumPermittivity);
    double r1 = cfg.get_number("curve", "r1", 1.0);
    double r2 = cfg.get_number("curve", "r2", 1.0);
    double r3 = cfg.get_number("curve", "r3", 1.0);
    return from_geometry(a, w, eps, r1, r2, r3);
}

void IdealCurveConstants::validate() const {
    if (!(k1 > 0.0) || !(k2 > 0.0) || !(k3 > 0.0) || !(r1 > 0.0) || !(r2 > 0.0) || !(r3 > 0.0))
        fail(errc::config, "curve constants must all be positive");
}

double volume_from_capacitance(double dC, const IdealCurveConstants& k) {
    if (dC < 0.0) fail(errc::config, "volume_from_capacitance: dC must be non-negative");
    k.validate();
    double u = k.k2 / (k.k2 + dC * dC);
    double radicand = u - u * u;
    if (radicand < 0.0)
        fail(errc::negative_radicand, "volume_from_capacitance: negative radicand");
    return k.k1 * k.k1 * std::sqrt(radicand);
}

ChannelModel ChannelModel::from_config(const Config& cfg) {
    ChannelModel m;
    m.eps = cfg.get_number("channel_model", "epsilon", m.eps);
    m.parasitic_cap = cfg.get_number("channel_model", "parasitic_cap", m.parasitic_cap);
    m.clamp_frac = cfg.get_number("channel_model", "clamp_frac", m.clamp_frac);
    m.height_floor = cfg.get_number("channel_model", "height_floor", m.height_floor);
    m.sample_step = cfg.get_number("channel_model", "sample_step", m.sample_step);
    return m;
}

static double channel_cap_on_field(const FoldPattern& pattern, const HeightField& field,
                                   const ChannelLayout& layout, const ChannelModel& model) {
    if (layout.path.size() < 2) fail(errc::config, "channel path needs >= 2 points");
    double step = model.sample_step > 0.0 ? model.sample_step : pattern.segment_len_a;
    double floor = std::max(model.height_floor, pattern.segment_len_a * model.clamp_frac);
    double cap = model.parasitic_cap;
    for (std::size_t seg = 0; seg + 1 < layout.path.size(); ++seg) {
        Vec2 p0 = layout.path[seg], p1 = layout.path[seg + 1];
        double du = p1.u - p0.u, dv = p1.v - p0.v;
        double len = std::hypot(du, dv);
        if (len <= 0.0) continue;
        int nsamples = std::max(1, static_cast<int>(std::ceil(len / step)));
        double ds = len / nsamples;
        for (int i = 0; i < nsamples; ++i) {
            double t = (i + 0.5) / nsamples;
            double u = p0.u + du * t, v = p0.v + dv * t;
            double h = std::max(field.height(u, v), floor);
            double proj = field.projected(u, v, du / len, dv / len) * ds;
            cap += model.eps * layout.strip_width * proj / h;
        }
    }
    return cap;
}

double channel_capacitance(const FoldPattern& pattern, const FoldState& state,
                           const ChannelLayout& layout, const ChannelModel& model) {
    validate_state(pattern, state);
    HeightField field(pattern, state);
    return channel_cap_on_field(pattern, field, layout, model);
}

std::vector<double> all_channel_capacitances(const FoldPattern& pattern, const FoldState& state,
                                             const ChannelModel& model) {
    pattern.validate(); // throws short_circuit when strips intersect
    validate_state(pattern, state);
    HeightField field(pattern, state);
    std::vector<double> out;
    out.reserve(pattern.channels.size());
    for (const auto& layout : pattern.channels)
        out.push_back(channel_cap_on_field(pattern, field, layout, model));
    return out;
}

std::vector<SweepRow> sweep_curve(double a, double w, const IdealCurveConstants& k,
                                  const FrontendConfig& fe, int points) {
    if (points < 2) fail(errc::config, "sweep needs >= 2 points");
    std::vector<SweepRow> rows;
    rows.reserve(points);
    for (int i = 0; i < points; ++i) {
        SweepRow r;
        // open interval: both ends of [0, a] are singular or degenerate
        r.dh = a * (i + 1.0) / (points + 1.0);
        r.dC = segment_cap(a, w, r.dh, kVacuumPermittivity, 0.0);
        r.dV = segment_volume(a, w, r.dh);
        r.freq = cap_to_freq(r.dC, fe);
        rows.push_back(r);
    }
    return rows;
}

} // namespace fxc
