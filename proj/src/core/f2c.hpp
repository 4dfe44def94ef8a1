// ============================================================================
// core/f2c.hpp - Folding-to-capacitance physics
// ============================================================================
//
// The forward sensing model: an LC frontend converts capacitance to a
// resonance frequency; each small section of a conductive strip behaves as a
// parallel plate over the virtual ground plane, so a strip's capacitance
// follows the local geometry of the fold.
#pragma once
#include <vector>

#include "core/config.hpp"
#include "core/geometry.hpp"

namespace fxc {

constexpr double kVacuumPermittivity = 8.854e-12; // F/m

struct FrontendConfig {
    double inductance_L = 2.2e-6; // H
    double fixed_cap_C0 = 47e-12; // F
    double freq_min = 1.0e7;      // Hz, operational band of the converter
    double freq_max = 2.0e7;

    static FrontendConfig from_config(const Config& cfg);
    double empty_resonance() const; // frequency at zero sensor capacitance
};

// C = 1/(L (2 pi f)^2) - C0; throws out_of_range outside the band and
// negative_capacitance above the empty resonance
double freq_to_cap(double freq, const FrontendConfig& cfg);
// f = 1/(2 pi sqrt(L (C0 + C)))
double cap_to_freq(double cap, const FrontendConfig& cfg);

// dC = eps * w * sqrt(a^2/dh^2 - 1) for a section of length a at fold height
// dh. dh is clamped below at a*clamp_frac; pass clamp_frac = 0 to get the
// bare formula, which is singular at dh = 0.
double segment_cap(double a, double w, double dh, double eps = kVacuumPermittivity,
                   double clamp_frac = 1e-3);
// exact inverse of the unclamped segment_cap
double cap_to_height(double dC, double a, double w, double eps = kVacuumPermittivity);
// dV = (w/2) * dh * sqrt(a^2 - dh^2)
double segment_volume(double a, double w, double dh);

struct IdealCurveConstants {
    double k1 = 0.0; // a * sqrt(w/2) * r1
    double k2 = 0.0; // (eps*w)^2 * r2
    double k3 = 0.0; // a^2 * r3
    double r1 = 1.0, r2 = 1.0, r3 = 1.0;

    static IdealCurveConstants from_geometry(double a, double w, double eps = kVacuumPermittivity,
                                             double r1 = 1.0, double r2 = 1.0, double r3 = 1.0);
    static IdealCurveConstants from_config(const Config& cfg);
    void validate() const;
};

// Volume under one section as a function of its capacitance change, the
// composition f_v(f_c^-1(dC)) expressed through the composite constants:
//   u = k2 / (k2 + dC^2),  dV = k1^2 * sqrt(u - u^2)
// With r1 = r2 = r3 = 1 this reproduces the ideal composition exactly.
double volume_from_capacitance(double dC, const IdealCurveConstants& k);

// Per-sample plate model for a whole strip: walk the path at segment
// resolution, read the local height off the realized surface, and sum
// eps * w * (projected sample length) / height with the height floored at
// max(height_floor, a*clamp_frac). Parallel-sum plus a constant parasitic.
struct ChannelModel {
    double eps = kVacuumPermittivity;
    double parasitic_cap = 30e-12; // F per channel
    double clamp_frac = 1e-3;      // relative to segment_len_a
    double height_floor = 1.5e-3;  // m; effective material/stack thickness
    double sample_step = 0.0;      // m along the path; 0 = segment_len_a

    static ChannelModel from_config(const Config& cfg);
};

double channel_capacitance(const FoldPattern& pattern, const FoldState& state,
                           const ChannelLayout& layout, const ChannelModel& model);

// all channels of the pattern at once (checks strip separation once)
std::vector<double> all_channel_capacitances(const FoldPattern& pattern, const FoldState& state,
                                             const ChannelModel& model);

struct SweepRow {
    double dh = 0.0, dC = 0.0, dV = 0.0, freq = 0.0;
};

// dense sweep of the single-section curve over dh in (0, a); used by the CLI
// `sim` command and the saturation analysis
std::vector<SweepRow> sweep_curve(double a, double w, const IdealCurveConstants& k,
                                  const FrontendConfig& fe, int points);

} // namespace fxc
