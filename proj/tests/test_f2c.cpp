#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/f2c.hpp"
#include "core/rng.hpp"
#include "test_helpers.hpp"

using namespace fxc;
using fxc::test::rel_err;

TEST_CASE("freq_to_cap matches the frontend equation") {
    FrontendConfig fe; // L = 2.2 uH, C0 = 47 pF
    double c = freq_to_cap(13.7e6, fe);
    CHECK(rel_err(c, 1.434461542142615e-11) < 1e-9);
    CHECK(rel_err(fe.empty_resonance(), 15651640.433668284) < 1e-9);
}

TEST_CASE("freq<->cap roundtrip and monotonicity") {
    FrontendConfig fe;
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        double f = rng.uniform(1.0e7, 1.56e7);
        CHECK(rel_err(cap_to_freq(freq_to_cap(f, fe), fe), f) < 1e-9);
    }
    double prev = freq_to_cap(1.55e7, fe);
    for (double f = 1.54e7; f > 1.0e7; f -= 5e5) {
        double c = freq_to_cap(f, fe);
        CHECK(c > prev); // lower frequency, more capacitance
        prev = c;
    }
    double big = cap_to_freq(20e-12, fe), small = cap_to_freq(1e-12, fe);
    CHECK(big < small);
}

TEST_CASE("freq_to_cap rejects out-of-band and inconsistent input") {
    FrontendConfig fe;
    CHECK_THROWS_AS(freq_to_cap(0.9e7, fe), Error);
    CHECK_THROWS_AS(freq_to_cap(2.1e7, fe), Error);
    // inside the band, above the empty resonance
    try {
        freq_to_cap(1.9e7, fe);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::negative_capacitance);
    }
    CHECK(rel_err(cap_to_freq(0.0, fe), fe.empty_resonance()) < 1e-12);
}

TEST_CASE("segment_cap: unit point, 3-4-5 section, limits") {
    double a = 0.01, w = 0.02;
    double ew = kVacuumPermittivity * w;
    CHECK(rel_err(segment_cap(a, w, a / std::sqrt(2.0)), 1.7708e-13) < 1e-9);
    double c345 = segment_cap(a, w, 0.006);
    CHECK(rel_err(c345, 2.3610666666666665e-13) < 1e-9);
    // both published forms agree: eps*w*sqrt(a^2/dh^2-1) == eps*w*dl/dh
    CHECK(rel_err(c345, ew * 0.008 / 0.006) < 1e-12);
    CHECK(segment_cap(a, w, 0.9999 * a) < 2e-2 * ew);
    CHECK_THROWS_AS(segment_cap(a, w, a), Error);
    CHECK_THROWS_AS(segment_cap(a, w, -0.1 * a), Error);
}

TEST_CASE("segment_cap flat clamp") {
    double a = 0.01, w = 0.02;
    // default clamp floors dh at a/1000
    CHECK(rel_err(segment_cap(a, w, 0.0), segment_cap(a, w, a * 1e-3, kVacuumPermittivity, 0.0)) <
          1e-12);
    try {
        segment_cap(a, w, 0.0, kVacuumPermittivity, 0.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::singular);
    }
}

TEST_CASE("cap_to_height inverts segment_cap") {
    double a = 0.01, w = 0.02;
    double ew = kVacuumPermittivity * w;
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        double dh = a * rng.uniform(0.01, 0.999);
        double c = segment_cap(a, w, dh, kVacuumPermittivity, 0.0);
        CHECK(rel_err(cap_to_height(c, a, w), dh) < 1e-12);
    }
    CHECK(rel_err(cap_to_height(0.0, a, w), a) < 1e-15);
    CHECK(rel_err(cap_to_height(ew, a, w), a / std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("segment_volume degenerate ends and calculus maximum") {
    double a = 0.01, w = 0.02;
    CHECK(segment_volume(a, w, 0.0) == 0.0);
    CHECK(segment_volume(a, w, a) == 0.0);
    double vmax = segment_volume(a, w, a / std::sqrt(2.0));
    CHECK(rel_err(vmax, 5e-7) < 1e-12);
    for (double dh = 0.05 * a; dh < a; dh += 0.05 * a)
        CHECK(segment_volume(a, w, dh) <= vmax + 1e-18);
}

TEST_CASE("volume_from_capacitance reproduces the ideal composition") {
    double a = 0.01, w = 0.02;
    auto k = IdealCurveConstants::from_geometry(a, w);
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        double dh = a * rng.uniform(0.001, 0.999);
        double dc = segment_cap(a, w, dh, kVacuumPermittivity, 0.0);
        // two routes: the k-constant curve vs volume at the inverted height
        double via_curve = volume_from_capacitance(dc, k);
        double via_height = segment_volume(a, w, cap_to_height(dc, a, w));
        CHECK(rel_err(via_curve, via_height) < 1e-9);
        CHECK(rel_err(via_curve, segment_volume(a, w, dh)) < 1e-9);
    }
    // fully flat limit: growing dC drives the volume toward zero
    CHECK(volume_from_capacitance(1e-6, k) < 1e-6 * k.k1 * k.k1);
    CHECK(volume_from_capacitance(1e-6, k) < volume_from_capacitance(1e-9, k));
    CHECK(volume_from_capacitance(1e-9, k) < volume_from_capacitance(1e-11, k));
    CHECK_THROWS_AS(IdealCurveConstants::from_geometry(a, w, kVacuumPermittivity, -1.0), Error);
}

TEST_CASE("curve sweep is single-peaked over the fold range") {
    double a = 0.01, w = 0.02;
    auto k = IdealCurveConstants::from_geometry(a, w);
    FrontendConfig fe;
    auto rows = sweep_curve(a, w, k, fe, 400);
    int sign_changes = 0;
    for (std::size_t i = 2; i < rows.size(); ++i) {
        double d_prev = rows[i - 1].dV - rows[i - 2].dV;
        double d_cur = rows[i].dV - rows[i - 1].dV;
        if (d_prev > 0 && d_cur < 0) ++sign_changes;
    }
    CHECK(sign_changes == 1);
    for (const auto& r : rows) CHECK(rel_err(r.dV, volume_from_capacitance(r.dC, k)) < 1e-9);
}

TEST_CASE("channel capacitance: flat state is the range maximum") {
    auto p = FoldPattern::preset(PatternKind::accordion_r);
    ChannelModel model;
    auto flat_caps = all_channel_capacitances(p, FoldState::flat(p), model);
    for (double d = 0.1; d <= 0.95; d += 0.05) {
        auto s = FoldState::from_extents(p, d * p.deploy_max, d * p.deploy_max);
        auto caps = all_channel_capacitances(p, s, model);
        for (std::size_t c = 0; c < caps.size(); ++c) CHECK(caps[c] <= flat_caps[c] + 1e-18);
    }
}

TEST_CASE("channel capacitance grows monotonically while unfolding") {
    for (auto kind : {PatternKind::accordion_r, PatternKind::chevron_r, PatternKind::vfold,
                      PatternKind::sunray}) {
        auto p = FoldPattern::preset(kind);
        ChannelModel model;
        std::vector<double> prev;
        for (int step = 0; step <= 40; ++step) {
            double e = p.deploy_min + (p.deploy_max - p.deploy_min) * step / 40.0;
            auto s = FoldState::from_extents(p, e, e);
            auto caps = all_channel_capacitances(p, s, model);
            if (!prev.empty())
                for (std::size_t c = 0; c < caps.size(); ++c) CHECK(caps[c] >= prev[c] - 1e-18);
            prev = caps;
        }
    }
}

TEST_CASE("parallel strips respond less than perpendicular strips") {
    auto pr = FoldPattern::preset(PatternKind::accordion_r);
    auto pp = FoldPattern::preset(PatternKind::accordion_p);
    ChannelModel model;
    auto range_of = [&](const FoldPattern& p, const ChannelLayout& layout) {
        double lo = 1e300, hi = -1e300;
        for (int step = 0; step <= 30; ++step) {
            double e = p.deploy_min + (p.deploy_max - p.deploy_min) * step / 30.0;
            auto s = FoldState::from_extents(p, e, e);
            double c = channel_capacitance(p, s, layout, model);
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
        return hi - lo;
    };
    double perp = range_of(pr, pr.channels[0]);
    double par = range_of(pp, pp.channels[0]);
    CHECK(par < perp);
}

TEST_CASE("overlapping strips short-circuit") {
    auto p = FoldPattern::preset(PatternKind::accordion_r);
    p.channels[1].path = p.channels[0].path; // same line
    try {
        all_channel_capacitances(p, FoldState::flat(p), ChannelModel{});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::short_circuit);
    }
}
