#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "core/dataio.hpp"
#include "core/errors.hpp"
#include "core/motion.hpp"
#include "test_helpers.hpp"

using namespace fxc;

namespace {

std::string temp_file(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

} // namespace

TEST_CASE("capacitance csv: parse a small valid file") {
    auto path = temp_file("fxc_cap_ok.csv",
                          "ts_ms,ch0,ch1\n"
                          "1000,13700000.1,13800000.2\n"
                          "1033,13700010.3,13800020.4\n"
                          "1067,13700020.5,13800040.6\n");
    auto rec = parse_capacitance_csv(path);
    CHECK(rec.frames() == 3);
    CHECK(rec.channels == 2);
    CHECK(rec.at(1, 1) == doctest::Approx(13800020.4));
    std::filesystem::remove(path);
}

TEST_CASE("capacitance csv: duplicate timestamp names the line") {
    auto path = temp_file("fxc_cap_dup.csv",
                          "ts_ms,ch0\n"
                          "1000,1.0\n"
                          "1000,2.0\n");
    try {
        parse_capacitance_csv(path);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::parse);
        CHECK(std::string(e.what()).find(":3") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("capacitance csv: 8 channels recovered from the header") {
    std::string header = "ts_ms";
    for (int c = 0; c < 8; ++c) header += ",ch" + std::to_string(c);
    auto path = temp_file("fxc_cap8.csv", header + "\n100,1,2,3,4,5,6,7,8\n133,2,3,4,5,6,7,8,9\n");
    auto rec = parse_capacitance_csv(path);
    CHECK(rec.channels == 8);
    std::filesystem::remove(path);
}

TEST_CASE("capacitance csv: malformed headers are rejected") {
    auto p1 = temp_file("fxc_cap_h1.csv", "time,ch0\n1,2\n");
    CHECK_THROWS_AS(parse_capacitance_csv(p1), Error);
    auto p2 = temp_file("fxc_cap_h2.csv", "ts_ms,ch0,ch2\n1,2,3\n");
    try {
        parse_capacitance_csv(p2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::channel_count_mismatch);
    }
    auto p3 = temp_file("fxc_cap_rows.csv", "ts_ms,ch0,ch1\n1,2\n");
    CHECK_THROWS_AS(parse_capacitance_csv(p3), Error);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    std::filesystem::remove(p3);
}

TEST_CASE("capacitance csv roundtrips byte-identically") {
    SessionRecording rec;
    rec.push(1000, {13700000.125, 13800000.5});
    rec.push(1033, {13700103.25, 13800401.75});
    auto dir = std::filesystem::temp_directory_path();
    auto p1 = (dir / "fxc_rt1.csv").string();
    auto p2 = (dir / "fxc_rt2.csv").string();
    write_capacitance_csv(p1, rec);
    write_capacitance_csv(p2, parse_capacitance_csv(p1));
    std::ifstream a(p1), b(p2);
    std::string sa((std::istreambuf_iterator<char>(a)), {});
    std::string sb((std::istreambuf_iterator<char>(b)), {});
    CHECK(sa == sb);
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("markers: square of side 100 px at 0.1 cm/px") {
    std::string csv = "ts_ms,marker_id,x_px,y_px\n";
    for (int f = 0; f < 3; ++f)
        for (int id = 0; id < 4; ++id) {
            double x = (id == 1 || id == 3) ? 100.0 : 0.0;
            double y = (id >= 2) ? 100.0 : 0.0;
            csv += std::to_string(1000 + f * 33) + "," + std::to_string(id) + "," +
                   std::to_string(x) + "," + std::to_string(y) + "\n";
        }
    auto path = temp_file("fxc_markers.csv", csv);
    auto samples = parse_marker_csv(path);
    MarkerCorrespondence table; // p1=(0,1) p2=(2,3) p3=(2,1), 0.1 cm/px
    auto out = markers_to_primitives(samples, table);
    REQUIRE(out.series.ts.size() == 3);
    CHECK(out.dropped_frames == 0);
    CHECK(out.series.values[0][0] == doctest::Approx(10.0));
    CHECK(out.series.values[0][1] == doctest::Approx(10.0));
    CHECK(out.series.values[0][2] == doctest::Approx(14.142135623730951));
    std::filesystem::remove(path);
}

TEST_CASE("markers: a frame missing one marker is dropped and counted") {
    std::string csv = "ts_ms,marker_id,x_px,y_px\n";
    for (int f = 0; f < 3; ++f)
        for (int id = 0; id < 4; ++id) {
            if (f == 1 && id == 2) continue;
            csv += std::to_string(1000 + f * 33) + "," + std::to_string(id) + ",0,0\n";
        }
    auto path = temp_file("fxc_markers_drop.csv", csv);
    auto out = markers_to_primitives(parse_marker_csv(path), MarkerCorrespondence{});
    CHECK(out.series.ts.size() == 2);
    CHECK(out.dropped_frames == 1);
    std::filesystem::remove(path);
}

TEST_CASE("markers rendered from a known trajectory close the loop") {
    auto pattern = FoldPattern::preset(PatternKind::accordion_p);
    auto traj = generate_trajectory(pattern, random_elements(12, 20.0), 12);
    const double scale = 0.05; // cm per px
    std::string csv = "ts_ms,marker_id,x_px,y_px\n";
    PrimitiveSeries expect;
    for (std::size_t i = 0; i < traj.states.size(); i += 10) {
        const auto& s = traj.states[i];
        auto prim = extract_primitives(pattern, s);
        std::int64_t ts = 1000 + 333 * static_cast<std::int64_t>(i / 10);
        expect.ts.push_back(ts);
        expect.values.push_back({prim.p1, prim.p2, prim.p3});
        double w_cm = pattern.fixed_edge_len * 100.0;
        // camera looks straight down: markers at the four ground corners
        std::array<std::array<double, 2>, 4> px = {{{0.0, w_cm},        // 0 top-left
                                                    {prim.p1, w_cm},    // 1 top-right
                                                    {0.0, 0.0},         // 2 base-left
                                                    {prim.p2, 0.0}}};   // 3 base-right
        for (int id = 0; id < 4; ++id)
            csv += std::to_string(ts) + "," + std::to_string(id) + "," +
                   std::to_string(px[id][0] / scale) + "," + std::to_string(px[id][1] / scale) +
                   "\n";
    }
    auto path = temp_file("fxc_markers_loop.csv", csv);
    MarkerCorrespondence table;
    table.scale_cm_per_px = scale;
    auto got = markers_to_primitives(parse_marker_csv(path), table);
    REQUIRE(got.series.ts.size() == expect.ts.size());
    for (std::size_t i = 0; i < expect.ts.size(); ++i) {
        CHECK(std::fabs(got.series.values[i][0] - expect.values[i][0]) < 0.05);
        CHECK(std::fabs(got.series.values[i][1] - expect.values[i][1]) < 0.05);
        CHECK(std::fabs(got.series.values[i][2] - expect.values[i][2]) < 0.05);
    }
    std::filesystem::remove(path);
}

namespace {

// synthetic aligned pair: a wandering signal observed by both streams
void make_streams(SessionRecording& cap, PrimitiveSeries& tgt, std::int64_t shift_ms,
                  double noise = 0.0, std::uint64_t seed = 5) {
    Rng rng(seed);
    double phase = 0.0;
    cap.channels = 2;
    for (int i = 0; i < 1200; ++i) { // 40 s at 30 Hz
        phase += 0.05 + 0.04 * std::sin(i * 0.013);
        double v = std::sin(phase) + 0.3 * std::sin(phase * 0.37 + 1.0);
        std::int64_t t = 1000 + std::llround(i * 1000.0 / 30.0);
        cap.ts.push_back(t);
        cap.data.push_back(13.7e6 + 1e5 * v + noise * rng.gaussian());
        cap.data.push_back(13.8e6 - 5e4 * v);
        tgt.ts.push_back(t + shift_ms);
        tgt.values.push_back({10.0 + 5.0 * v + noise * 1e-5 * rng.gaussian(), 10.0 - 5.0 * v, 15.0});
    }
}

} // namespace

TEST_CASE("align recovers zero and injected offsets within one frame") {
    for (std::int64_t shift : {0ll, 400ll, -400ll}) {
        SessionRecording cap;
        PrimitiveSeries tgt;
        make_streams(cap, tgt, shift);
        auto out = align(cap, tgt, 2.0);
        CHECK(std::fabs(out.offset_ms - static_cast<double>(-shift)) <= 17.0);
        CHECK(out.peak_correlation > 0.9);
        CHECK(!out.weak);
        // resampled pairs share the cap clock
        CHECK(out.frames.ts == out.targets.ts);
    }
}

TEST_CASE("align is shift-consistent") {
    SessionRecording cap;
    PrimitiveSeries tgt;
    make_streams(cap, tgt, 0);
    auto base = align(cap, tgt, 1.5);
    PrimitiveSeries shifted = tgt;
    for (auto& t : shifted.ts) t += 267;
    auto moved = align(cap, shifted, 1.5);
    CHECK(std::fabs((moved.offset_ms - base.offset_ms) + 267.0) <= 34.0);
}

TEST_CASE("align honours a manual offset override") {
    SessionRecording cap;
    PrimitiveSeries tgt;
    make_streams(cap, tgt, 400);
    double manual = -400.0;
    auto out = align(cap, tgt, 2.0, &manual);
    CHECK(out.offset_ms == -400.0);
    CHECK(out.peak_correlation > 0.9);
}

TEST_CASE("align rejects non-overlapping or too-short streams") {
    SessionRecording cap;
    PrimitiveSeries tgt;
    make_streams(cap, tgt, 0);
    PrimitiveSeries far = tgt;
    for (auto& t : far.ts) t += 10'000'000;
    try {
        align(cap, far, 2.0);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == errc::no_overlap);
    }
    SessionRecording tiny;
    tiny.push(0, {1.0});
    tiny.push(33, {2.0});
    CHECK_THROWS_AS(align(tiny, tgt, 1.0), Error);
}

TEST_CASE("align flags weak correlation on unrelated streams") {
    SessionRecording cap;
    PrimitiveSeries tgt;
    make_streams(cap, tgt, 0);
    Rng rng(17);
    for (auto& v : tgt.values) v = {rng.uniform(5.0, 15.0), rng.uniform(5.0, 15.0), 15.0};
    auto out = align(cap, tgt, 1.0);
    CHECK(out.weak);
}
