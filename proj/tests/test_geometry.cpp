#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "test_helpers.hpp"

using namespace fxc;
using fxc::test::rel_err;

static FoldPattern two_bay_pattern() {
    FoldPattern p;
    p.kind = PatternKind::accordion_r;
    p.fixed_edge_len = 0.0225;
    p.segment_len_a = 0.01;
    p.num_creases = 2;
    p.patch_width_w = 0.005;
    p.deploy_min = 0.002;
    p.deploy_max = 0.02;
    p.channels.clear();
    return p;
}

TEST_CASE("flat state realizes the developable sheet") {
    auto p = FoldPattern::preset(PatternKind::accordion_p);
    auto mesh = realize_surface(p, FoldState::flat(p));
    double max_x = 0.0;
    for (const auto& v : mesh.vertices) {
        CHECK(v.z == 0.0);
        max_x = std::max(max_x, v.x);
    }
    CHECK(rel_err(max_x, p.flat_len()) < 1e-12);
}

TEST_CASE("uniform 3-4-5 state spaces creases by dl = 0.008") {
    auto p = two_bay_pattern();
    auto s = FoldState::uniform(p, 0.006, 0.006);
    auto mesh = realize_surface(p, s);
    // vertices: [station][crease], bottom station first
    REQUIRE(mesh.vertices.size() == 6);
    CHECK(rel_err(mesh.vertices[1].x - mesh.vertices[0].x, 0.008) < 1e-12);
    CHECK(rel_err(mesh.vertices[2].x - mesh.vertices[1].x, 0.008) < 1e-12);
    CHECK(rel_err(mesh.vertices[1].z, 0.006) < 1e-12);
    CHECK(mesh.vertices[0].z == 0.0);
    CHECK(mesh.vertices[2].z == 0.0);
}

TEST_CASE("isometry: fold-direction segments keep length a") {
    // creased sheets do not stretch: for every state, the 3D segment between
    // consecutive creases at either rail has length a (quads and vfold; the
    // sunray triangulation chords its curved panels)
    Rng rng(123);
    for (auto kind : {PatternKind::accordion_p, PatternKind::chevron_r, PatternKind::vfold}) {
        auto p = FoldPattern::preset(kind);
        for (int trial = 0; trial < 25; ++trial) {
            auto s = fxc::test::random_free_state(p, rng);
            for (double v : {0.0, p.fixed_edge_len}) {
                for (int i = 0; i < p.num_creases; ++i) {
                    double u0 = i * p.segment_len_a;
                    double u1 = (i + 1) * p.segment_len_a - 1e-13;
                    if (kind == PatternKind::vfold) {
                        // check both arms
                        for (double sgn : {-1.0, 1.0}) {
                            Vec3 a0 = surface_point(p, s, sgn * u0, v);
                            Vec3 a1 = surface_point(p, s, sgn * u1, v);
                            double len =
                                std::sqrt((a1.x - a0.x) * (a1.x - a0.x) +
                                          (a1.y - a0.y) * (a1.y - a0.y) +
                                          (a1.z - a0.z) * (a1.z - a0.z));
                            CHECK(std::fabs(len - p.segment_len_a) < 1e-12);
                        }
                    } else {
                        Vec3 a0 = surface_point(p, s, u0, v);
                        Vec3 a1 = surface_point(p, s, u1, v);
                        double len = std::sqrt((a1.x - a0.x) * (a1.x - a0.x) +
                                               (a1.y - a0.y) * (a1.y - a0.y) +
                                               (a1.z - a0.z) * (a1.z - a0.z));
                        CHECK(std::fabs(len - p.segment_len_a) < 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("mesh vertices stay above the ground plane") {
    Rng rng(321);
    for (auto kind : {PatternKind::accordion_p, PatternKind::chevron_p, PatternKind::vfold,
                      PatternKind::sunray}) {
        auto p = FoldPattern::preset(kind);
        for (int trial = 0; trial < 20; ++trial) {
            auto mesh = realize_surface(p, fxc::test::random_free_state(p, rng));
            for (const auto& v : mesh.vertices) CHECK(v.z >= -1e-15);
        }
    }
}

TEST_CASE("monotone deployment: higher folds shrink the footprint") {
    auto p = FoldPattern::preset(PatternKind::accordion_p);
    double prev_top = 1e9, prev_base = 1e9;
    for (double dh = 0.0; dh < 0.95 * p.segment_len_a; dh += 0.05 * p.segment_len_a) {
        auto prim = extract_primitives(p, FoldState::uniform(p, dh, dh));
        if (dh > 0.0) {
            CHECK(prim.p1 < prev_top);
            CHECK(prim.p2 < prev_base);
        }
        prev_top = prim.p1;
        prev_base = prim.p2;
    }
}

TEST_CASE("flat accordion primitives: 20 x 22.5 sheet") {
    auto p = FoldPattern::preset(PatternKind::accordion_p);
    auto prim = extract_primitives(p, FoldState::flat(p));
    CHECK(rel_err(prim.p1, 20.0) < 1e-12);
    CHECK(rel_err(prim.p2, 20.0) < 1e-12);
    CHECK(rel_err(prim.p3, 30.103986446980738) < 1e-12);
}

TEST_CASE("symmetric states have equal Top and Base") {
    auto p = FoldPattern::preset(PatternKind::chevron_p);
    Rng rng(5);
    for (int t = 0; t < 10; ++t) {
        auto s = fxc::test::random_tent_state(p, rng, true);
        auto prim = extract_primitives(p, s);
        CHECK(prim.p1 == prim.p2);
    }
}

TEST_CASE("primitives agree with distances measured on the mesh") {
    Rng rng(777);
    for (auto kind : {PatternKind::accordion_p, PatternKind::chevron_r, PatternKind::vfold,
                      PatternKind::sunray}) {
        auto p = FoldPattern::preset(kind);
        for (int trial = 0; trial < 15; ++trial) {
            auto s = fxc::test::random_free_state(p, rng);
            auto prim = extract_primitives(p, s);
            auto mesh = realize_surface(p, s);
            auto dist = [&](const Vec3& a, const Vec3& b) {
                return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                                 (a.z - b.z) * (a.z - b.z)) * 100.0;
            };
            auto dist_xy = [&](const Vec3& a, const Vec3& b) {
                return std::hypot(a.x - b.x, a.y - b.y) * 100.0;
            };
            int n = p.num_creases;
            if (p.is_quad()) {
                int ns = p.is_chevron() ? 5 : 2;
                const Vec3& b0 = mesh.vertices[0];
                const Vec3& bn = mesh.vertices[n];
                const Vec3& t0 = mesh.vertices[(ns - 1) * (n + 1)];
                const Vec3& tn = mesh.vertices[(ns - 1) * (n + 1) + n];
                CHECK(std::fabs(dist_xy(t0, tn) - prim.p1) < 1e-7);
                CHECK(std::fabs(dist_xy(b0, bn) - prim.p2) < 1e-7);
                CHECK(std::fabs(dist(b0, tn) - prim.p3) < 1e-7);
            } else if (kind == PatternKind::vfold) {
                // hinge mid to tip mids; vertices: 2 hinge + per-arm pairs
                Vec3 hinge_mid{(mesh.vertices[0].x + mesh.vertices[1].x) / 2,
                               (mesh.vertices[0].y + mesh.vertices[1].y) / 2,
                               (mesh.vertices[0].z + mesh.vertices[1].z) / 2};
                auto tip_mid = [&](int arm) {
                    std::size_t base = 2 + arm * 2 * n + 2 * (n - 1);
                    const Vec3& a = mesh.vertices[base];
                    const Vec3& b = mesh.vertices[base + 1];
                    return Vec3{(a.x + b.x) / 2, (a.y + b.y) / 2, (a.z + b.z) / 2};
                };
                CHECK(std::fabs(dist(hinge_mid, tip_mid(0)) - prim.p1) < 1e-7);
                CHECK(std::fabs(dist(hinge_mid, tip_mid(1)) - prim.p2) < 1e-7);
                CHECK(std::fabs(dist(tip_mid(0), tip_mid(1)) - prim.p3) < 1e-7);
            } else {
                const Vec3& in0 = mesh.vertices[0];
                const Vec3& out0 = mesh.vertices[1];
                const Vec3& inN = mesh.vertices[2 * n];
                const Vec3& outN = mesh.vertices[2 * n + 1];
                CHECK(std::fabs(dist(in0, inN) - prim.p1) < 1e-7);
                CHECK(std::fabs(dist(out0, outN) - prim.p2) < 1e-7);
                CHECK(std::fabs(dist(in0, outN) - prim.p3) < 1e-7);
            }
        }
    }
}

TEST_CASE("analytic volume equals the mesh prism volume") {
    Rng rng(99);
    for (auto kind : {PatternKind::accordion_p, PatternKind::accordion_r, PatternKind::chevron_p,
                      PatternKind::vfold, PatternKind::sunray}) {
        auto p = FoldPattern::preset(kind);
        for (int trial = 0; trial < 30; ++trial) {
            auto s = fxc::test::random_tent_state(p, rng, true);
            double analytic = analytic_volume(p, s);
            double oracle = fxc::test::mesh_volume_under(realize_surface(p, s));
            CHECK(rel_err(analytic, oracle) < 1e-6);
        }
    }
}

TEST_CASE("local_height matches the realized mesh") {
    Rng rng(14);
    auto p = FoldPattern::preset(PatternKind::accordion_p);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = fxc::test::random_tent_state(p, rng, false);
        auto mesh = realize_surface(p, s);
        int n = p.num_creases;
        for (int i = 0; i <= n; ++i) {
            double u = std::min(i * p.segment_len_a, n * p.segment_len_a - 1e-12);
            CHECK(std::fabs(local_height(p, s, u, 0.0) - mesh.vertices[i].z) < 1e-9);
            CHECK(std::fabs(local_height(p, s, u, p.fixed_edge_len) -
                            mesh.vertices[n + 1 + i].z) < 1e-9);
        }
    }
}

TEST_CASE("obj export: counts, bounds, roundtrip") {
    auto p = two_bay_pattern();
    auto mesh = realize_surface(p, FoldState::flat(p));
    REQUIRE(mesh.vertices.size() == 6);
    REQUIRE(mesh.faces.size() == 4);
    std::string path = (std::filesystem::temp_directory_path() / "fxc_test_mesh.obj").string();
    export_obj(mesh, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x >> v.y >> v.z;
            verts.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> f;
            ss >> f[0] >> f[1] >> f[2];
            faces.push_back(f);
        }
    }
    REQUIRE(verts.size() == 6);
    REQUIRE(faces.size() == 4);
    for (std::size_t i = 0; i < verts.size(); ++i) {
        CHECK(std::fabs(verts[i].x - mesh.vertices[i].x) < 5e-7);
        CHECK(std::fabs(verts[i].y - mesh.vertices[i].y) < 5e-7);
        CHECK(std::fabs(verts[i].z - mesh.vertices[i].z) < 5e-7);
    }
    for (const auto& f : faces)
        for (int idx : f) {
            CHECK(idx >= 1);
            CHECK(idx <= static_cast<int>(verts.size()));
        }
    std::filesystem::remove(path);
}

TEST_CASE("state validation and clamping") {
    auto p = FoldPattern::preset(PatternKind::accordion_p);
    FoldState s = FoldState::flat(p);
    s.top_profile.pop_back();
    CHECK_THROWS_AS(validate_state(p, s), Error);

    s = FoldState::flat(p);
    s.top_profile[3] = p.segment_len_a; // dh == a is out
    CHECK_THROWS_AS(validate_state(p, s), Error);
    CHECK(clamp_state(p, s));
    CHECK(s.top_profile[3] == 0.999 * p.segment_len_a);
    validate_state(p, s);
    CHECK(!clamp_state(p, s));
}

TEST_CASE("sunray requires matching rail profiles") {
    auto p = FoldPattern::preset(PatternKind::sunray);
    auto s = FoldState::uniform(p, 0.004, 0.004);
    validate_state(p, s);
    s.bottom_profile[0] = 0.002;
    CHECK_THROWS_AS(validate_state(p, s), Error);
}

TEST_CASE("pattern presets validate and expose sane ranges") {
    for (const auto& name : pattern_kind_names()) {
        auto p = FoldPattern::preset(pattern_kind_from_string(name));
        CHECK(p.channels.size() == 4);
        auto ranges = primitive_ranges(p);
        for (const auto& r : ranges) {
            CHECK(r[0] >= 0.0);
            CHECK(r[1] > r[0]);
        }
        auto labels = primitive_labels(p.kind);
        CHECK(!labels[0].empty());
    }
    CHECK_THROWS_AS(pattern_kind_from_string("nope"), Error);
}

TEST_CASE("pattern config parsing") {
    std::string text = R"(
[pattern]
kind = accordion-p
channels = 4
fixed_edge_len = 0.225

[channel.0]
orientation = parallel
strip_width = 0.02
path = 0.035 0.0, 0.035 0.1

[channel.1]
orientation = perpendicular
path = 0.0 0.15, 0.2 0.15
)";
    auto cfg = Config::parse_string(text);
    auto p = FoldPattern::from_config(cfg);
    CHECK(p.kind == PatternKind::accordion_p);
    REQUIRE(p.channels.size() == 2);
    CHECK(p.channels[0].orientation == StripOrientation::parallel);
    CHECK(p.channels[1].path[1].u == 0.2);
    CHECK(p.channels[1].path[1].v == 0.15);
}

TEST_CASE("channel paths outside the sheet are rejected") {
    auto p = FoldPattern::preset(PatternKind::accordion_r);
    p.channels[0].path[1].u = p.flat_len() * 2.0;
    CHECK_THROWS_AS(p.validate(), Error);
}
