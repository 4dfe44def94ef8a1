#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fxc {

namespace {

constexpr double kPi = 3.14159265358979323846;

double lerp(double a, double b, double t) { return a + (b - a) * t; }

double seg_dl(double a, double dh) { return std::sqrt(std::max(0.0, a * a - dh * dh)); }

// chevron creases are parallel in-plane zigzags; two full periods across the
// width, amplitude a/2
double chevron_phase(const FoldPattern& p, double v) {
    double amp = p.segment_len_a / 2.0;
    double t = v / p.fixed_edge_len * 2.0; // two periods
    t -= std::floor(t);
    return amp * (1.0 - std::fabs(2.0 * t - 1.0));
}

// cumulative crease (x, z) for one rail profile, z alternating up/down, no lift
void rail_zigzag(const FoldPattern& p, const std::vector<double>& profile,
                 std::vector<double>& x, std::vector<double>& z) {
    int n = p.num_creases;
    x.assign(n + 1, 0.0);
    z.assign(n + 1, 0.0);
    double sign = 1.0;
    for (int i = 0; i < n; ++i) {
        x[i + 1] = x[i] + seg_dl(p.segment_len_a, profile[i]);
        z[i + 1] = z[i] + sign * profile[i];
        sign = -sign;
    }
}

double profile_extent(const FoldPattern& p, const std::vector<double>& profile) {
    double e = 0.0;
    for (double dh : profile) e += seg_dl(p.segment_len_a, dh);
    return e;
}

struct RailGeo {
    std::vector<double> xt, zt, xb, zb; // per-crease, top and bottom rails
    double lift = 0.0;
};

RailGeo rails_for(const FoldPattern& p, const FoldState& s) {
    RailGeo g;
    rail_zigzag(p, s.top_profile, g.xt, g.zt);
    rail_zigzag(p, s.bottom_profile, g.xb, g.zb);
    double zmin = 0.0;
    for (double z : g.zt) zmin = std::min(zmin, z);
    for (double z : g.zb) zmin = std::min(zmin, z);
    g.lift = -zmin;
    return g;
}

double segseg_dist(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
    auto dot = [](Vec2 p, Vec2 q) { return p.u * q.u + p.v * q.v; };
    auto sub = [](Vec2 p, Vec2 q) { return Vec2{p.u - q.u, p.v - q.v}; };
    auto point_seg = [&](Vec2 c, Vec2 p0, Vec2 p1) {
        Vec2 d = sub(p1, p0);
        double len2 = dot(d, d);
        double t = len2 > 0.0 ? std::clamp(dot(sub(c, p0), d) / len2, 0.0, 1.0) : 0.0;
        Vec2 q{p0.u + t * d.u, p0.v + t * d.v};
        return std::hypot(c.u - q.u, c.v - q.v);
    };
    auto orient = [&](Vec2 p, Vec2 q, Vec2 r) {
        return (q.u - p.u) * (r.v - p.v) - (q.v - p.v) * (r.u - p.u);
    };
    double o1 = orient(a0, a1, b0), o2 = orient(a0, a1, b1);
    double o3 = orient(b0, b1, a0), o4 = orient(b0, b1, a1);
    if (((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0))) return 0.0; // proper crossing
    return std::min(std::min(point_seg(a0, b0, b1), point_seg(a1, b0, b1)),
                    std::min(point_seg(b0, a0, a1), point_seg(b1, a0, a1)));
}

double polyline_dist(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (std::size_t j = 0; j + 1 < b.size(); ++j)
            best = std::min(best, segseg_dist(a[i], a[i + 1], b[j], b[j + 1]));
    return best;
}

} // namespace

PatternKind pattern_kind_from_string(const std::string& name) {
    if (name == "accordion-r") return PatternKind::accordion_r;
    if (name == "accordion-p") return PatternKind::accordion_p;
    if (name == "accordion-d") return PatternKind::accordion_d;
    if (name == "chevron-r") return PatternKind::chevron_r;
    if (name == "chevron-p") return PatternKind::chevron_p;
    if (name == "vfold") return PatternKind::vfold;
    if (name == "sunray") return PatternKind::sunray;
    std::string all;
    for (const auto& n : pattern_kind_names()) all += (all.empty() ? "" : ", ") + n;
    fail(errc::config, "unknown pattern '" + name + "' (valid: " + all + ")");
}

std::string pattern_kind_name(PatternKind kind) {
    switch (kind) {
        case PatternKind::accordion_r: return "accordion-r";
        case PatternKind::accordion_p: return "accordion-p";
        case PatternKind::accordion_d: return "accordion-d";
        case PatternKind::chevron_r: return "chevron-r";
        case PatternKind::chevron_p: return "chevron-p";
        case PatternKind::vfold: return "vfold";
        case PatternKind::sunray: return "sunray";
    }
    return "?";
}

std::vector<std::string> pattern_kind_names() {
    return {"accordion-r", "accordion-p", "accordion-d", "chevron-r",
            "chevron-p",   "vfold",       "sunray"};
}

static std::vector<ChannelLayout> default_layouts(const FoldPattern& p, int num_channels) {
    std::vector<ChannelLayout> out;
    double U = p.flat_len();
    double W = p.fixed_edge_len;
    double w = p.patch_width_w;
    int N = num_channels;
    switch (p.kind) {
        case PatternKind::accordion_r:
        case PatternKind::chevron_r:
            // strips run across the creases, one per width station
            for (int j = 0; j < N; ++j) {
                double v = W * (2 * j + 1) / (2.0 * N);
                out.push_back({j, StripOrientation::perpendicular, {{0.0, v}, {U, v}}, w});
            }
            break;
        case PatternKind::accordion_p:
        case PatternKind::chevron_p:
            // strips ride single bays; spans staggered so the two rails are
            // distinguishable
            for (int j = 0; j < N; ++j) {
                int bay = static_cast<int>(p.num_creases * (2 * j + 1) / (2.0 * N));
                double u = (bay + 0.5) * p.segment_len_a;
                double v0 = (j % 2 == 0) ? 0.0 : 0.45 * W;
                double v1 = (j % 2 == 0) ? 0.55 * W : W;
                out.push_back({j, StripOrientation::parallel, {{u, v0}, {u, v1}}, w});
            }
            break;
        case PatternKind::accordion_d:
            for (int j = 0; j < N; ++j) {
                double s = (2.0 * U / 3.0) * (j + 0.5) / N;
                out.push_back({j, StripOrientation::diagonal, {{s, 0.0}, {s + U / 3.0, W}}, w});
            }
            break;
        case PatternKind::vfold:
            // diagonals on both arms, two v-bands each
            for (int j = 0; j < N; ++j) {
                double sgn = (j < N / 2) ? -1.0 : 1.0;
                bool lower = (j % 2 == 0);
                double v0 = lower ? 0.10 * W : 0.55 * W;
                double v1 = lower ? 0.45 * W : 0.90 * W;
                out.push_back({j,
                               StripOrientation::diagonal,
                               {{sgn * 0.10 * U, v0}, {sgn * 0.90 * U, v1}},
                               w});
            }
            break;
        case PatternKind::sunray:
            for (int j = 0; j < N; ++j) {
                double s = U * j / (N + 1.0);
                out.push_back({j, StripOrientation::diagonal, {{s, 0.0}, {s + U / (N + 1.0), W}}, w});
            }
            break;
    }
    return out;
}

FoldPattern FoldPattern::preset(PatternKind kind, int num_channels) {
    FoldPattern p;
    p.kind = kind;
    switch (kind) {
        case PatternKind::accordion_r:
        case PatternKind::accordion_p:
        case PatternKind::accordion_d:
        case PatternKind::chevron_r:
        case PatternKind::chevron_p:
            p.fixed_edge_len = 0.225;
            p.segment_len_a = 0.01;
            p.num_creases = 20;
            p.patch_width_w = 0.02;
            p.deploy_min = 0.02;
            p.deploy_max = 0.20;
            break;
        case PatternKind::vfold:
            p.fixed_edge_len = 0.10;
            p.segment_len_a = 0.01;
            p.num_creases = 14;
            p.patch_width_w = 0.02;
            p.deploy_min = 0.02;
            p.deploy_max = 0.14;
            break;
        case PatternKind::sunray: {
            p.fixed_edge_len = 0.10;
            p.segment_len_a = 0.011;
            p.num_creases = 12;
            p.patch_width_w = 0.015;
            p.sunray_arc_angle = 1.2;
            // deployable extent lives on the mid-radius arc; limits derived
            // from the 5..18 cm outer-chord range
            double theta_min = 2.0 * std::asin(0.025 / p.sunray_r_out());
            p.deploy_min = theta_min * p.sunray_r_mid();
            p.deploy_max = p.flat_len();
            break;
        }
    }
    p.channels = default_layouts(p, num_channels);
    p.validate();
    return p;
}

FoldPattern FoldPattern::from_config(const Config& cfg) {
    FoldPattern base;
    base.kind = pattern_kind_from_string(cfg.get_string("pattern", "kind"));
    int channels = static_cast<int>(cfg.get_int("pattern", "channels", 4));
    FoldPattern p = preset(base.kind, channels);
    p.fixed_edge_len = cfg.get_number("pattern", "fixed_edge_len", p.fixed_edge_len);
    p.segment_len_a = cfg.get_number("pattern", "segment_len_a", p.segment_len_a);
    p.num_creases = static_cast<int>(cfg.get_int("pattern", "num_creases", p.num_creases));
    p.patch_width_w = cfg.get_number("pattern", "patch_width_w", p.patch_width_w);
    p.sunray_arc_angle = cfg.get_number("pattern", "sunray_arc_angle", p.sunray_arc_angle);
    p.deploy_min = cfg.get_number("pattern", "deploy_min", p.deploy_min);
    p.deploy_max = cfg.get_number("pattern", "deploy_max", p.deploy_max);
    auto sections = cfg.sections_with_prefix("channel.");
    if (!sections.empty()) {
        p.channels.clear();
        for (const auto& sec : sections) {
            ChannelLayout cl;
            cl.channel_id = std::atoi(sec.c_str() + std::string("channel.").size());
            std::string ori = cfg.get_string(sec, "orientation", "perpendicular");
            if (ori == "perpendicular") cl.orientation = StripOrientation::perpendicular;
            else if (ori == "parallel") cl.orientation = StripOrientation::parallel;
            else if (ori == "diagonal") cl.orientation = StripOrientation::diagonal;
            else fail(errc::config, "bad orientation '" + ori + "' in [" + sec + "]");
            cl.strip_width = cfg.get_number(sec, "strip_width", p.patch_width_w);
            for (const auto& t : cfg.get_tuples(sec, "path")) {
                if (t.size() != 2) fail(errc::config, "[" + sec + "] path: expected 'u v' pairs");
                cl.path.push_back({t[0], t[1]});
            }
            p.channels.push_back(std::move(cl));
        }
        std::sort(p.channels.begin(), p.channels.end(),
                  [](const ChannelLayout& a, const ChannelLayout& b) {
                      return a.channel_id < b.channel_id;
                  });
    } else if (p.num_creases != base.num_creases || p.segment_len_a != base.segment_len_a) {
        p.channels = default_layouts(p, channels); // re-derive for resized patterns
    }
    p.validate();
    return p;
}

void FoldPattern::validate() const {
    if (fixed_edge_len <= 0.0 || segment_len_a <= 0.0 || patch_width_w <= 0.0)
        fail(errc::config, "pattern lengths must be positive");
    if (num_creases < 2) fail(errc::config, "num_creases must be >= 2");
    if (deploy_min <= 0.0 || deploy_max <= deploy_min)
        fail(errc::config, "bad deployable range");
    if (flat_len() + 1e-12 < deploy_max)
        fail(errc::config, "num_creases * segment_len_a must cover the deployable range");
    if (kind == PatternKind::sunray) {
        if (sunray_arc_angle <= 0.0 || sunray_arc_angle >= 2.0 * kPi)
            fail(errc::config, "sunray_arc_angle out of range");
        if (sunray_r_in() <= 0.0)
            fail(errc::config, "sunray inner radius must be positive; shrink fixed_edge_len");
    }
    double u_lo = (kind == PatternKind::vfold) ? -flat_len() : 0.0;
    for (const auto& cl : channels) {
        if (cl.path.size() < 2) fail(errc::config, "channel path needs >= 2 points");
        if (cl.strip_width <= 0.0) fail(errc::config, "strip_width must be positive");
        for (const auto& pt : cl.path) {
            if (pt.u < u_lo - 1e-9 || pt.u > flat_len() + 1e-9 || pt.v < -1e-9 ||
                pt.v > fixed_edge_len + 1e-9)
                fail(errc::config, "channel " + std::to_string(cl.channel_id) +
                                       " path leaves the pattern bounds");
        }
    }
    for (std::size_t i = 0; i < channels.size(); ++i)
        for (std::size_t j = i + 1; j < channels.size(); ++j) {
            double d = polyline_dist(channels[i].path, channels[j].path);
            if (d < (channels[i].strip_width + channels[j].strip_width) / 2.0)
                fail(errc::short_circuit,
                     "channels " + std::to_string(channels[i].channel_id) + " and " +
                         std::to_string(channels[j].channel_id) + " overlap in pattern coords");
        }
}

FoldState FoldState::flat(const FoldPattern& p) {
    FoldState s;
    s.top_profile.assign(p.num_creases, 0.0);
    s.bottom_profile.assign(p.num_creases, 0.0);
    return s;
}

FoldState FoldState::uniform(const FoldPattern& p, double dh_top, double dh_bottom) {
    FoldState s;
    s.top_profile.assign(p.num_creases, dh_top);
    s.bottom_profile.assign(p.num_creases, dh_bottom);
    return s;
}

FoldState FoldState::from_extents(const FoldPattern& p, double extent_top, double extent_bottom) {
    auto dh_for = [&](double e) {
        double dl = std::clamp(e / p.num_creases, 0.0, p.segment_len_a);
        return std::sqrt(std::max(0.0, p.segment_len_a * p.segment_len_a - dl * dl));
    };
    return uniform(p, dh_for(extent_top), dh_for(extent_bottom));
}

void validate_state(const FoldPattern& p, const FoldState& s) {
    auto check = [&](const std::vector<double>& prof, const char* name) {
        if (static_cast<int>(prof.size()) != p.num_creases)
            fail(errc::invalid_state, std::string(name) + " has " + std::to_string(prof.size()) +
                                          " bays, pattern has " + std::to_string(p.num_creases));
        for (double dh : prof)
            if (!(dh >= 0.0) || !(dh < p.segment_len_a))
                fail(errc::invalid_state,
                     std::string(name) + ": dh must lie in [0, a); got " + std::to_string(dh));
    };
    check(s.top_profile, "top_profile");
    check(s.bottom_profile, "bottom_profile");
    if (p.kind == PatternKind::sunray) {
        for (int i = 0; i < p.num_creases; ++i)
            if (s.top_profile[i] != s.bottom_profile[i])
                fail(errc::invalid_state, "sunray folds radially: profiles must match");
    }
    if (p.kind == PatternKind::vfold) {
        for (double a : s.arm_angles)
            if (!(a > 0.0) || !(a < kPi / 2.0))
                fail(errc::invalid_state, "vfold arm angles must lie in (0, pi/2)");
    }
}

bool clamp_state(const FoldPattern& p, FoldState& s) {
    bool moved = false;
    double hi = 0.999 * p.segment_len_a;
    for (auto* prof : {&s.top_profile, &s.bottom_profile})
        for (double& dh : *prof) {
            double c = std::clamp(dh, 0.0, hi);
            if (c != dh) {
                dh = c;
                moved = true;
            }
        }
    return moved;
}

std::array<std::string, 3> primitive_labels(PatternKind kind) {
    if (kind == PatternKind::vfold || kind == PatternKind::sunray)
        return {"Left", "Right", "Diagonal"};
    return {"Top", "Base", "Diagonal"};
}

std::array<std::array<double, 2>, 3> primitive_ranges(const FoldPattern& p) {
    std::array<std::array<double, 2>, 3> r;
    double lo = p.deploy_min * 100.0, hi = p.deploy_max * 100.0;
    if (p.is_quad()) {
        double w = p.fixed_edge_len * 100.0;
        r[0] = {lo, hi};
        r[1] = {lo, hi};
        r[2] = {std::sqrt(lo * lo + w * w), std::sqrt(hi * hi + w * w)};
    } else if (p.kind == PatternKind::vfold) {
        r[0] = {lo, hi};
        r[1] = {lo, hi};
        // diagonal bounds over the motion family: extents in [lo, hi], arms
        // skewing between 0.2 and 1.1 rad
        double dmin = 1e300, dmax = -1e300;
        for (double e0 : {lo, hi})
            for (double e1 : {lo, hi})
                for (double sum : {0.4, 1.3, 2.2}) {
                    double d = std::sqrt(e0 * e0 + e1 * e1 + 2.0 * e0 * e1 * std::cos(sum));
                    dmin = std::min(dmin, d);
                    dmax = std::max(dmax, d);
                }
        r[2] = {dmin, dmax};
    } else {
        double rm = p.sunray_r_mid(), r0 = p.sunray_r_in(), r1 = p.sunray_r_out();
        double th_lo = p.deploy_min / rm, th_hi = p.deploy_max / rm;
        auto at = [&](double th, int which) {
            if (which == 0) return 2.0 * r0 * std::sin(th / 2.0) * 100.0;
            if (which == 1) return 2.0 * r1 * std::sin(th / 2.0) * 100.0;
            return std::sqrt(r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * std::cos(th)) * 100.0;
        };
        for (int d = 0; d < 3; ++d) r[d] = {at(th_lo, d), at(th_hi, d)};
    }
    return r;
}

// --- realization ------------------------------------------------------------

static SurfaceMesh realize_quad(const FoldPattern& p, const FoldState& s) {
    RailGeo g = rails_for(p, s);
    double W = p.fixed_edge_len;
    std::vector<double> stations = {0.0, W};
    if (p.is_chevron()) stations = {0.0, W / 4.0, W / 2.0, 3.0 * W / 4.0, W};
    int n = p.num_creases;
    int ns = static_cast<int>(stations.size());
    SurfaceMesh m;
    m.vertices.reserve(static_cast<std::size_t>(ns) * (n + 1));
    for (int j = 0; j < ns; ++j) {
        double r = stations[j] / W;
        double shift = p.is_chevron() ? chevron_phase(p, stations[j]) : 0.0;
        // rail interpolation commutes with the cumulative sums, so lerping the
        // per-crease coordinates is the same surface as lerping the profiles
        std::vector<double> prof(n);
        for (int i = 0; i < n; ++i) prof[i] = lerp(s.bottom_profile[i], s.top_profile[i], r);
        std::vector<double> x, z;
        rail_zigzag(p, prof, x, z);
        for (int i = 0; i <= n; ++i)
            m.vertices.push_back({x[i] + shift, stations[j], z[i] + g.lift});
    }
    auto vid = [&](int j, int i) { return j * (n + 1) + i; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j + 1 < ns; ++j) {
            int v00 = vid(j, i), v01 = vid(j, i + 1);
            int v10 = vid(j + 1, i), v11 = vid(j + 1, i + 1);
            m.faces.push_back({v00, v01, v11});
            m.faces.push_back({v00, v11, v10});
            m.face_panel.push_back(i);
            m.face_panel.push_back(i);
        }
    return m;
}

static SurfaceMesh realize_vfold(const FoldPattern& p, const FoldState& s) {
    int n = p.num_creases;
    double Lc = p.fixed_edge_len;
    std::vector<double> x0, z0, x1, z1;
    rail_zigzag(p, s.top_profile, x0, z0);    // left arm
    rail_zigzag(p, s.bottom_profile, x1, z1); // right arm
    double zmin = 0.0;
    for (double z : z0) zmin = std::min(zmin, z);
    for (double z : z1) zmin = std::min(zmin, z);
    double lift = -zmin;

    SurfaceMesh m;
    // hinge vertices shared between the arms
    m.vertices.push_back({0.0, 0.0, lift});
    m.vertices.push_back({Lc, 0.0, lift});
    auto add_arm = [&](const std::vector<double>& x, const std::vector<double>& z, double alpha,
                       double sgn, int panel_base) {
        double du = std::sin(alpha), dv = sgn * std::cos(alpha);
        std::vector<int> prev = {0, 1};
        for (int i = 1; i <= n; ++i) {
            int a = static_cast<int>(m.vertices.size());
            m.vertices.push_back({x[i] * du, x[i] * dv, z[i] + lift});
            m.vertices.push_back({Lc + x[i] * du, x[i] * dv, z[i] + lift});
            // keep the upward orientation on both sides of the hinge
            if (sgn > 0.0) {
                m.faces.push_back({prev[0], prev[1], a + 1});
                m.faces.push_back({prev[0], a + 1, a});
            } else {
                m.faces.push_back({prev[1], prev[0], a});
                m.faces.push_back({prev[1], a, a + 1});
            }
            m.face_panel.push_back(panel_base + i - 1);
            m.face_panel.push_back(panel_base + i - 1);
            prev = {a, a + 1};
        }
    };
    add_arm(x0, z0, s.arm_angles[0], -1.0, 0);
    add_arm(x1, z1, s.arm_angles[1], +1.0, n);
    return m;
}

static SurfaceMesh realize_sunray(const FoldPattern& p, const FoldState& s) {
    int n = p.num_creases;
    double rm = p.sunray_r_mid(), r0 = p.sunray_r_in(), r1 = p.sunray_r_out();
    std::vector<double> xm, zm;
    rail_zigzag(p, s.top_profile, xm, zm);
    double zmin = 0.0;
    for (double z : zm) zmin = std::min(zmin, z);
    double lift = -zmin;

    SurfaceMesh m;
    double theta = 0.0;
    for (int i = 0; i <= n; ++i) {
        if (i > 0) theta += seg_dl(p.segment_len_a, s.top_profile[i - 1]) / rm;
        double zf = (zm[i] + lift) / rm; // height scales with radius: creases stay straight
        m.vertices.push_back({r0 * std::cos(theta), r0 * std::sin(theta), zf * r0});
        m.vertices.push_back({r1 * std::cos(theta), r1 * std::sin(theta), zf * r1});
    }
    for (int i = 0; i < n; ++i) {
        int v00 = 2 * i, v01 = 2 * (i + 1);        // inner rim
        int v10 = 2 * i + 1, v11 = 2 * (i + 1) + 1; // outer rim
        // azimuth grows counter-clockwise; wind the normals upward
        m.faces.push_back({v00, v11, v01});
        m.faces.push_back({v00, v10, v11});
        m.face_panel.push_back(i);
        m.face_panel.push_back(i);
    }
    return m;
}

SurfaceMesh realize_surface(const FoldPattern& p, const FoldState& s) {
    validate_state(p, s);
    switch (p.kind) {
        case PatternKind::vfold: return realize_vfold(p, s);
        case PatternKind::sunray: return realize_sunray(p, s);
        default: return realize_quad(p, s);
    }
}

GeometryPrimitives extract_primitives(const FoldPattern& p, const FoldState& s) {
    validate_state(p, s);
    GeometryPrimitives out;
    int n = p.num_creases;
    if (p.is_quad()) {
        double top = profile_extent(p, s.top_profile);
        double base = profile_extent(p, s.bottom_profile);
        RailGeo g = rails_for(p, s);
        double dz = g.zt[n] - g.zb[0];
        out.p1 = top * 100.0;
        out.p2 = base * 100.0;
        out.p3 = std::sqrt(top * top + p.fixed_edge_len * p.fixed_edge_len + dz * dz) * 100.0;
    } else if (p.kind == PatternKind::vfold) {
        std::vector<double> x0, z0, x1, z1;
        rail_zigzag(p, s.top_profile, x0, z0);
        rail_zigzag(p, s.bottom_profile, x1, z1);
        double e0 = x0[n], e1 = x1[n];
        double a0 = s.arm_angles[0], a1 = s.arm_angles[1];
        out.p1 = std::hypot(e0, z0[n]) * 100.0;
        out.p2 = std::hypot(e1, z1[n]) * 100.0;
        double dx = e0 * std::sin(a0) - e1 * std::sin(a1);
        double dy = e0 * std::cos(a0) + e1 * std::cos(a1);
        double dz = z0[n] - z1[n];
        out.p3 = std::sqrt(dx * dx + dy * dy + dz * dz) * 100.0;
    } else { // sunray
        double rm = p.sunray_r_mid(), r0 = p.sunray_r_in(), r1 = p.sunray_r_out();
        std::vector<double> xm, zm;
        rail_zigzag(p, s.top_profile, xm, zm);
        double zmin = 0.0;
        for (double z : zm) zmin = std::min(zmin, z);
        double lift = -zmin;
        double theta = xm[n] / rm;
        auto chord = [&](double ra, double rb) {
            double ax = ra - rb * std::cos(theta);
            double ay = -rb * std::sin(theta);
            double az = (lift * ra - (zm[n] + lift) * rb) / rm;
            return std::sqrt(ax * ax + ay * ay + az * az);
        };
        out.p1 = chord(r0, r0) * 100.0;
        out.p2 = chord(r1, r1) * 100.0;
        out.p3 = chord(r0, r1) * 100.0;
    }
    return out;
}

HeightField::HeightField(const FoldPattern& p, const FoldState& s) {
    n_ = p.num_creases;
    a_ = p.segment_len_a;
    width_ = p.fixed_edge_len;
    top_dh_ = s.top_profile;
    bottom_dh_ = s.bottom_profile;
    if (p.is_quad()) {
        family_ = 0;
        RailGeo g = rails_for(p, s);
        zt_ = g.zt;
        zb_ = g.zb;
        lift_ = g.lift;
    } else if (p.kind == PatternKind::vfold) {
        family_ = 1;
        std::vector<double> x;
        rail_zigzag(p, s.top_profile, x, zt_);
        rail_zigzag(p, s.bottom_profile, x, zb_);
        double zmin = 0.0;
        for (double z : zt_) zmin = std::min(zmin, z);
        for (double z : zb_) zmin = std::min(zmin, z);
        lift_ = -zmin;
    } else {
        family_ = 2;
        std::vector<double> x;
        rail_zigzag(p, s.top_profile, x, zt_);
        double zmin = 0.0;
        for (double z : zt_) zmin = std::min(zmin, z);
        lift_ = -zmin;
        r_mid_ = p.sunray_r_mid();
        r_in_ = p.sunray_r_in();
    }
}

double HeightField::height(double u, double v) const {
    auto tent = [&](const std::vector<double>& z, double uu) {
        double b = std::clamp(uu / a_, 0.0, static_cast<double>(n_) - 1e-12);
        int bay = static_cast<int>(b);
        return lerp(z[bay], z[bay + 1], b - bay) + lift_;
    };
    if (family_ == 0) {
        double r = std::clamp(v / width_, 0.0, 1.0);
        return lerp(tent(zb_, u), tent(zt_, u), r);
    }
    if (family_ == 1) return (u < 0.0) ? tent(zt_, -u) : tent(zb_, u);
    double r = r_in_ + std::clamp(v, 0.0, width_);
    return tent(zt_, u) * (r / r_mid_);
}

double HeightField::bay_dh(double u, double v) const {
    double uu = (family_ == 1) ? std::fabs(u) : u;
    int bay = std::clamp(static_cast<int>(uu / a_), 0, n_ - 1);
    if (family_ == 0) {
        double r = std::clamp(v / width_, 0.0, 1.0);
        return lerp(bottom_dh_[bay], top_dh_[bay], r);
    }
    if (family_ == 1) return (u < 0.0) ? top_dh_[bay] : bottom_dh_[bay];
    return top_dh_[bay];
}

double HeightField::projected(double u, double v, double du, double dv) const {
    double dh = bay_dh(u, v);
    double shorten = std::sqrt(std::max(0.0, a_ * a_ - dh * dh)) / a_;
    return std::hypot(du * shorten, dv);
}

double local_height(const FoldPattern& p, const FoldState& s, double u, double v) {
    return HeightField(p, s).height(u, v);
}

double analytic_volume(const FoldPattern& p, const FoldState& s) {
    validate_state(p, s);
    double a = p.segment_len_a;
    if (p.is_quad()) {
        double vt = 0.0, vb = 0.0;
        for (int i = 0; i < p.num_creases; ++i) {
            vt += 0.5 * s.top_profile[i] * seg_dl(a, s.top_profile[i]);
            vb += 0.5 * s.bottom_profile[i] * seg_dl(a, s.bottom_profile[i]);
        }
        // exact for rail-symmetric states; rail average otherwise
        return 0.5 * (vt + vb) * p.fixed_edge_len;
    }
    if (p.kind == PatternKind::vfold) {
        double v = 0.0;
        const std::vector<double>* profs[2] = {&s.top_profile, &s.bottom_profile};
        for (int arm = 0; arm < 2; ++arm) {
            double cross = 0.0;
            for (double dh : *profs[arm]) cross += 0.5 * dh * seg_dl(a, dh);
            // sheared footprint: crease spacing projects by cos(arm angle)
            v += cross * p.fixed_edge_len * std::cos(s.arm_angles[arm]);
        }
        return v;
    }
    // sunray: per-bay planar cone panel, heights proportional to radius
    double rm = p.sunray_r_mid(), r0 = p.sunray_r_in(), r1 = p.sunray_r_out();
    double vol = 0.0;
    for (double dh : s.top_profile) {
        double theta = seg_dl(a, dh) / rm;
        vol += dh * std::sin(theta) * (r1 * r1 * r1 - r0 * r0 * r0) / (6.0 * rm);
    }
    return vol;
}

Vec3 surface_point(const FoldPattern& p, const FoldState& s, double u, double v) {
    int n = p.num_creases;
    double a = p.segment_len_a;
    auto along = [&](const std::vector<double>& x, const std::vector<double>& z, double uu) {
        double b = std::clamp(uu / a, 0.0, static_cast<double>(n) - 1e-12);
        int bay = static_cast<int>(b);
        double t = b - bay;
        return std::array<double, 2>{lerp(x[bay], x[bay + 1], t), lerp(z[bay], z[bay + 1], t)};
    };
    if (p.is_quad()) {
        RailGeo g = rails_for(p, s);
        double r = std::clamp(v / p.fixed_edge_len, 0.0, 1.0);
        auto bpt = along(g.xb, g.zb, u);
        auto tpt = along(g.xt, g.zt, u);
        double shift = p.is_chevron() ? chevron_phase(p, v) : 0.0;
        return {lerp(bpt[0], tpt[0], r) + shift, v, lerp(bpt[1], tpt[1], r) + g.lift};
    }
    if (p.kind == PatternKind::vfold) {
        std::vector<double> x0, z0, x1, z1;
        rail_zigzag(p, s.top_profile, x0, z0);
        rail_zigzag(p, s.bottom_profile, x1, z1);
        double zmin = 0.0;
        for (double z : z0) zmin = std::min(zmin, z);
        for (double z : z1) zmin = std::min(zmin, z);
        double lift = -zmin;
        int arm = u < 0.0 ? 0 : 1;
        auto pt = arm == 0 ? along(x0, z0, -u) : along(x1, z1, u);
        double alpha = s.arm_angles[arm];
        double sgn = arm == 0 ? -1.0 : 1.0;
        return {pt[0] * std::sin(alpha) + v, pt[0] * sgn * std::cos(alpha), pt[1] + lift};
    }
    std::vector<double> xm, zm;
    rail_zigzag(p, s.top_profile, xm, zm);
    double zmin = 0.0;
    for (double z : zm) zmin = std::min(zmin, z);
    double rm = p.sunray_r_mid();
    double r = p.sunray_r_in() + std::clamp(v, 0.0, p.fixed_edge_len);
    auto pt = along(xm, zm, u);
    double theta = pt[0] / rm;
    return {r * std::cos(theta), r * std::sin(theta), (pt[1] - zmin) * (r / rm)};
}

void export_obj(const SurfaceMesh& mesh, const std::string& path) {
    std::ostringstream out;
    out << "# fxc surface mesh\n";
    char buf[96];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.6f %.6f %.6f\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const auto& f : mesh.faces) {
        std::snprintf(buf, sizeof buf, "f %d %d %d\n", f[0] + 1, f[1] + 1, f[2] + 1);
        out << buf;
    }
    csv::atomic_write_text(path, out.str());
}

} // namespace fxc
