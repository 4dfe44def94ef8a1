// ============================================================================
// core/geometry.hpp - Origami patterns, fold states, surface realization
// ============================================================================
//
// The four pattern families and their rigid-panel kinematics. A pattern is a
// flat sheet divided into `num_creases` bays of length `segment_len_a`; a
// fold state gives each bay a height dh over the ground plane, and bay i then
// spans the horizontal extent dl_i = sqrt(a^2 - dh_i^2).
//
// Material (u,v) coordinates, used by channel paths and local_height:
//   accordion/chevron  u in [0, num_creases*a] along the fold direction,
//                      v in [0, fixed_edge_len] across the sheet
//   sunray             u along the mid-radius arc, v radial from the inner rim
//   vfold              u in [-num_creases*a, +num_creases*a], negative = left
//                      arm, measured from the hinge; v in [0, fixed_edge_len]
//                      along the hinge
#pragma once
#include <array>
#include <string>
#include <vector>

#include "core/config.hpp"

namespace fxc {

enum class PatternKind {
    accordion_r,
    accordion_p,
    accordion_d,
    chevron_r,
    chevron_p,
    vfold,
    sunray,
};

enum class StripOrientation { perpendicular, parallel, diagonal };

struct Vec2 {
    double u = 0.0, v = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct ChannelLayout {
    int channel_id = 0;
    StripOrientation orientation = StripOrientation::perpendicular;
    std::vector<Vec2> path; // material-coordinate polyline
    double strip_width = 0.02;
};

struct FoldPattern {
    PatternKind kind = PatternKind::accordion_p;
    double fixed_edge_len = 0.225; // m; crease length (quads), hinge (vfold), radial width (sunray)
    double segment_len_a = 0.01;   // m per bay
    int num_creases = 20;          // bays per strip (per arm for vfold)
    double patch_width_w = 0.02;   // m, conductive strip width
    double sunray_arc_angle = 1.2; // rad, flat fan angle (sunray only)
    double deploy_min = 0.02;      // m, deployable edge extent limits
    double deploy_max = 0.20;
    std::vector<ChannelLayout> channels;

    static FoldPattern preset(PatternKind kind, int num_channels = 4);
    static FoldPattern from_config(const Config& cfg);
    void validate() const;

    double flat_len() const { return num_creases * segment_len_a; }
    bool is_quad() const {
        return kind != PatternKind::vfold && kind != PatternKind::sunray;
    }
    bool is_chevron() const {
        return kind == PatternKind::chevron_r || kind == PatternKind::chevron_p;
    }
    // sunray fan geometry; creases are radial, heights scale with radius
    double sunray_r_mid() const { return flat_len() / sunray_arc_angle; }
    double sunray_r_in() const { return sunray_r_mid() - fixed_edge_len / 2.0; }
    double sunray_r_out() const { return sunray_r_mid() + fixed_edge_len / 2.0; }
};

PatternKind pattern_kind_from_string(const std::string& name);
std::string pattern_kind_name(PatternKind kind);
std::vector<std::string> pattern_kind_names();

// Per-bay fold heights along the two rails. For quads the rails are the two
// foldable edges (heights interpolate linearly across the width); for vfold
// top = left arm and bottom = right arm; sunray uses one shared profile.
struct FoldState {
    std::vector<double> top_profile;
    std::vector<double> bottom_profile;
    std::array<double, 2> arm_angles{0.6, 0.6}; // rad from the hinge normal, vfold only

    static FoldState flat(const FoldPattern& p);
    static FoldState uniform(const FoldPattern& p, double dh_top, double dh_bottom);
    // rail extents (m) -> uniform per-rail profiles
    static FoldState from_extents(const FoldPattern& p, double extent_top, double extent_bottom);
};

void validate_state(const FoldPattern& p, const FoldState& s);
// pulls dh into [0, 0.999*a]; returns true if anything moved
bool clamp_state(const FoldPattern& p, FoldState& s);

struct GeometryPrimitives {
    double p1 = 0.0, p2 = 0.0, p3 = 0.0; // cm
};

// (Top, Base, Diagonal) for quads; (Left, Right, Diagonal) for vfold/sunray
std::array<std::string, 3> primitive_labels(PatternKind kind);
// feasible [min,max] per primitive in cm, used for target normalization
std::array<std::array<double, 2>, 3> primitive_ranges(const FoldPattern& p);

struct SurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<int> face_panel; // owning panel id per face
};

SurfaceMesh realize_surface(const FoldPattern& p, const FoldState& s);
GeometryPrimitives extract_primitives(const FoldPattern& p, const FoldState& s);

// Per-state cache of the realized surface heights: O(num_creases) to build,
// O(1) per query. This is what the channel model samples frame by frame.
class HeightField {
public:
    HeightField(const FoldPattern& p, const FoldState& s);
    // surface height over the ground plane at a material point, bilinear
    // within panels
    double height(double u, double v) const;
    // in-plane forshortening of a unit material step (du, dv) at (u, v)
    double projected(double u, double v, double du, double dv) const;

private:
    double bay_dh(double u, double v) const;
    int n_;
    double a_, width_;
    int family_; // 0 quad, 1 vfold, 2 sunray
    double lift_ = 0.0, r_mid_ = 0.0, r_in_ = 0.0;
    std::vector<double> zt_, zb_;               // lifted crease heights per rail/arm
    std::vector<double> top_dh_, bottom_dh_;    // per-bay fold heights
};

// height of the surface over the ground plane at a material point, bilinear
// within panels; convenience wrapper over HeightField
double local_height(const FoldPattern& p, const FoldState& s, double u, double v);

// closed-form volume between surface and ground plane, from state parameters
// only (never touches the mesh); exact for states whose bays form grounded
// tents, i.e. tent-paired profiles
double analytic_volume(const FoldPattern& p, const FoldState& s);

void export_obj(const SurfaceMesh& mesh, const std::string& path);

// material->world map of the realized surface (used by tests and downstream
// consumers that need strip positions in space)
Vec3 surface_point(const FoldPattern& p, const FoldState& s, double u, double v);

} // namespace fxc
