#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace fxc {

RSquared r_squared(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size()) fail(errc::shape_mismatch, "length mismatch");
    std::size_t n = truth.size();
    if (n < 2) fail(errc::degenerate_input, "r_squared needs >= 2 samples");
    double mt = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mt += truth[i];
        mp += pred[i];
    }
    mt /= n;
    mp /= n;
    double ss_res = 0.0, ss_tot = 0.0, sab = 0.0, spp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dt = truth[i] - mt, dp = pred[i] - mp;
        double r = pred[i] - truth[i];
        ss_res += r * r;
        ss_tot += dt * dt;
        sab += dt * dp;
        spp += dp * dp;
    }
    if (ss_tot <= 0.0) fail(errc::degenerate_input, "truth sequence is constant");
    RSquared out;
    out.determination = 1.0 - ss_res / ss_tot;
    out.pearson_sq = (spp > 0.0) ? (sab * sab) / (ss_tot * spp) : 0.0;
    return out;
}

double rmse(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size()) fail(errc::shape_mismatch, "length mismatch");
    if (truth.empty()) fail(errc::degenerate_input, "rmse needs >= 1 sample");
    double s = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        double d = pred[i] - truth[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(truth.size()));
}

BlandAltman bland_altman(const std::vector<double>& truth, const std::vector<double>& pred) {
    if (truth.size() != pred.size()) fail(errc::shape_mismatch, "length mismatch");
    std::size_t n = truth.size();
    if (n < 2) fail(errc::degenerate_input, "bland_altman needs >= 2 samples");
    BlandAltman out;
    for (std::size_t i = 0; i < n; ++i) out.bias += pred[i] - truth[i];
    out.bias /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (pred[i] - truth[i]) - out.bias;
        ss += d * d;
    }
    out.sd = std::sqrt(ss / static_cast<double>(n - 1));
    out.loa_low = out.bias - 1.96 * out.sd;
    out.loa_high = out.bias + 1.96 * out.sd;
    return out;
}

EvalReport evaluate_primitives(const std::vector<double>& truth, const std::vector<double>& pred,
                               const std::array<std::string, 3>& labels) {
    if (truth.size() != pred.size() || truth.size() % 3 != 0)
        fail(errc::shape_mismatch, "flattened [n,3] arrays expected");
    std::size_t n = truth.size() / 3;
    EvalReport rep;
    rep.labels = labels;
    rep.samples = n;
    for (int d = 0; d < 3; ++d) {
        std::vector<double> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = truth[i * 3 + d];
            p[i] = pred[i * 3 + d];
        }
        rep.r2[d] = r_squared(t, p);
        rep.rmse_cm[d] = rmse(t, p);
        rep.ba[d] = bland_altman(t, p);
        rep.avg_r2_determination += rep.r2[d].determination / 3.0;
        rep.avg_r2_pearson += rep.r2[d].pearson_sq / 3.0;
        rep.avg_rmse_cm += rep.rmse_cm[d] / 3.0;
    }
    return rep;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["samples"] = samples;
    j["average"] = {{"r2_determination", avg_r2_determination},
                    {"r2_pearson_sq", avg_r2_pearson},
                    {"rmse_cm", avg_rmse_cm}};
    for (int d = 0; d < 3; ++d) {
        j["primitives"][labels[d]] = {
            {"r2_determination", r2[d].determination},
            {"r2_pearson_sq", r2[d].pearson_sq},
            {"rmse_cm", rmse_cm[d]},
            {"bland_altman",
             {{"bias", ba[d].bias},
              {"sd", ba[d].sd},
              {"loa_low", ba[d].loa_low},
              {"loa_high", ba[d].loa_high}}},
        };
    }
    return j.dump(2);
}

void write_scatter_csv(const std::string& path, const std::vector<double>& truth,
                       const std::vector<double>& pred, int dim,
                       const std::array<std::string, 3>& labels) {
    std::size_t n = truth.size() / 3;
    std::vector<std::vector<double>> rows;
    rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = truth[i * 3 + dim], p = pred[i * 3 + dim];
        rows.push_back({t, p, (t + p) / 2.0, p - t});
    }
    csv::write(path, {labels[dim] + "_truth", labels[dim] + "_pred", "mean", "diff"}, rows, 6);
}

void write_scatter_svg(const std::string& path, const std::vector<double>& truth,
                       const std::vector<double>& pred, int dim, const std::string& title) {
    std::size_t n = truth.size() / 3;
    double lo = 1e300, hi = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        lo = std::min({lo, truth[i * 3 + dim], pred[i * 3 + dim]});
        hi = std::max({hi, truth[i * 3 + dim], pred[i * 3 + dim]});
    }
    if (!(hi > lo)) {
        lo -= 1.0;
        hi += 1.0;
    }
    double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const int size = 480, margin = 40;
    auto sx = [&](double v) { return margin + (v - lo) / (hi - lo) * (size - 2 * margin); };
    auto sy = [&](double v) { return size - margin - (v - lo) / (hi - lo) * (size - 2 * margin); };
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size << "' height='" << size
        << "'>\n";
    svg << "<rect width='100%' height='100%' fill='white'/>\n";
    svg << "<text x='" << size / 2 << "' y='20' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    svg << "<line x1='" << margin << "' y1='" << size - margin << "' x2='" << size - margin
        << "' y2='" << size - margin << "' stroke='black'/>\n";
    svg << "<line x1='" << margin << "' y1='" << size - margin << "' x2='" << margin << "' y2='"
        << margin << "' stroke='black'/>\n";
    svg << "<line x1='" << sx(lo + pad) << "' y1='" << sy(lo + pad) << "' x2='" << sx(hi - pad)
        << "' y2='" << sy(hi - pad) << "' stroke='#999' stroke-dasharray='4'/>\n";
    // cap the emitted points; the CSV carries the full set
    std::size_t stride = std::max<std::size_t>(1, n / 2000);
    char buf[128];
    for (std::size_t i = 0; i < n; i += stride) {
        std::snprintf(buf, sizeof buf,
                      "<circle cx='%.1f' cy='%.1f' r='1.5' fill='steelblue' fill-opacity='0.5'/>\n",
                      sx(truth[i * 3 + dim]), sy(pred[i * 3 + dim]));
        svg << buf;
    }
    svg << "</svg>\n";
    csv::atomic_write_text(path, svg.str());
}

namespace {

// deterministic golden-section minimization on [lo, hi]
template <typename F>
double golden_min(F f, double lo, double hi, int iters = 90) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return (f1 < f2) ? x1 : x2;
}

double prim_residual(const FoldPattern& p, const FoldState& s, const GeometryPrimitives& want) {
    GeometryPrimitives got = extract_primitives(p, s);
    double d1 = got.p1 - want.p1, d2 = got.p2 - want.p2, d3 = got.p3 - want.p3;
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

} // namespace

Reconstruction reconstruct(const FoldPattern& pattern, const GeometryPrimitives& primitives,
                           const FoldState* previous) {
    pattern.validate();
    Reconstruction out;
    // extents below ~4.5% of flat would need dh beyond the 0.999a clamp
    double e_lo = pattern.flat_len() * 0.0455;
    double e_hi = pattern.flat_len();
    auto clamp_extent = [&](double cm) {
        double m = cm / 100.0;
        double c = std::clamp(m, e_lo, e_hi);
        if (c != m) out.clamped = true;
        return c;
    };

    if (pattern.is_quad()) {
        double eb = clamp_extent(primitives.p2);
        auto cost = [&](double et) {
            FoldState s = FoldState::from_extents(pattern, et, eb);
            GeometryPrimitives got = extract_primitives(pattern, s);
            double d1 = got.p1 - primitives.p1, d3 = got.p3 - primitives.p3;
            return d1 * d1 + d3 * d3;
        };
        double lo = e_lo, hi = e_hi;
        if (previous) { // temporal coherence: search near the previous solve
            double prev = 0.0;
            for (double dh : previous->top_profile)
                prev += std::sqrt(std::max(0.0, pattern.segment_len_a * pattern.segment_len_a -
                                                     dh * dh));
            lo = std::max(e_lo, prev - 0.2 * pattern.flat_len());
            hi = std::min(e_hi, prev + 0.2 * pattern.flat_len());
            if (hi - lo < 1e-6) {
                lo = e_lo;
                hi = e_hi;
            }
        }
        double et = golden_min(cost, lo, hi);
        if (previous && (cost(et) > cost(e_lo) || cost(et) > cost(e_hi))) // local trap: widen
            et = golden_min(cost, e_lo, e_hi);
        out.state = FoldState::from_extents(pattern, et, eb);
    } else if (pattern.kind == PatternKind::vfold) {
        double e0 = clamp_extent(primitives.p1);
        double e1 = clamp_extent(primitives.p2);
        double d = primitives.p3 / 100.0;
        double c = (d * d - e0 * e0 - e1 * e1) / (2.0 * e0 * e1);
        if (c < -1.0 || c > 1.0) {
            c = std::clamp(c, -1.0, 1.0);
            out.clamped = true;
        }
        double alpha = 0.5 * std::acos(c);
        const double a_min = 0.05, a_max = 1.5;
        if (alpha < a_min || alpha > a_max) {
            alpha = std::clamp(alpha, a_min, a_max);
            out.clamped = true;
        }
        out.state = FoldState::from_extents(pattern, e0, e1);
        out.state.arm_angles = {alpha, alpha};
    } else { // sunray: one degree of freedom, the fan angle
        auto cost = [&](double theta) {
            double e = theta * pattern.sunray_r_mid();
            FoldState s = FoldState::from_extents(pattern, e, e);
            return prim_residual(pattern, s, primitives);
        };
        double th_lo = e_lo / pattern.sunray_r_mid();
        double th_hi = pattern.sunray_arc_angle;
        double theta = golden_min(cost, th_lo, th_hi);
        double e = theta * pattern.sunray_r_mid();
        out.state = FoldState::from_extents(pattern, e, e);
    }

    out.residual_cm = prim_residual(pattern, out.state, primitives);
    if (out.residual_cm > 0.1 * pattern.fixed_edge_len * 100.0)
        fail(errc::infeasible, "primitive triple is infeasible for this pattern (residual " +
                                   std::to_string(out.residual_cm) + " cm)");
    return out;
}

} // namespace fxc
