// ============================================================================
// core/evaluation.hpp - Regression metrics and shape reconstruction
// ============================================================================
#pragma once
#include <array>
#include <string>
#include <vector>

#include "core/geometry.hpp"

namespace fxc {

struct RSquared {
    double determination = 0.0; // 1 - SS_res/SS_tot
    double pearson_sq = 0.0;    // squared Pearson correlation
};

// both forms reported side by side; acceptance thresholds use determination
RSquared r_squared(const std::vector<double>& truth, const std::vector<double>& pred);
double rmse(const std::vector<double>& truth, const std::vector<double>& pred);

struct BlandAltman {
    double bias = 0.0;    // mean(pred - truth)
    double sd = 0.0;      // sample standard deviation (n-1)
    double loa_low = 0.0; // bias -/+ 1.96 sd
    double loa_high = 0.0;
};

BlandAltman bland_altman(const std::vector<double>& truth, const std::vector<double>& pred);

struct EvalReport {
    std::array<std::string, 3> labels;
    std::array<RSquared, 3> r2;
    std::array<double, 3> rmse_cm{};
    std::array<BlandAltman, 3> ba;
    double avg_r2_determination = 0.0;
    double avg_r2_pearson = 0.0;
    double avg_rmse_cm = 0.0;
    std::size_t samples = 0;

    std::string to_json() const;
};

// truth/pred flattened [n, 3] in cm
EvalReport evaluate_primitives(const std::vector<double>& truth, const std::vector<double>& pred,
                               const std::array<std::string, 3>& labels);

// per-primitive scatter CSV (truth, pred) and a minimal SVG scatter plot
void write_scatter_csv(const std::string& path, const std::vector<double>& truth,
                       const std::vector<double>& pred, int dim,
                       const std::array<std::string, 3>& labels);
void write_scatter_svg(const std::string& path, const std::vector<double>& truth,
                       const std::vector<double>& pred, int dim, const std::string& title);

struct Reconstruction {
    FoldState state;
    double residual_cm = 0.0; // primitive mismatch after the solve
    bool clamped = false;     // primitives fell outside the feasible range
};

// Least-squares inversion of extract_primitives over the low-dimensional
// deployment parameterization (rail extents; arm extents + opening for
// vfold; fan angle for sunray), optionally seeded by the previous frame.
// Throws errc::infeasible when the residual exceeds 10% of the fixed edge.
Reconstruction reconstruct(const FoldPattern& pattern, const GeometryPrimitives& primitives,
                           const FoldState* previous = nullptr);

} // namespace fxc
