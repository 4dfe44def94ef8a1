// ============================================================================
// core/regressor.hpp - 1D convolutional regression network, from scratch
// ============================================================================
//
// Fixed topology sized for the 30 x N window regression task:
//   conv(N->32, k5, same) relu maxpool2 conv(32->48, k5) relu
//   conv(48->64, k3) relu gap dense(64->64) relu dense(64->3)
// Parameters live in one flat vector; gradients come from hand-written
// backprop verified against finite differences.
#pragma once
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "core/pipeline.hpp"

namespace fxc {

struct Architecture {
    int input_len = 30;
    int channels = 4;
    int out_dim = 3;
    int c1 = 32, k1 = 5; // same padding
    int c2 = 48, k2 = 5; // valid
    int c3 = 64, k3 = 3; // valid
    int fc = 64;

    int len_pool() const { return input_len / 2; }
    int len2() const { return len_pool() - k2 + 1; }
    int len3() const { return len2() - k3 + 1; }
    std::size_t param_count() const;
};

class RegressorModel {
public:
    RegressorModel() = default;
    RegressorModel(int channels, int input_len = 30, int out_dim = 3);

    void init_params(std::uint64_t seed); // fan-in scaled uniform
    const Architecture& arch() const { return arch_; }
    std::size_t param_count() const { return params_.size(); }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    // predictions in normalized target space; batch is [B, input_len, channels]
    std::vector<double> forward(const double* batch, std::size_t batch_size) const;
    std::vector<double> forward(const WindowDataset& ds) const;

    // mean squared error against normalized targets; accumulates parameter
    // gradients (resizes grad to param_count)
    double forward_backward(const double* batch, const double* targets_norm,
                            std::size_t batch_size, std::vector<double>& grad) const;

    // primitive ranges (cm) used to normalize targets; stored with the model
    void set_target_ranges(const std::array<std::array<double, 2>, 3>& r) { ranges_ = r; }
    const std::array<std::array<double, 2>, 3>& target_ranges() const { return ranges_; }
    double normalize_target(double cm, int dim) const;
    double denormalize_target(double norm, int dim) const;
    // predictions in cm
    std::vector<double> predict_primitives(const WindowDataset& ds) const;

    void save(const std::string& path) const;
    static RegressorModel load(const std::string& path);
    std::uint64_t param_checksum() const; // FNV-1a over the raw parameter bytes

private:
    Architecture arch_;
    std::vector<double> params_;
    std::array<std::array<double, 2>, 3> ranges_{{{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}}};
};

// max relative error between analytic gradients and central finite
// differences over `num_params` randomly chosen parameters
double backward_check(const RegressorModel& model, const double* batch,
                      const double* targets_norm, std::size_t batch_size, double eps,
                      int num_params = 200, std::uint64_t seed = 1);

struct TrainConfig {
    std::size_t batch_size = 4096;
    double lr0 = 0.01;
    double lr_decay = 0.5;
    int decay_every_epochs = 20;
    int early_stop_patience = 100;
    int max_epochs = 1000;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9, adam_beta2 = 0.999, adam_eps = 1e-8;

    double lr_at_epoch(int epoch) const; // step decay, epoch 0-based
};

struct TrainReport {
    std::vector<double> train_loss; // per epoch
    std::vector<double> val_loss;
    std::vector<double> lr;
    int best_epoch = -1;
    double best_val_loss = 0.0;
    std::uint64_t param_checksum = 0;
    double wall_s = 0.0;
    std::string stopped; // "early" | "max_epochs" | "diverged"
    std::size_t train_windows = 0, val_windows = 0;

    std::string to_json() const;
};

// Adam + step decay + early stopping on validation loss; the model ends at
// the best-validation parameters. Targets in the datasets are raw cm; they
// are normalized by the model's target ranges. Throws errc::diverged on
// non-finite loss (partial report in *report_out when given).
TrainReport train(RegressorModel& model, const WindowDataset& train_set,
                  const WindowDataset& val_set, const TrainConfig& cfg,
                  TrainReport* report_out = nullptr);

// the spec'd training assembly: sessions -> normalize each -> windows ->
// last session tests, tail `val_frac` of the training windows validates
struct TrainEvalData {
    WindowDataset train, val, test;
    std::vector<NormalizationStats> norm_stats;
    std::vector<std::string> session_ids;
};

TrainEvalData build_datasets(const std::vector<SessionRecording>& sessions,
                             const std::vector<PrimitiveSeries>& primitives,
                             double val_frac = 0.1);

} // namespace fxc
