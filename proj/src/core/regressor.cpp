#include "core/regressor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace fxc {

namespace {

struct Offsets {
    std::size_t w1, b1, w2, b2, w3, b3, wf1, bf1, wf2, bf2, total;
};

Offsets offsets_for(const Architecture& a) {
    Offsets o{};
    std::size_t at = 0;
    o.w1 = at; at += static_cast<std::size_t>(a.c1) * a.k1 * a.channels;
    o.b1 = at; at += a.c1;
    o.w2 = at; at += static_cast<std::size_t>(a.c2) * a.k2 * a.c1;
    o.b2 = at; at += a.c2;
    o.w3 = at; at += static_cast<std::size_t>(a.c3) * a.k3 * a.c2;
    o.b3 = at; at += a.c3;
    o.wf1 = at; at += static_cast<std::size_t>(a.fc) * a.c3;
    o.bf1 = at; at += a.fc;
    o.wf2 = at; at += static_cast<std::size_t>(a.out_dim) * a.fc;
    o.bf2 = at; at += a.out_dim;
    o.total = at;
    return o;
}

// all per-sample activations, reused across samples within one thread
struct Workspace {
    std::vector<double> xp;   // [len + k1 - 1][C] zero-padded input
    std::vector<double> a1;   // [len][c1] post-relu
    std::vector<double> pool; // [len/2][c1]
    std::vector<int> argmax;  // [len/2][c1]
    std::vector<double> a2;   // [len2][c2]
    std::vector<double> a3;   // [len3][c3]
    std::vector<double> gap;  // [c3]
    std::vector<double> h;    // [fc]
    std::vector<double> out;  // [out_dim]
    // backward scratch
    std::vector<double> d1, dpool, d2, d3, dgap, dh, dout;

    explicit Workspace(const Architecture& a) {
        xp.assign(static_cast<std::size_t>(a.input_len + a.k1 - 1) * a.channels, 0.0);
        a1.resize(static_cast<std::size_t>(a.input_len) * a.c1);
        pool.resize(static_cast<std::size_t>(a.len_pool()) * a.c1);
        argmax.resize(pool.size());
        a2.resize(static_cast<std::size_t>(a.len2()) * a.c2);
        a3.resize(static_cast<std::size_t>(a.len3()) * a.c3);
        gap.resize(a.c3);
        h.resize(a.fc);
        out.resize(a.out_dim);
        d1.resize(a1.size());
        dpool.resize(pool.size());
        d2.resize(a2.size());
        d3.resize(a3.size());
        dgap.resize(a.c3);
        dh.resize(a.fc);
        dout.resize(a.out_dim);
    }
};

void forward_sample(const Architecture& a, const double* prm, const Offsets& o,
                    const double* sample, Workspace& w) {
    const int C = a.channels, L = a.input_len;
    const int pad = a.k1 / 2;
    // zero-padded copy keeps the conv1 inner loop branch-free
    std::fill(w.xp.begin(), w.xp.end(), 0.0);
    std::memcpy(w.xp.data() + static_cast<std::size_t>(pad) * C, sample,
                sizeof(double) * static_cast<std::size_t>(L) * C);

    const double* w1 = prm + o.w1;
    const double* b1 = prm + o.b1;
    for (int t = 0; t < L; ++t) {
        const double* xbase = w.xp.data() + static_cast<std::size_t>(t) * C;
        for (int oc = 0; oc < a.c1; ++oc) {
            const double* wk = w1 + static_cast<std::size_t>(oc) * a.k1 * C;
            double acc = b1[oc];
            for (int k = 0; k < a.k1; ++k) {
                const double* xrow = xbase + static_cast<std::size_t>(k) * C;
                const double* wrow = wk + static_cast<std::size_t>(k) * C;
                for (int c = 0; c < C; ++c) acc += wrow[c] * xrow[c];
            }
            w.a1[static_cast<std::size_t>(t) * a.c1 + oc] = acc > 0.0 ? acc : 0.0;
        }
    }

    const int LP = a.len_pool();
    for (int t = 0; t < LP; ++t)
        for (int oc = 0; oc < a.c1; ++oc) {
            double v0 = w.a1[static_cast<std::size_t>(2 * t) * a.c1 + oc];
            double v1 = w.a1[static_cast<std::size_t>(2 * t + 1) * a.c1 + oc];
            std::size_t at = static_cast<std::size_t>(t) * a.c1 + oc;
            w.pool[at] = v0 >= v1 ? v0 : v1;
            w.argmax[at] = v0 >= v1 ? 2 * t : 2 * t + 1;
        }

    const double* w2 = prm + o.w2;
    const double* b2 = prm + o.b2;
    const int L2 = a.len2();
    for (int t = 0; t < L2; ++t) {
        const double* pbase = w.pool.data() + static_cast<std::size_t>(t) * a.c1;
        for (int oc = 0; oc < a.c2; ++oc) {
            const double* wk = w2 + static_cast<std::size_t>(oc) * a.k2 * a.c1;
            double acc = b2[oc];
            for (int k = 0; k < a.k2; ++k) {
                const double* prow = pbase + static_cast<std::size_t>(k) * a.c1;
                const double* wrow = wk + static_cast<std::size_t>(k) * a.c1;
                for (int c = 0; c < a.c1; ++c) acc += wrow[c] * prow[c];
            }
            w.a2[static_cast<std::size_t>(t) * a.c2 + oc] = acc > 0.0 ? acc : 0.0;
        }
    }

    const double* w3 = prm + o.w3;
    const double* b3 = prm + o.b3;
    const int L3 = a.len3();
    for (int t = 0; t < L3; ++t) {
        const double* abase = w.a2.data() + static_cast<std::size_t>(t) * a.c2;
        for (int oc = 0; oc < a.c3; ++oc) {
            const double* wk = w3 + static_cast<std::size_t>(oc) * a.k3 * a.c2;
            double acc = b3[oc];
            for (int k = 0; k < a.k3; ++k) {
                const double* arow = abase + static_cast<std::size_t>(k) * a.c2;
                const double* wrow = wk + static_cast<std::size_t>(k) * a.c2;
                for (int c = 0; c < a.c2; ++c) acc += wrow[c] * arow[c];
            }
            w.a3[static_cast<std::size_t>(t) * a.c3 + oc] = acc > 0.0 ? acc : 0.0;
        }
    }

    for (int oc = 0; oc < a.c3; ++oc) {
        double acc = 0.0;
        for (int t = 0; t < L3; ++t) acc += w.a3[static_cast<std::size_t>(t) * a.c3 + oc];
        w.gap[oc] = acc / L3;
    }

    const double* wf1 = prm + o.wf1;
    const double* bf1 = prm + o.bf1;
    for (int i = 0; i < a.fc; ++i) {
        const double* row = wf1 + static_cast<std::size_t>(i) * a.c3;
        double acc = bf1[i];
        for (int c = 0; c < a.c3; ++c) acc += row[c] * w.gap[c];
        w.h[i] = acc > 0.0 ? acc : 0.0;
    }

    const double* wf2 = prm + o.wf2;
    const double* bf2 = prm + o.bf2;
    for (int i = 0; i < a.out_dim; ++i) {
        const double* row = wf2 + static_cast<std::size_t>(i) * a.fc;
        double acc = bf2[i];
        for (int c = 0; c < a.fc; ++c) acc += row[c] * w.h[c];
        w.out[i] = acc;
    }
}

// dout must hold dL/d(out); accumulates into grad
void backward_sample(const Architecture& a, const double* prm, const Offsets& o, Workspace& w,
                     double* grad) {
    const double* wf2 = prm + o.wf2;
    std::fill(w.dh.begin(), w.dh.end(), 0.0);
    for (int i = 0; i < a.out_dim; ++i) {
        double d = w.dout[i];
        grad[o.bf2 + i] += d;
        const double* row = wf2 + static_cast<std::size_t>(i) * a.fc;
        double* grow = grad + o.wf2 + static_cast<std::size_t>(i) * a.fc;
        for (int c = 0; c < a.fc; ++c) {
            grow[c] += d * w.h[c];
            w.dh[c] += d * row[c];
        }
    }
    for (int i = 0; i < a.fc; ++i)
        if (w.h[i] <= 0.0) w.dh[i] = 0.0;

    const double* wf1 = prm + o.wf1;
    std::fill(w.dgap.begin(), w.dgap.end(), 0.0);
    for (int i = 0; i < a.fc; ++i) {
        double d = w.dh[i];
        if (d == 0.0) continue;
        grad[o.bf1 + i] += d;
        const double* row = wf1 + static_cast<std::size_t>(i) * a.c3;
        double* grow = grad + o.wf1 + static_cast<std::size_t>(i) * a.c3;
        for (int c = 0; c < a.c3; ++c) {
            grow[c] += d * w.gap[c];
            w.dgap[c] += d * row[c];
        }
    }

    const int L3 = a.len3();
    for (int t = 0; t < L3; ++t)
        for (int oc = 0; oc < a.c3; ++oc) {
            std::size_t at = static_cast<std::size_t>(t) * a.c3 + oc;
            w.d3[at] = (w.a3[at] > 0.0) ? w.dgap[oc] / L3 : 0.0;
        }

    const double* w3 = prm + o.w3;
    std::fill(w.d2.begin(), w.d2.end(), 0.0);
    for (int t = 0; t < L3; ++t) {
        const double* abase = w.a2.data() + static_cast<std::size_t>(t) * a.c2;
        double* dbase = w.d2.data() + static_cast<std::size_t>(t) * a.c2;
        for (int oc = 0; oc < a.c3; ++oc) {
            double d = w.d3[static_cast<std::size_t>(t) * a.c3 + oc];
            if (d == 0.0) continue;
            grad[o.b3 + oc] += d;
            const double* wk = w3 + static_cast<std::size_t>(oc) * a.k3 * a.c2;
            double* gk = grad + o.w3 + static_cast<std::size_t>(oc) * a.k3 * a.c2;
            for (int k = 0; k < a.k3; ++k) {
                const double* arow = abase + static_cast<std::size_t>(k) * a.c2;
                const double* wrow = wk + static_cast<std::size_t>(k) * a.c2;
                double* grow = gk + static_cast<std::size_t>(k) * a.c2;
                double* drow = dbase + static_cast<std::size_t>(k) * a.c2;
                for (int c = 0; c < a.c2; ++c) {
                    grow[c] += d * arow[c];
                    drow[c] += d * wrow[c];
                }
            }
        }
    }

    const int L2 = a.len2();
    for (std::size_t i = 0; i < w.a2.size(); ++i)
        if (w.a2[i] <= 0.0) w.d2[i] = 0.0;

    const double* w2 = prm + o.w2;
    std::fill(w.dpool.begin(), w.dpool.end(), 0.0);
    for (int t = 0; t < L2; ++t) {
        const double* pbase = w.pool.data() + static_cast<std::size_t>(t) * a.c1;
        double* dbase = w.dpool.data() + static_cast<std::size_t>(t) * a.c1;
        for (int oc = 0; oc < a.c2; ++oc) {
            double d = w.d2[static_cast<std::size_t>(t) * a.c2 + oc];
            if (d == 0.0) continue;
            grad[o.b2 + oc] += d;
            const double* wk = w2 + static_cast<std::size_t>(oc) * a.k2 * a.c1;
            double* gk = grad + o.w2 + static_cast<std::size_t>(oc) * a.k2 * a.c1;
            for (int k = 0; k < a.k2; ++k) {
                const double* prow = pbase + static_cast<std::size_t>(k) * a.c1;
                const double* wrow = wk + static_cast<std::size_t>(k) * a.c1;
                double* grow = gk + static_cast<std::size_t>(k) * a.c1;
                double* drow = dbase + static_cast<std::size_t>(k) * a.c1;
                for (int c = 0; c < a.c1; ++c) {
                    grow[c] += d * prow[c];
                    drow[c] += d * wrow[c];
                }
            }
        }
    }

    std::fill(w.d1.begin(), w.d1.end(), 0.0);
    const int LP = a.len_pool();
    for (int t = 0; t < LP; ++t)
        for (int oc = 0; oc < a.c1; ++oc) {
            std::size_t at = static_cast<std::size_t>(t) * a.c1 + oc;
            w.d1[static_cast<std::size_t>(w.argmax[at]) * a.c1 + oc] = w.dpool[at];
        }
    for (std::size_t i = 0; i < w.a1.size(); ++i)
        if (w.a1[i] <= 0.0) w.d1[i] = 0.0;

    const int C = a.channels, L = a.input_len;
    for (int t = 0; t < L; ++t) {
        const double* xbase = w.xp.data() + static_cast<std::size_t>(t) * C;
        for (int oc = 0; oc < a.c1; ++oc) {
            double d = w.d1[static_cast<std::size_t>(t) * a.c1 + oc];
            if (d == 0.0) continue;
            grad[o.b1 + oc] += d;
            double* gk = grad + o.w1 + static_cast<std::size_t>(oc) * a.k1 * C;
            for (int k = 0; k < a.k1; ++k) {
                const double* xrow = xbase + static_cast<std::size_t>(k) * C;
                double* grow = gk + static_cast<std::size_t>(k) * C;
                for (int c = 0; c < C; ++c) grow[c] += d * xrow[c];
            }
        }
    }
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace

std::size_t Architecture::param_count() const { return offsets_for(*this).total; }

RegressorModel::RegressorModel(int channels, int input_len, int out_dim) {
    if (channels < 1 || input_len < 8 || input_len % 2 != 0 || out_dim < 1)
        fail(errc::config, "bad regressor shape");
    arch_.channels = channels;
    arch_.input_len = input_len;
    arch_.out_dim = out_dim;
    params_.assign(arch_.param_count(), 0.0);
}

void RegressorModel::init_params(std::uint64_t seed) {
    Rng rng(seed);
    Offsets o = offsets_for(arch_);
    // fan-in scaled uniform for weights and biases alike
    auto fill = [&](std::size_t begin, std::size_t end, int fan_in) {
        double s = std::sqrt(1.0 / fan_in);
        for (std::size_t i = begin; i < end; ++i) params_[i] = rng.uniform(-s, s);
    };
    fill(o.w1, o.w2, arch_.k1 * arch_.channels);
    fill(o.w2, o.w3, arch_.k2 * arch_.c1);
    fill(o.w3, o.wf1, arch_.k3 * arch_.c2);
    fill(o.wf1, o.wf2, arch_.c3);
    fill(o.wf2, o.total, arch_.fc);
}

std::vector<double> RegressorModel::forward(const double* batch, std::size_t batch_size) const {
    const Architecture& a = arch_;
    Offsets o = offsets_for(a);
    std::vector<double> out(batch_size * a.out_dim);
    const std::size_t stride = static_cast<std::size_t>(a.input_len) * a.channels;
#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        Workspace w(a);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (long long i = 0; i < static_cast<long long>(batch_size); ++i) {
            forward_sample(a, params_.data(), o, batch + i * stride, w);
            std::copy(w.out.begin(), w.out.end(), out.begin() + i * a.out_dim);
        }
    }
    return out;
}

std::vector<double> RegressorModel::forward(const WindowDataset& ds) const {
    if (ds.window_len != arch_.input_len || ds.channels != arch_.channels)
        fail(errc::shape_mismatch, "dataset shape does not match the model input");
    return forward(ds.inputs.data(), ds.count);
}

double RegressorModel::forward_backward(const double* batch, const double* targets_norm,
                                        std::size_t batch_size, std::vector<double>& grad) const {
    const Architecture& a = arch_;
    Offsets o = offsets_for(a);
    grad.assign(o.total, 0.0);
    const std::size_t stride = static_cast<std::size_t>(a.input_len) * a.channels;
    const double inv = 1.0 / (static_cast<double>(batch_size) * a.out_dim);

    int T = thread_count();
    std::vector<std::vector<double>> tgrad(T);
    std::vector<double> tloss(T, 0.0);
#ifdef _OPENMP
#pragma omp parallel num_threads(T)
#endif
    {
#ifdef _OPENMP
        int tid = omp_get_thread_num();
#else
        int tid = 0;
#endif
        tgrad[tid].assign(o.total, 0.0);
        Workspace w(a);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (long long i = 0; i < static_cast<long long>(batch_size); ++i) {
            forward_sample(a, params_.data(), o, batch + i * stride, w);
            double sample_loss = 0.0;
            for (int d = 0; d < a.out_dim; ++d) {
                double diff = w.out[d] - targets_norm[i * a.out_dim + d];
                sample_loss += diff * diff;
                w.dout[d] = 2.0 * diff * inv;
            }
            tloss[tid] += sample_loss;
            backward_sample(a, params_.data(), o, w, tgrad[tid].data());
        }
    }
    // fixed reduction order keeps runs bit-identical for a given thread count
    double loss = 0.0;
    for (int t = 0; t < T; ++t) {
        loss += tloss[t];
        if (!tgrad[t].empty())
            for (std::size_t i = 0; i < o.total; ++i) grad[i] += tgrad[t][i];
    }
    return loss * inv;
}

double RegressorModel::normalize_target(double cm, int dim) const {
    double lo = ranges_[dim][0], hi = ranges_[dim][1];
    return hi > lo ? (cm - lo) / (hi - lo) : cm;
}

double RegressorModel::denormalize_target(double norm, int dim) const {
    double lo = ranges_[dim][0], hi = ranges_[dim][1];
    return hi > lo ? lo + norm * (hi - lo) : norm;
}

std::vector<double> RegressorModel::predict_primitives(const WindowDataset& ds) const {
    std::vector<double> out = forward(ds);
    for (std::size_t i = 0; i < ds.count; ++i)
        for (int d = 0; d < arch_.out_dim; ++d)
            out[i * arch_.out_dim + d] = denormalize_target(out[i * arch_.out_dim + d], d);
    return out;
}

std::uint64_t RegressorModel::param_checksum() const {
    std::uint64_t h = 14695981039346656037ull;
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(params_.data());
    for (std::size_t i = 0; i < params_.size() * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

namespace {
constexpr std::uint32_t kModelMagic = 0x5243'5846u; // "FXCR"
constexpr std::uint32_t kModelVersion = 1;
} // namespace

void RegressorModel::save(const std::string& path) const {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) fail(errc::io, "cannot write " + tmp);
        auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
        auto put_i32 = [&](std::int32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
        put_u32(kModelMagic);
        put_u32(kModelVersion);
        put_i32(arch_.input_len);
        put_i32(arch_.channels);
        put_i32(arch_.out_dim);
        put_i32(arch_.c1);
        put_i32(arch_.k1);
        put_i32(arch_.c2);
        put_i32(arch_.k2);
        put_i32(arch_.c3);
        put_i32(arch_.k3);
        put_i32(arch_.fc);
        for (const auto& r : ranges_)
            out.write(reinterpret_cast<const char*>(r.data()), 2 * sizeof(double));
        std::uint64_t count = params_.size();
        out.write(reinterpret_cast<char*>(&count), 8);
        out.write(reinterpret_cast<const char*>(params_.data()), count * sizeof(double));
        std::uint64_t ck = param_checksum();
        out.write(reinterpret_cast<char*>(&ck), 8);
        if (!out) fail(errc::io, "write failed: " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(errc::io, "rename failed: " + path);
}

RegressorModel RegressorModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::io, "cannot open " + path);
    auto get_u32 = [&]() {
        std::uint32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    auto get_i32 = [&]() {
        std::int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    if (get_u32() != kModelMagic) fail(errc::version_mismatch, path + ": not a model file");
    if (get_u32() != kModelVersion) fail(errc::version_mismatch, path + ": unsupported version");
    Architecture a;
    a.input_len = get_i32();
    a.channels = get_i32();
    a.out_dim = get_i32();
    a.c1 = get_i32();
    a.k1 = get_i32();
    a.c2 = get_i32();
    a.k2 = get_i32();
    a.c3 = get_i32();
    a.k3 = get_i32();
    a.fc = get_i32();
    if (!in) fail(errc::corrupt_file, path + ": truncated header");
    RegressorModel m;
    m.arch_ = a;
    for (auto& r : m.ranges_) in.read(reinterpret_cast<char*>(r.data()), 2 * sizeof(double));
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 8);
    if (!in) fail(errc::corrupt_file, path + ": truncated header");
    if (count != a.param_count())
        fail(errc::version_mismatch,
             path + ": header layer sizes disagree with the parameter payload");
    m.params_.resize(count);
    in.read(reinterpret_cast<char*>(m.params_.data()), count * sizeof(double));
    std::uint64_t ck = 0;
    in.read(reinterpret_cast<char*>(&ck), 8);
    if (!in) fail(errc::corrupt_file, path + ": truncated payload");
    if (ck != m.param_checksum()) fail(errc::corrupt_file, path + ": checksum mismatch");
    return m;
}

double backward_check(const RegressorModel& model, const double* batch,
                      const double* targets_norm, std::size_t batch_size, double eps,
                      int num_params, std::uint64_t seed) {
    if (eps <= 0.0) fail(errc::config, "eps must be positive");
    RegressorModel probe = model;
    std::vector<double> grad;
    probe.forward_backward(batch, targets_norm, batch_size, grad);

    auto loss_at = [&]() {
        std::vector<double> g;
        return probe.forward_backward(batch, targets_norm, batch_size, g);
    };
    Rng rng(seed);
    double worst = 0.0;
    for (int trial = 0; trial < num_params; ++trial) {
        std::size_t idx = static_cast<std::size_t>(rng.uniform_index(probe.param_count()));
        double saved = probe.params()[idx];
        probe.params()[idx] = saved + eps;
        double lp = loss_at();
        probe.params()[idx] = saved - eps;
        double lm = loss_at();
        probe.params()[idx] = saved;
        double numeric = (lp - lm) / (2.0 * eps);
        double denom = std::max({std::fabs(numeric), std::fabs(grad[idx]), 1e-8});
        worst = std::max(worst, std::fabs(numeric - grad[idx]) / denom);
    }
    return worst;
}

double TrainConfig::lr_at_epoch(int epoch) const {
    return lr0 * std::pow(lr_decay, epoch / decay_every_epochs);
}

std::string TrainReport::to_json() const {
    nlohmann::json j;
    j["train_loss"] = train_loss;
    j["val_loss"] = val_loss;
    j["lr"] = lr;
    j["best_epoch"] = best_epoch;
    j["best_val_loss"] = best_val_loss;
    j["param_checksum"] = param_checksum;
    j["wall_s"] = wall_s;
    j["stopped"] = stopped;
    j["train_windows"] = train_windows;
    j["val_windows"] = val_windows;
    return j.dump(2);
}

TrainReport train(RegressorModel& model, const WindowDataset& train_set,
                  const WindowDataset& val_set, const TrainConfig& cfg, TrainReport* report_out) {
    if (train_set.count == 0 || val_set.count == 0)
        fail(errc::config, "train and validation sets must be non-empty");
    if (train_set.channels != model.arch().channels)
        fail(errc::shape_mismatch, "dataset channels do not match the model");
    auto t0 = std::chrono::steady_clock::now();

    const Architecture& a = model.arch();
    const std::size_t stride = static_cast<std::size_t>(a.input_len) * a.channels;
    auto norm_targets = [&](const WindowDataset& ds) {
        std::vector<double> t(ds.count * a.out_dim);
        for (std::size_t i = 0; i < ds.count; ++i)
            for (int d = 0; d < a.out_dim; ++d)
                t[i * a.out_dim + d] = model.normalize_target(ds.target(i)[d], d);
        return t;
    };
    std::vector<double> train_t = norm_targets(train_set);
    std::vector<double> val_t = norm_targets(val_set);

    auto eval_loss = [&](const WindowDataset& ds, const std::vector<double>& t) {
        std::vector<double> pred = model.forward(ds);
        double s = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            double diff = pred[i] - t[i];
            s += diff * diff;
        }
        return s / static_cast<double>(pred.size());
    };

    std::vector<double> m_adam(model.param_count(), 0.0), v_adam(model.param_count(), 0.0);
    std::vector<double> grad;
    std::vector<std::size_t> order(train_set.count);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainReport rep;
    rep.train_windows = train_set.count;
    rep.val_windows = val_set.count;
    rep.best_val_loss = 1e300;
    std::vector<double> best_params = model.params();
    std::vector<double> batch_in(cfg.batch_size * stride);
    std::vector<double> batch_t(cfg.batch_size * a.out_dim);
    long long adam_t = 0;

    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        Rng shuffle_rng(cfg.seed ^ (0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(order);
        double lr = cfg.lr_at_epoch(epoch);
        double epoch_loss = 0.0;
        for (std::size_t b0 = 0; b0 < train_set.count; b0 += cfg.batch_size) {
            std::size_t bn = std::min(cfg.batch_size, train_set.count - b0);
            for (std::size_t i = 0; i < bn; ++i) {
                std::size_t src = order[b0 + i];
                std::copy(train_set.inputs.begin() + src * stride,
                          train_set.inputs.begin() + (src + 1) * stride,
                          batch_in.begin() + i * stride);
                std::copy(train_t.begin() + src * a.out_dim,
                          train_t.begin() + (src + 1) * a.out_dim,
                          batch_t.begin() + i * a.out_dim);
            }
            double loss = model.forward_backward(batch_in.data(), batch_t.data(), bn, grad);
            if (!std::isfinite(loss)) {
                rep.stopped = "diverged";
                if (report_out) *report_out = rep;
                fail(errc::diverged, "training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch));
            }
            epoch_loss += loss * static_cast<double>(bn);
            ++adam_t;
            double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
            double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
            auto& prm = model.params();
            for (std::size_t i = 0; i < prm.size(); ++i) {
                double g = grad[i];
                m_adam[i] = cfg.adam_beta1 * m_adam[i] + (1.0 - cfg.adam_beta1) * g;
                v_adam[i] = cfg.adam_beta2 * v_adam[i] + (1.0 - cfg.adam_beta2) * g * g;
                double mh = m_adam[i] / bc1;
                double vh = v_adam[i] / bc2;
                prm[i] -= lr * mh / (std::sqrt(vh) + cfg.adam_eps);
            }
        }
        epoch_loss /= static_cast<double>(train_set.count);
        double vloss = eval_loss(val_set, val_t);
        rep.train_loss.push_back(epoch_loss);
        rep.val_loss.push_back(vloss);
        rep.lr.push_back(lr);
        if (vloss < rep.best_val_loss) {
            rep.best_val_loss = vloss;
            rep.best_epoch = epoch;
            best_params = model.params();
        }
        if (epoch - rep.best_epoch >= cfg.early_stop_patience) {
            rep.stopped = "early";
            break;
        }
    }
    if (rep.stopped.empty()) rep.stopped = "max_epochs";
    model.params() = best_params;
    rep.param_checksum = model.param_checksum();
    rep.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (report_out) *report_out = rep;
    return rep;
}

TrainEvalData build_datasets(const std::vector<SessionRecording>& sessions,
                             const std::vector<PrimitiveSeries>& primitives, double val_frac) {
    if (sessions.size() != primitives.size())
        fail(errc::config, "sessions and primitive series differ in count");
    SessionSplit split = split_sessions(sessions.size());
    TrainEvalData out;
    for (std::size_t idx : split.train) {
        NormalizationStats stats;
        SessionRecording norm = normalize(sessions[idx], &stats);
        out.train.append(make_windows(norm, primitives[idx]));
        out.norm_stats.push_back(stats);
        out.session_ids.push_back(sessions[idx].id);
    }
    {
        NormalizationStats stats;
        SessionRecording norm = normalize(sessions[split.test], &stats);
        out.test = make_windows(norm, primitives[split.test]);
        out.norm_stats.push_back(stats);
        out.session_ids.push_back(sessions[split.test].id);
    }
    std::size_t val_n = std::max<std::size_t>(1, static_cast<std::size_t>(out.train.count * val_frac));
    std::size_t train_n = out.train.count - val_n;
    out.val = out.train.slice(train_n, out.train.count);
    out.train = out.train.slice(0, train_n);
    return out;
}

} // namespace fxc
