#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "yodar/geometry.hpp"

namespace yodar {

struct RadarPoint {
    double range_m = 0.0;        // forward distance of the reflection
    double proj_height_px = 0.0; // image row after projection
    double v_lat = 0.0;          // relative lateral velocity, m/s
    double v_long = 0.0;         // relative longitudinal velocity, m/s
    double column_px = 0.0;      // projection column, used only for slice assignment
};

// Network input: slices x time steps x features, all-zero where no point fell.
struct RadarTensor {
    int n_s = 160;
    int n_t = 3;
    int n_f = 4;
    std::vector<double> data;  // (s, t, f) row-major

    RadarTensor() = default;
    RadarTensor(int ns, int nt, int nf)
        : n_s(ns), n_t(nt), n_f(nf),
          data(static_cast<std::size_t>(ns) * nt * nf, 0.0) {}

    double& at(int s, int t, int f) {
        return data[(static_cast<std::size_t>(s) * n_t + t) * n_f + f];
    }
    double at(int s, int t, int f) const {
        return data[(static_cast<std::size_t>(s) * n_t + t) * n_f + f];
    }
};

// Frames ordered oldest -> current, exactly n_t of them. When several points
// land in one slice the nearest (smallest range) wins. Points projecting
// outside the image are dropped.
RadarTensor build_input_tensor(const std::vector<std::vector<RadarPoint>>& frames,
                               const ImageGrid& grid, int n_t = 3, int n_f = 4);

// Per-slice occupancy probabilities, each strictly inside (0,1).
using SliceProbs = std::vector<double>;

// Maximal contiguous run of slices with probability >= T_g (1-indexed, inclusive).
struct SliceBundle {
    int first = 0;
    int last = 0;
};

std::vector<SliceBundle> extract_bundles(const SliceProbs& y, double t_g);

// Eq-style weighted binary cross-entropy, summed over slices:
//   sum_s  -alpha * t_s * log(y_s) - (1 - t_s) * log(1 - y_s)
double slice_bce(const std::vector<std::uint8_t>& t, const SliceProbs& y, double alpha);

struct NetConfig {
    int n_s = 160;
    int n_t = 3;
    int n_f = 4;
    int base_channels = 16;   // conv blocks emit base, 2*base, 4*base channels
    int conv_kernel = 5;
    int deconv_kernel = 4;
    double leaky_slope = 0.1;
    double bn_momentum = 0.9;
    double bn_eps = 1e-5;
};

struct TrainPhase {
    int epochs = 0;
    double learning_rate = 0.0;
};

struct TrainSchedule {
    std::vector<TrainPhase> phases{{20, 1e-3}, {10, 1e-4}, {10, 1e-5}};
    int batch_size = 128;
    double weight_decay = 3e-4;
    double alpha = 4.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Named view of one parameter tensor; `decay` marks weights that take the
// L2 penalty (kernels and dense weights, not biases or batch-norm params).
struct ParamRef {
    std::string name;
    std::vector<int> shape;
    std::vector<double>* values;
    bool decay;
};

// Dense activations, (sample, channel, position) row-major.
struct Act {
    int n = 0, c = 0, l = 0;
    std::vector<double> v;

    Act() = default;
    Act(int n_, int c_, int l_)
        : n(n_), c(c_), l(l_), v(static_cast<std::size_t>(n_) * c_ * l_, 0.0) {}
    double& at(int i, int ch, int p) {
        return v[(static_cast<std::size_t>(i) * c + ch) * l + p];
    }
    double at(int i, int ch, int p) const {
        return v[(static_cast<std::size_t>(i) * c + ch) * l + p];
    }
};

namespace detail {

struct Conv1D {
    std::string name;
    int cin = 0, cout = 0, k = 0, stride = 1, pad = 0;
    std::vector<double> w, b, gw, gb;
    Act in_cache;

    void init(std::string nm, int cin_, int cout_, int k_, int stride_, int pad_);
    Act forward(const Act& in, bool cache);
    Act backward(const Act& dout);
    int out_len(int in_len) const { return (in_len + 2 * pad - k) / stride + 1; }
};

struct Deconv1D {
    std::string name;
    int cin = 0, cout = 0, k = 0, stride = 2, pad = 1;
    std::vector<double> w, b, gw, gb;  // w indexed (cin, cout, k)
    Act in_cache;

    void init(std::string nm, int cin_, int cout_, int k_, int stride_, int pad_);
    Act forward(const Act& in, bool cache);
    Act backward(const Act& dout);
    int out_len(int in_len) const { return (in_len - 1) * stride - 2 * pad + k; }
};

struct BatchNorm1D {
    std::string name;
    int c = 0;
    double momentum = 0.9, eps = 1e-5;
    std::vector<double> gamma, beta, run_mean, run_var;
    std::vector<double> ggamma, gbeta;
    Act xhat_cache;
    std::vector<double> invstd_cache;

    void init(std::string nm, int c_, double momentum_, double eps_);
    Act forward(const Act& in, bool train, bool update_running, bool cache);
    Act backward(const Act& dout);
};

struct LeakyReLU {
    double slope = 0.1;
    Act in_cache;

    Act forward(const Act& in, bool cache);
    Act backward(const Act& dout) const;
};

struct Dense {
    std::string name;
    int cin = 0, cout = 0;
    std::vector<double> w, b, gw, gb;
    Act in_cache;

    void init(std::string nm, int cin_, int cout_);
    Act forward(const Act& in, bool cache);
    Act backward(const Act& dout);
};

}  // namespace detail

// FCN-8-style 1D segmentation network: three stride-2 conv blocks
// (160->80->40->20 on the slice axis), three stride-2 deconv blocks back to
// 160 with channelwise skip concatenations from the matching conv blocks,
// a stride-1 conv block, then flatten + dense + sigmoid.
class RadarNet {
public:
    explicit RadarNet(const NetConfig& cfg);

    const NetConfig& config() const { return cfg_; }

    // Glorot-uniform kernels, zero biases, identity batch-norm.
    void init_weights(std::uint64_t seed);

    // Fixed-order enumeration of every parameter tensor (serialization, Adam).
    std::vector<ParamRef> params();

    // Per-feature input standardization, estimated on the training set and
    // persisted with the weights.
    std::array<double, 4> feat_mean{0.0, 0.0, 0.0, 0.0};
    std::array<double, 4> feat_std{1.0, 1.0, 1.0, 1.0};

    // Inference with running batch-norm statistics; pure, thread-safe.
    SliceProbs infer(const RadarTensor& x) const;

    // Batch objective: mean over samples of slice_bce plus the L2 penalty.
    // Train-mode batch statistics; never touches running stats.
    double training_loss(const std::vector<const RadarTensor*>& xs,
                         const std::vector<const std::vector<std::uint8_t>*>& ts,
                         double alpha, double weight_decay);

    // Exact gradient of training_loss for every parameter, in params() order.
    // data_loss_out gets the BCE part only (no penalty).
    std::vector<std::vector<double>> training_gradients(
        const std::vector<const RadarTensor*>& xs,
        const std::vector<const std::vector<std::uint8_t>*>& ts, double alpha,
        double weight_decay, bool update_running, double& data_loss_out);

    Act assemble_input(const std::vector<const RadarTensor*>& xs) const;

private:
    SliceProbs forward_train(const Act& x);  // caches activations for backward
    std::vector<std::vector<double>> collect_gradients();
    void zero_gradients();

    NetConfig cfg_;
    detail::Conv1D c1_, c2_, c3_, c4_;
    detail::Deconv1D d1_, d2_, d3_;
    detail::BatchNorm1D bn1_, bn2_, bn3_, bn4_, bnd1_, bnd2_, bnd3_;
    detail::LeakyReLU r1_, r2_, r3_, r4_, rd1_, rd2_, rd3_;
    detail::Dense head_;

    // training caches
    Act a1_, a2_, probs_cache_;
    bool update_running_ = false;

    friend struct RadarNetTestAccess;
};

struct TrainResult {
    std::vector<double> epoch_loss;  // mean per-sample BCE per epoch
};

// Runs the phase schedule with Adam (0.9 / 0.999 / 1e-8), per-epoch seeded
// shuffling; initializes weights and input standardization from the schedule
// seed. Deterministic: same inputs, bit-identical weights.
TrainResult train(RadarNet& net,
                  const std::vector<std::pair<RadarTensor, std::vector<std::uint8_t>>>& dataset,
                  const TrainSchedule& sched);

}  // namespace yodar
