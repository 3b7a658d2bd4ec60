#include "yodar/radarnet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "yodar/errors.hpp"
#include "yodar/rng.hpp"

namespace yodar {

RadarTensor build_input_tensor(const std::vector<std::vector<RadarPoint>>& frames,
                               const ImageGrid& grid, int n_t, int n_f) {
    if (static_cast<int>(frames.size()) != n_t)
        throw DataError("build_input_tensor: expected " + std::to_string(n_t) + " frames, got " +
                        std::to_string(frames.size()));
    RadarTensor x(grid.n_slices, n_t, n_f);
    double sw = grid.slice_width();
    // chosen range per (slice, frame); nearest point wins
    std::vector<double> best(static_cast<std::size_t>(grid.n_slices) * n_t,
                             std::numeric_limits<double>::infinity());
    for (int t = 0; t < n_t; ++t) {
        for (const RadarPoint& p : frames[t]) {
            if (p.column_px < 0.0 || p.column_px >= grid.width_px) continue;
            int s = static_cast<int>(p.column_px / sw);
            if (s < 0 || s >= grid.n_slices) continue;
            double& cur = best[static_cast<std::size_t>(s) * n_t + t];
            if (p.range_m < cur) {
                cur = p.range_m;
                x.at(s, t, 0) = p.range_m;
                x.at(s, t, 1) = p.proj_height_px;
                x.at(s, t, 2) = p.v_lat;
                x.at(s, t, 3) = p.v_long;
            }
        }
    }
    return x;
}

std::vector<SliceBundle> extract_bundles(const SliceProbs& y, double t_g) {
    if (!(t_g > 0.0 && t_g < 1.0)) throw DomainError("extract_bundles: t_g must be in (0,1)");
    std::vector<SliceBundle> out;
    int n = static_cast<int>(y.size());
    int start = -1;
    for (int s = 0; s < n; ++s) {
        bool on = y[static_cast<std::size_t>(s)] >= t_g;
        if (on && start < 0) start = s;
        if (!on && start >= 0) {
            out.push_back({start + 1, s});
            start = -1;
        }
    }
    if (start >= 0) out.push_back({start + 1, n});
    return out;
}

double slice_bce(const std::vector<std::uint8_t>& t, const SliceProbs& y, double alpha) {
    if (t.size() != y.size()) throw DataError("slice_bce: length mismatch");
    double acc = 0.0;
    for (std::size_t s = 0; s < y.size(); ++s) {
        double ys = y[s];
        if (!(ys > 0.0 && ys < 1.0)) throw DomainError("slice_bce: probability outside (0,1)");
        if (t[s])
            acc -= alpha * std::log(ys);
        else
            acc -= std::log(1.0 - ys);
    }
    return acc;
}

void TrainSchedule::validate() const {
    if (phases.empty()) throw ConfigError("TrainSchedule: no phases");
    for (const TrainPhase& p : phases)
        if (p.epochs <= 0 || p.learning_rate < 0.0)
            throw ConfigError("TrainSchedule: epochs must be positive, learning rate >= 0");
    if (batch_size <= 0) throw ConfigError("TrainSchedule: batch_size must be positive");
    if (alpha <= 0.0) throw ConfigError("TrainSchedule: alpha must be positive");
}

namespace detail {

namespace {

void check_channels(const std::string& name, int expected, const Act& in) {
    if (in.c != expected)
        throw ShapeError(name + ": expected " + std::to_string(expected) + " input channels, got " +
                         std::to_string(in.c));
}

}  // namespace

void Conv1D::init(std::string nm, int cin_, int cout_, int k_, int stride_, int pad_) {
    name = std::move(nm);
    cin = cin_;
    cout = cout_;
    k = k_;
    stride = stride_;
    pad = pad_;
    w.assign(static_cast<std::size_t>(cout) * cin * k, 0.0);
    b.assign(static_cast<std::size_t>(cout), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

Act Conv1D::forward(const Act& in, bool cache) {
    check_channels(name, cin, in);
    if (cache) in_cache = in;
    Act out(in.n, cout, out_len(in.l));
    for (int i = 0; i < in.n; ++i)
        for (int o = 0; o < cout; ++o) {
            for (int p = 0; p < out.l; ++p) out.at(i, o, p) = b[static_cast<std::size_t>(o)];
            for (int c = 0; c < cin; ++c) {
                const double* wrow = &w[(static_cast<std::size_t>(o) * cin + c) * k];
                for (int p = 0; p < out.l; ++p) {
                    int base = p * stride - pad;
                    double acc = 0.0;
                    int kk0 = std::max(0, -base);
                    int kk1 = std::min(k, in.l - base);
                    for (int kk = kk0; kk < kk1; ++kk) acc += wrow[kk] * in.at(i, c, base + kk);
                    out.at(i, o, p) += acc;
                }
            }
        }
    return out;
}

Act Conv1D::backward(const Act& dout) {
    const Act& in = in_cache;
    Act din(in.n, in.c, in.l);
    for (int i = 0; i < in.n; ++i)
        for (int o = 0; o < cout; ++o) {
            for (int p = 0; p < dout.l; ++p) gb[static_cast<std::size_t>(o)] += dout.at(i, o, p);
            for (int c = 0; c < cin; ++c) {
                double* gwrow = &gw[(static_cast<std::size_t>(o) * cin + c) * k];
                const double* wrow = &w[(static_cast<std::size_t>(o) * cin + c) * k];
                for (int p = 0; p < dout.l; ++p) {
                    int base = p * stride - pad;
                    double g = dout.at(i, o, p);
                    int kk0 = std::max(0, -base);
                    int kk1 = std::min(k, in.l - base);
                    for (int kk = kk0; kk < kk1; ++kk) {
                        gwrow[kk] += g * in.at(i, c, base + kk);
                        din.at(i, c, base + kk) += g * wrow[kk];
                    }
                }
            }
        }
    return din;
}

void Deconv1D::init(std::string nm, int cin_, int cout_, int k_, int stride_, int pad_) {
    name = std::move(nm);
    cin = cin_;
    cout = cout_;
    k = k_;
    stride = stride_;
    pad = pad_;
    w.assign(static_cast<std::size_t>(cin) * cout * k, 0.0);
    b.assign(static_cast<std::size_t>(cout), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

Act Deconv1D::forward(const Act& in, bool cache) {
    check_channels(name, cin, in);
    if (cache) in_cache = in;
    Act out(in.n, cout, out_len(in.l));
    for (int i = 0; i < in.n; ++i) {
        for (int o = 0; o < cout; ++o)
            for (int q = 0; q < out.l; ++q) out.at(i, o, q) = b[static_cast<std::size_t>(o)];
        for (int c = 0; c < cin; ++c)
            for (int t = 0; t < in.l; ++t) {
                double x = in.at(i, c, t);
                if (x == 0.0) continue;
                int base = t * stride - pad;
                for (int o = 0; o < cout; ++o) {
                    const double* wrow = &w[(static_cast<std::size_t>(c) * cout + o) * k];
                    int kk0 = std::max(0, -base);
                    int kk1 = std::min(k, out.l - base);
                    for (int kk = kk0; kk < kk1; ++kk) out.at(i, o, base + kk) += x * wrow[kk];
                }
            }
    }
    return out;
}

Act Deconv1D::backward(const Act& dout) {
    const Act& in = in_cache;
    Act din(in.n, in.c, in.l);
    for (int i = 0; i < in.n; ++i) {
        for (int o = 0; o < cout; ++o)
            for (int q = 0; q < dout.l; ++q) gb[static_cast<std::size_t>(o)] += dout.at(i, o, q);
        for (int c = 0; c < cin; ++c)
            for (int t = 0; t < in.l; ++t) {
                int base = t * stride - pad;
                double x = in.at(i, c, t);
                double acc = 0.0;
                for (int o = 0; o < cout; ++o) {
                    const double* wrow = &w[(static_cast<std::size_t>(c) * cout + o) * k];
                    double* gwrow = &gw[(static_cast<std::size_t>(c) * cout + o) * k];
                    int kk0 = std::max(0, -base);
                    int kk1 = std::min(k, dout.l - base);
                    for (int kk = kk0; kk < kk1; ++kk) {
                        double g = dout.at(i, o, base + kk);
                        gwrow[kk] += g * x;
                        acc += g * wrow[kk];
                    }
                }
                din.at(i, c, t) = acc;
            }
    }
    return din;
}

void BatchNorm1D::init(std::string nm, int c_, double momentum_, double eps_) {
    name = std::move(nm);
    c = c_;
    momentum = momentum_;
    eps = eps_;
    gamma.assign(static_cast<std::size_t>(c), 1.0);
    beta.assign(static_cast<std::size_t>(c), 0.0);
    run_mean.assign(static_cast<std::size_t>(c), 0.0);
    run_var.assign(static_cast<std::size_t>(c), 1.0);
    ggamma.assign(static_cast<std::size_t>(c), 0.0);
    gbeta.assign(static_cast<std::size_t>(c), 0.0);
}

Act BatchNorm1D::forward(const Act& in, bool train, bool update_running, bool cache) {
    check_channels(name, c, in);
    Act out(in.n, in.c, in.l);
    if (!train) {
        for (int ch = 0; ch < c; ++ch) {
            double inv = 1.0 / std::sqrt(run_var[static_cast<std::size_t>(ch)] + eps);
            double g = gamma[static_cast<std::size_t>(ch)];
            double bb = beta[static_cast<std::size_t>(ch)];
            double m = run_mean[static_cast<std::size_t>(ch)];
            for (int i = 0; i < in.n; ++i)
                for (int p = 0; p < in.l; ++p) out.at(i, ch, p) = g * (in.at(i, ch, p) - m) * inv + bb;
        }
        return out;
    }
    double n_elems = static_cast<double>(in.n) * in.l;
    if (cache) {
        xhat_cache = Act(in.n, in.c, in.l);
        invstd_cache.assign(static_cast<std::size_t>(c), 0.0);
    }
    for (int ch = 0; ch < c; ++ch) {
        double mean = 0.0;
        for (int i = 0; i < in.n; ++i)
            for (int p = 0; p < in.l; ++p) mean += in.at(i, ch, p);
        mean /= n_elems;
        double var = 0.0;
        for (int i = 0; i < in.n; ++i)
            for (int p = 0; p < in.l; ++p) {
                double d = in.at(i, ch, p) - mean;
                var += d * d;
            }
        var /= n_elems;  // population variance, also what the running stats store
        double inv = 1.0 / std::sqrt(var + eps);
        double g = gamma[static_cast<std::size_t>(ch)];
        double bb = beta[static_cast<std::size_t>(ch)];
        for (int i = 0; i < in.n; ++i)
            for (int p = 0; p < in.l; ++p) {
                double xh = (in.at(i, ch, p) - mean) * inv;
                if (cache) xhat_cache.at(i, ch, p) = xh;
                out.at(i, ch, p) = g * xh + bb;
            }
        if (cache) invstd_cache[static_cast<std::size_t>(ch)] = inv;
        if (update_running) {
            run_mean[static_cast<std::size_t>(ch)] =
                momentum * run_mean[static_cast<std::size_t>(ch)] + (1.0 - momentum) * mean;
            run_var[static_cast<std::size_t>(ch)] =
                momentum * run_var[static_cast<std::size_t>(ch)] + (1.0 - momentum) * var;
        }
    }
    return out;
}

Act BatchNorm1D::backward(const Act& dout) {
    const Act& xh = xhat_cache;
    Act din(dout.n, dout.c, dout.l);
    double n_elems = static_cast<double>(dout.n) * dout.l;
    for (int ch = 0; ch < c; ++ch) {
        double sum_dy = 0.0, sum_dy_xh = 0.0;
        for (int i = 0; i < dout.n; ++i)
            for (int p = 0; p < dout.l; ++p) {
                double dy = dout.at(i, ch, p);
                sum_dy += dy;
                sum_dy_xh += dy * xh.at(i, ch, p);
            }
        gbeta[static_cast<std::size_t>(ch)] += sum_dy;
        ggamma[static_cast<std::size_t>(ch)] += sum_dy_xh;
        double scale = gamma[static_cast<std::size_t>(ch)] * invstd_cache[static_cast<std::size_t>(ch)] / n_elems;
        for (int i = 0; i < dout.n; ++i)
            for (int p = 0; p < dout.l; ++p)
                din.at(i, ch, p) = scale * (n_elems * dout.at(i, ch, p) - sum_dy -
                                            xh.at(i, ch, p) * sum_dy_xh);
    }
    return din;
}

Act LeakyReLU::forward(const Act& in, bool cache) {
    if (cache) in_cache = in;
    Act out(in.n, in.c, in.l);
    for (std::size_t i = 0; i < in.v.size(); ++i)
        out.v[i] = in.v[i] > 0.0 ? in.v[i] : slope * in.v[i];
    return out;
}

Act LeakyReLU::backward(const Act& dout) const {
    Act din(dout.n, dout.c, dout.l);
    for (std::size_t i = 0; i < dout.v.size(); ++i)
        din.v[i] = in_cache.v[i] > 0.0 ? dout.v[i] : slope * dout.v[i];
    return din;
}

void Dense::init(std::string nm, int cin_, int cout_) {
    name = std::move(nm);
    cin = cin_;
    cout = cout_;
    w.assign(static_cast<std::size_t>(cout) * cin, 0.0);
    b.assign(static_cast<std::size_t>(cout), 0.0);
    gw.assign(w.size(), 0.0);
    gb.assign(b.size(), 0.0);
}

Act Dense::forward(const Act& in, bool cache) {
    check_channels(name, cin, in);
    if (cache) in_cache = in;
    Act out(in.n, cout, 1);
    for (int i = 0; i < in.n; ++i)
        for (int o = 0; o < cout; ++o) {
            const double* wrow = &w[static_cast<std::size_t>(o) * cin];
            double acc = b[static_cast<std::size_t>(o)];
            for (int j = 0; j < cin; ++j) acc += wrow[j] * in.at(i, j, 0);
            out.at(i, o, 0) = acc;
        }
    return out;
}

Act Dense::backward(const Act& dout) {
    const Act& in = in_cache;
    Act din(in.n, in.c, in.l);
    for (int i = 0; i < in.n; ++i)
        for (int o = 0; o < cout; ++o) {
            double g = dout.at(i, o, 0);
            gb[static_cast<std::size_t>(o)] += g;
            double* gwrow = &gw[static_cast<std::size_t>(o) * cin];
            const double* wrow = &w[static_cast<std::size_t>(o) * cin];
            for (int j = 0; j < cin; ++j) {
                gwrow[j] += g * in.at(i, j, 0);
                din.at(i, j, 0) += g * wrow[j];
            }
        }
    return din;
}

}  // namespace detail

namespace {

double clamped_sigmoid(double z) {
    z = std::clamp(z, -36.0, 36.0);  // keeps the output strictly inside (0,1)
    return 1.0 / (1.0 + std::exp(-z));
}

Act reshape(const Act& a, int c, int l) {
    Act out;
    out.n = a.n;
    out.c = c;
    out.l = l;
    out.v = a.v;
    return out;
}

Act concat_channels(const Act& a, const Act& b) {
    Act out(a.n, a.c + b.c, a.l);
    for (int i = 0; i < a.n; ++i) {
        for (int ch = 0; ch < a.c; ++ch)
            for (int p = 0; p < a.l; ++p) out.at(i, ch, p) = a.at(i, ch, p);
        for (int ch = 0; ch < b.c; ++ch)
            for (int p = 0; p < a.l; ++p) out.at(i, a.c + ch, p) = b.at(i, ch, p);
    }
    return out;
}

std::pair<Act, Act> split_channels(const Act& a, int c_first) {
    Act x(a.n, c_first, a.l), y(a.n, a.c - c_first, a.l);
    for (int i = 0; i < a.n; ++i) {
        for (int ch = 0; ch < c_first; ++ch)
            for (int p = 0; p < a.l; ++p) x.at(i, ch, p) = a.at(i, ch, p);
        for (int ch = c_first; ch < a.c; ++ch)
            for (int p = 0; p < a.l; ++p) y.at(i, ch - c_first, p) = a.at(i, ch, p);
    }
    return {std::move(x), std::move(y)};
}

void add_into(Act& dst, const Act& src) {
    for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
}

}  // namespace

RadarNet::RadarNet(const NetConfig& cfg) : cfg_(cfg) {
    int b = cfg.base_channels;
    int cin = cfg.n_t * cfg.n_f;
    int ck = cfg.conv_kernel, cp = cfg.conv_kernel / 2;
    int dk = cfg.deconv_kernel, dp = (cfg.deconv_kernel - 2) / 2;
    c1_.init("conv1", cin, b, ck, 2, cp);
    c2_.init("conv2", b, 2 * b, ck, 2, cp);
    c3_.init("conv3", 2 * b, 4 * b, ck, 2, cp);
    d1_.init("deconv1", 4 * b, 2 * b, dk, 2, dp);
    d2_.init("deconv2", 4 * b, b, dk, 2, dp);  // input is deconv1 output ++ conv2 skip
    d3_.init("deconv3", 2 * b, b, dk, 2, dp);  // input is deconv2 output ++ conv1 skip
    c4_.init("conv4", b, b, 3, 1, 1);
    head_.init("dense", b * cfg.n_s, cfg.n_s);
    bn1_.init("bn1", b, cfg.bn_momentum, cfg.bn_eps);
    bn2_.init("bn2", 2 * b, cfg.bn_momentum, cfg.bn_eps);
    bn3_.init("bn3", 4 * b, cfg.bn_momentum, cfg.bn_eps);
    bnd1_.init("bnd1", 2 * b, cfg.bn_momentum, cfg.bn_eps);
    bnd2_.init("bnd2", b, cfg.bn_momentum, cfg.bn_eps);
    bnd3_.init("bnd3", b, cfg.bn_momentum, cfg.bn_eps);
    bn4_.init("bn4", b, cfg.bn_momentum, cfg.bn_eps);
    r1_.slope = r2_.slope = r3_.slope = r4_.slope = cfg.leaky_slope;
    rd1_.slope = rd2_.slope = rd3_.slope = cfg.leaky_slope;
}

std::vector<ParamRef> RadarNet::params() {
    std::vector<ParamRef> out;
    auto conv = [&out](detail::Conv1D& c) {
        out.push_back({c.name + ".w", {c.cout, c.cin, c.k}, &c.w, true});
        out.push_back({c.name + ".b", {c.cout}, &c.b, false});
    };
    auto deconv = [&out](detail::Deconv1D& d) {
        out.push_back({d.name + ".w", {d.cin, d.cout, d.k}, &d.w, true});
        out.push_back({d.name + ".b", {d.cout}, &d.b, false});
    };
    auto bn = [&out](detail::BatchNorm1D& b) {
        out.push_back({b.name + ".gamma", {b.c}, &b.gamma, false});
        out.push_back({b.name + ".beta", {b.c}, &b.beta, false});
    };
    conv(c1_); bn(bn1_);
    conv(c2_); bn(bn2_);
    conv(c3_); bn(bn3_);
    deconv(d1_); bn(bnd1_);
    deconv(d2_); bn(bnd2_);
    deconv(d3_); bn(bnd3_);
    conv(c4_); bn(bn4_);
    out.push_back({"dense.w", {head_.cout, head_.cin}, &head_.w, true});
    out.push_back({"dense.b", {head_.cout}, &head_.b, false});
    // running statistics ride along for persistence; no gradients, no decay
    auto bnstats = [&out](detail::BatchNorm1D& b) {
        out.push_back({b.name + ".run_mean", {b.c}, &b.run_mean, false});
        out.push_back({b.name + ".run_var", {b.c}, &b.run_var, false});
    };
    bnstats(bn1_); bnstats(bn2_); bnstats(bn3_);
    bnstats(bnd1_); bnstats(bnd2_); bnstats(bnd3_); bnstats(bn4_);
    return out;
}

void RadarNet::init_weights(std::uint64_t seed) {
    RngStream root(seed);
    auto glorot = [&root](const std::string& name, std::vector<double>& w, int fan_in, int fan_out) {
        RngStream s = root.child(name);
        double bound = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& x : w) x = s.uniform(-bound, bound);
    };
    glorot("conv1.w", c1_.w, c1_.cin * c1_.k, c1_.cout * c1_.k);
    glorot("conv2.w", c2_.w, c2_.cin * c2_.k, c2_.cout * c2_.k);
    glorot("conv3.w", c3_.w, c3_.cin * c3_.k, c3_.cout * c3_.k);
    glorot("deconv1.w", d1_.w, d1_.cin * d1_.k, d1_.cout * d1_.k);
    glorot("deconv2.w", d2_.w, d2_.cin * d2_.k, d2_.cout * d2_.k);
    glorot("deconv3.w", d3_.w, d3_.cin * d3_.k, d3_.cout * d3_.k);
    glorot("conv4.w", c4_.w, c4_.cin * c4_.k, c4_.cout * c4_.k);
    glorot("dense.w", head_.w, head_.cin, head_.cout);
    auto zero = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
    zero(c1_.b); zero(c2_.b); zero(c3_.b); zero(c4_.b);
    zero(d1_.b); zero(d2_.b); zero(d3_.b); zero(head_.b);
    for (detail::BatchNorm1D* bn : {&bn1_, &bn2_, &bn3_, &bnd1_, &bnd2_, &bnd3_, &bn4_}) {
        std::fill(bn->gamma.begin(), bn->gamma.end(), 1.0);
        zero(bn->beta);
        zero(bn->run_mean);
        std::fill(bn->run_var.begin(), bn->run_var.end(), 1.0);
    }
}

Act RadarNet::assemble_input(const std::vector<const RadarTensor*>& xs) const {
    int n = static_cast<int>(xs.size());
    int cin = cfg_.n_t * cfg_.n_f;
    Act x(n, cin, cfg_.n_s);
    for (int i = 0; i < n; ++i) {
        const RadarTensor& r = *xs[static_cast<std::size_t>(i)];
        if (r.n_s != cfg_.n_s || r.n_t != cfg_.n_t || r.n_f != cfg_.n_f)
            throw ShapeError("input: tensor shape (" + std::to_string(r.n_s) + "," +
                             std::to_string(r.n_t) + "," + std::to_string(r.n_f) +
                             ") does not match network config");
        for (int s = 0; s < cfg_.n_s; ++s)
            for (int t = 0; t < cfg_.n_t; ++t)
                for (int f = 0; f < cfg_.n_f; ++f)
                    x.at(i, t * cfg_.n_f + f, s) =
                        (r.at(s, t, f) - feat_mean[static_cast<std::size_t>(f)]) /
                        feat_std[static_cast<std::size_t>(f)];
    }
    return x;
}

SliceProbs RadarNet::infer(const RadarTensor& x) const {
    // eval mode: running statistics, no caching; everything is local state
    auto& self = const_cast<RadarNet&>(*this);
    Act in = assemble_input({&x});
    auto bn_eval = [](detail::BatchNorm1D& bn, const Act& a) {
        return bn.forward(a, /*train=*/false, false, false);
    };
    Act a1 = self.r1_.forward(bn_eval(self.bn1_, self.c1_.forward(in, false)), false);
    Act a2 = self.r2_.forward(bn_eval(self.bn2_, self.c2_.forward(a1, false)), false);
    Act a3 = self.r3_.forward(bn_eval(self.bn3_, self.c3_.forward(a2, false)), false);
    Act u1 = self.rd1_.forward(bn_eval(self.bnd1_, self.d1_.forward(a3, false)), false);
    Act u2 = self.rd2_.forward(
        bn_eval(self.bnd2_, self.d2_.forward(concat_channels(u1, a2), false)), false);
    Act u3 = self.rd3_.forward(
        bn_eval(self.bnd3_, self.d3_.forward(concat_channels(u2, a1), false)), false);
    Act a4 = self.r4_.forward(bn_eval(self.bn4_, self.c4_.forward(u3, false)), false);
    Act z = self.head_.forward(reshape(a4, a4.c * a4.l, 1), false);
    SliceProbs y(static_cast<std::size_t>(cfg_.n_s));
    for (int s = 0; s < cfg_.n_s; ++s) y[static_cast<std::size_t>(s)] = clamped_sigmoid(z.at(0, s, 0));
    return y;
}

SliceProbs RadarNet::forward_train(const Act& x) {
    bool ur = update_running_;
    Act a1 = r1_.forward(bn1_.forward(c1_.forward(x, true), true, ur, true), true);
    Act a2 = r2_.forward(bn2_.forward(c2_.forward(a1, true), true, ur, true), true);
    Act a3 = r3_.forward(bn3_.forward(c3_.forward(a2, true), true, ur, true), true);
    a1_ = a1;
    a2_ = a2;
    Act u1 = rd1_.forward(bnd1_.forward(d1_.forward(a3, true), true, ur, true), true);
    Act u2 = rd2_.forward(
        bnd2_.forward(d2_.forward(concat_channels(u1, a2), true), true, ur, true), true);
    Act u3 = rd3_.forward(
        bnd3_.forward(d3_.forward(concat_channels(u2, a1), true), true, ur, true), true);
    Act a4 = r4_.forward(bn4_.forward(c4_.forward(u3, true), true, ur, true), true);
    Act z = head_.forward(reshape(a4, a4.c * a4.l, 1), true);
    probs_cache_ = Act(z.n, cfg_.n_s, 1);
    SliceProbs flat(static_cast<std::size_t>(z.n) * cfg_.n_s);
    for (int i = 0; i < z.n; ++i)
        for (int s = 0; s < cfg_.n_s; ++s) {
            double y = clamped_sigmoid(z.at(i, s, 0));
            probs_cache_.at(i, s, 0) = y;
            flat[static_cast<std::size_t>(i) * cfg_.n_s + s] = y;
        }
    return flat;
}

void RadarNet::zero_gradients() {
    auto z = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
    for (detail::Conv1D* c : {&c1_, &c2_, &c3_, &c4_}) { z(c->gw); z(c->gb); }
    for (detail::Deconv1D* d : {&d1_, &d2_, &d3_}) { z(d->gw); z(d->gb); }
    for (detail::BatchNorm1D* b : {&bn1_, &bn2_, &bn3_, &bnd1_, &bnd2_, &bnd3_, &bn4_}) {
        z(b->ggamma);
        z(b->gbeta);
    }
    z(head_.gw);
    z(head_.gb);
}

std::vector<std::vector<double>> RadarNet::collect_gradients() {
    std::vector<std::vector<double>> out;
    auto conv = [&out](detail::Conv1D& c) { out.push_back(c.gw); out.push_back(c.gb); };
    auto deconv = [&out](detail::Deconv1D& d) { out.push_back(d.gw); out.push_back(d.gb); };
    auto bn = [&out](detail::BatchNorm1D& b) { out.push_back(b.ggamma); out.push_back(b.gbeta); };
    conv(c1_); bn(bn1_);
    conv(c2_); bn(bn2_);
    conv(c3_); bn(bn3_);
    deconv(d1_); bn(bnd1_);
    deconv(d2_); bn(bnd2_);
    deconv(d3_); bn(bnd3_);
    conv(c4_); bn(bn4_);
    out.push_back(head_.gw);
    out.push_back(head_.gb);
    // zero placeholders for the running-stat entries at the tail of params()
    for (detail::BatchNorm1D* b : {&bn1_, &bn2_, &bn3_, &bnd1_, &bnd2_, &bnd3_, &bn4_}) {
        out.emplace_back(b->run_mean.size(), 0.0);
        out.emplace_back(b->run_var.size(), 0.0);
    }
    return out;
}

double RadarNet::training_loss(const std::vector<const RadarTensor*>& xs,
                               const std::vector<const std::vector<std::uint8_t>*>& ts,
                               double alpha, double weight_decay) {
    bool saved = update_running_;
    update_running_ = false;
    SliceProbs flat = forward_train(assemble_input(xs));
    update_running_ = saved;
    int n = static_cast<int>(xs.size());
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        SliceProbs yi(flat.begin() + static_cast<std::ptrdiff_t>(i) * cfg_.n_s,
                      flat.begin() + static_cast<std::ptrdiff_t>(i + 1) * cfg_.n_s);
        loss += slice_bce(*ts[static_cast<std::size_t>(i)], yi, alpha);
    }
    loss /= n;
    if (weight_decay > 0.0) {
        double pen = 0.0;
        for (const ParamRef& p : params())
            if (p.decay)
                for (double w : *p.values) pen += w * w;
        loss += 0.5 * weight_decay * pen;
    }
    return loss;
}

std::vector<std::vector<double>> RadarNet::training_gradients(
    const std::vector<const RadarTensor*>& xs,
    const std::vector<const std::vector<std::uint8_t>*>& ts, double alpha, double weight_decay,
    bool update_running, double& data_loss_out) {
    int n = static_cast<int>(xs.size());
    zero_gradients();
    update_running_ = update_running;
    SliceProbs flat = forward_train(assemble_input(xs));
    update_running_ = false;

    data_loss_out = 0.0;
    Act dz(n, cfg_.n_s, 1);
    for (int i = 0; i < n; ++i) {
        const std::vector<std::uint8_t>& t = *ts[static_cast<std::size_t>(i)];
        if (static_cast<int>(t.size()) != cfg_.n_s)
            throw ShapeError("target: length " + std::to_string(t.size()) + " != n_s");
        for (int s = 0; s < cfg_.n_s; ++s) {
            double y = probs_cache_.at(i, s, 0);
            if (t[static_cast<std::size_t>(s)]) {
                data_loss_out -= alpha * std::log(y);
                dz.at(i, s, 0) = -alpha * (1.0 - y) / n;
            } else {
                data_loss_out -= std::log(1.0 - y);
                dz.at(i, s, 0) = y / n;
            }
        }
    }
    data_loss_out /= n;

    Act dflat = head_.backward(dz);
    int b = cfg_.base_channels;
    Act da4 = reshape(dflat, b, cfg_.n_s);
    Act d = c4_.backward(bn4_.backward(r4_.backward(da4)));
    d = d3_.backward(bnd3_.backward(rd3_.backward(d)));
    auto [du2, da1_skip] = split_channels(d, b);
    d = d2_.backward(bnd2_.backward(rd2_.backward(du2)));
    auto [du1, da2_skip] = split_channels(d, 2 * b);
    Act da3 = d1_.backward(bnd1_.backward(rd1_.backward(du1)));
    Act da2 = c3_.backward(bn3_.backward(r3_.backward(da3)));
    add_into(da2, da2_skip);
    Act da1 = c2_.backward(bn2_.backward(r2_.backward(da2)));
    add_into(da1, da1_skip);
    (void)c1_.backward(bn1_.backward(r1_.backward(da1)));

    auto grads = collect_gradients();
    if (weight_decay > 0.0) {
        auto ps = params();
        for (std::size_t i = 0; i < ps.size(); ++i)
            if (ps[i].decay)
                for (std::size_t j = 0; j < grads[i].size(); ++j)
                    grads[i][j] += weight_decay * (*ps[i].values)[j];
    }
    return grads;
}

TrainResult train(RadarNet& net,
                  const std::vector<std::pair<RadarTensor, std::vector<std::uint8_t>>>& dataset,
                  const TrainSchedule& sched) {
    sched.validate();
    if (dataset.empty()) throw DataError("train: empty dataset");

    RngStream root(sched.seed);
    net.init_weights(root.child("init").next_u64());

    // per-feature standardization statistics over the whole training set
    int n_f = net.config().n_f;
    std::vector<double> sum(static_cast<std::size_t>(n_f), 0.0), sq(static_cast<std::size_t>(n_f), 0.0);
    std::size_t count = 0;
    for (const auto& [x, t] : dataset) {
        for (int s = 0; s < x.n_s; ++s)
            for (int tt = 0; tt < x.n_t; ++tt)
                for (int f = 0; f < n_f; ++f) {
                    double v = x.at(s, tt, f);
                    sum[static_cast<std::size_t>(f)] += v;
                    sq[static_cast<std::size_t>(f)] += v * v;
                }
        count += static_cast<std::size_t>(x.n_s) * x.n_t;
    }
    for (int f = 0; f < n_f; ++f) {
        double mean = sum[static_cast<std::size_t>(f)] / static_cast<double>(count);
        double var = sq[static_cast<std::size_t>(f)] / static_cast<double>(count) - mean * mean;
        net.feat_mean[static_cast<std::size_t>(f)] = mean;
        net.feat_std[static_cast<std::size_t>(f)] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }

    auto ps = net.params();
    std::vector<std::vector<double>> m(ps.size()), v(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        m[i].assign(ps[i].values->size(), 0.0);
        v[i].assign(ps[i].values->size(), 0.0);
    }
    const double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
    long step = 0;

    TrainResult result;
    std::vector<std::size_t> order(dataset.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    int global_epoch = 0;
    for (const TrainPhase& phase : sched.phases) {
        for (int e = 0; e < phase.epochs; ++e, ++global_epoch) {
            RngStream shuf = root.child("shuffle").child(static_cast<std::uint64_t>(global_epoch));
            shuf.shuffle(order);
            double loss_sum = 0.0;
            std::size_t loss_count = 0;
            for (std::size_t off = 0; off < order.size(); off += static_cast<std::size_t>(sched.batch_size)) {
                std::size_t end = std::min(order.size(), off + static_cast<std::size_t>(sched.batch_size));
                std::vector<const RadarTensor*> xs;
                std::vector<const std::vector<std::uint8_t>*> ts;
                xs.reserve(end - off);
                ts.reserve(end - off);
                for (std::size_t i = off; i < end; ++i) {
                    xs.push_back(&dataset[order[i]].first);
                    ts.push_back(&dataset[order[i]].second);
                }
                double data_loss = 0.0;
                auto grads = net.training_gradients(xs, ts, sched.alpha, sched.weight_decay, true,
                                                    data_loss);
                ++step;
                double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
                double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
                for (std::size_t i = 0; i < ps.size(); ++i) {
                    std::vector<double>& w = *ps[i].values;
                    for (std::size_t j = 0; j < w.size(); ++j) {
                        double g = grads[i][j];
                        m[i][j] = beta1 * m[i][j] + (1.0 - beta1) * g;
                        v[i][j] = beta2 * v[i][j] + (1.0 - beta2) * g * g;
                        w[j] -= phase.learning_rate * (m[i][j] / bc1) /
                                (std::sqrt(v[i][j] / bc2) + adam_eps);
                    }
                }
                loss_sum += data_loss * static_cast<double>(end - off);
                loss_count += end - off;
            }
            double epoch_loss = loss_sum / static_cast<double>(loss_count);
            if (!std::isfinite(epoch_loss)) throw NumericError("train: non-finite training loss");
            result.epoch_loss.push_back(epoch_loss);
        }
    }
    return result;
}

}  // namespace yodar
