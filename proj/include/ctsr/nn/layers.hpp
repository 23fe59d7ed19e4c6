#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ctsr/common.hpp"
#include "ctsr/nn/tensor.hpp"
#include "ctsr/parallel.hpp"

namespace ctsr::nn {

enum class LayerKind {
    input,
    conv2d,
    avg_pool2,
    bilinear_up2,
    relu,
    leaky_relu,
    batch_norm,
    sigmoid,
    concat,
    residual_add, // out = in0 + selected channel of the network input
};

inline const char* kind_name(LayerKind k) {
    switch (k) {
        case LayerKind::input: return "input";
        case LayerKind::conv2d: return "conv2d";
        case LayerKind::avg_pool2: return "avg_pool2";
        case LayerKind::bilinear_up2: return "bilinear_up2";
        case LayerKind::relu: return "relu";
        case LayerKind::leaky_relu: return "leaky_relu";
        case LayerKind::batch_norm: return "batch_norm";
        case LayerKind::sigmoid: return "sigmoid";
        case LayerKind::concat: return "concat";
        case LayerKind::residual_add: return "residual_add";
    }
    return "?";
}

struct LayerSpec {
    LayerKind kind = LayerKind::input;
    int in0 = -1; // producer layer index; -1 = network input
    int in1 = -1; // second producer (concat only)
    int in_channels = 0;
    int out_channels = 0;
    int kernel = 0;
    int stride = 1;
    int pad = 0;
    double slope = 0.2;    // leaky_relu
    int param = -1;        // first slot in the ParamSet, -1 if stateless
    int residual_channel = 0;
};

// Named parameter tensors. Convolutions own two consecutive slots
// (weight, bias); batch norm owns four (gamma, beta, running_mean,
// running_var) of which the running statistics are state, not trainable.
struct ParamSet {
    std::vector<TensorGrad> tensors;
    std::vector<std::string> names;
    std::vector<bool> trainable;

    int add(const std::string& name, TensorGrad t, bool train = true) {
        tensors.push_back(std::move(t));
        names.push_back(name);
        trainable.push_back(train);
        return static_cast<int>(tensors.size()) - 1;
    }
    void zero_grad() {
        for (auto& t : tensors) t.zero_grad();
    }
};

inline constexpr double kBnEps = 1e-5;
inline constexpr double kBnMomentum = 0.1;

namespace detail {

[[noreturn]] inline void layer_fail(const LayerSpec& spec, const std::string& what) {
    fail(std::string(kind_name(spec.kind)) + ": " + what);
}

inline void conv_out_dims(const LayerSpec& s, int h, int w, int& oh, int& ow) {
    oh = (h + 2 * s.pad - s.kernel) / s.stride + 1;
    ow = (w + 2 * s.pad - s.kernel) / s.stride + 1;
}

inline void conv_forward(const LayerSpec& spec, const TensorGrad& in, const ParamSet& params,
                         TensorGrad& out) {
    if (in.c() != spec.in_channels)
        layer_fail(spec, "expected " + std::to_string(spec.in_channels) + " input channels, got " +
                             std::to_string(in.c()));
    const TensorGrad& weight = params.tensors[spec.param];
    const TensorGrad& bias = params.tensors[spec.param + 1];
    int oh, ow;
    conv_out_dims(spec, in.h(), in.w(), oh, ow);
    out.resize(in.n(), spec.out_channels, oh, ow);
    const int k = spec.kernel, st = spec.stride, p = spec.pad;
    const int H = in.h(), W = in.w();
    const int jobs = in.n() * spec.out_channels;
    parallel_for(jobs, [&](int job) {
        const int n = job / spec.out_channels;
        const int oc = job % spec.out_channels;
        double* oplane = &out.value[out.idx(n, oc, 0, 0)];
        const double b = bias.value[oc];
        for (int i = 0; i < oh * ow; ++i) oplane[i] = b;
        for (int ic = 0; ic < spec.in_channels; ++ic) {
            const double* iplane = &in.value[in.idx(n, ic, 0, 0)];
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = weight.v(oc, ic, ky, kx);
                    if (wv == 0.0) continue;
                    // ox range with ix = ox*st + kx - p inside [0, W)
                    const int ox_lo = std::max(0, (p - kx + st - 1) / st);
                    const int ox_hi = std::min(ow, (W - 1 - kx + p) / st + 1);
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * st + ky - p;
                        if (iy < 0 || iy >= H) continue;
                        const double* irow = iplane + static_cast<std::size_t>(iy) * W;
                        double* orow = oplane + static_cast<std::size_t>(oy) * ow;
                        if (st == 1) {
                            const double* ib = irow + (ox_lo + kx - p);
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                orow[ox] += wv * ib[ox - ox_lo];
                        } else {
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                orow[ox] += wv * irow[ox * st + kx - p];
                        }
                    }
                }
        }
    });
}

inline void conv_backward(const LayerSpec& spec, TensorGrad& in, ParamSet& params,
                          const TensorGrad& out) {
    TensorGrad& weight = params.tensors[spec.param];
    TensorGrad& bias = params.tensors[spec.param + 1];
    const int k = spec.kernel, st = spec.stride, p = spec.pad;
    const int H = in.h(), W = in.w();
    const int oh = out.h(), ow = out.w();
    // parameter gradients: parallel over out-channel (disjoint weight slices)
    parallel_for(spec.out_channels, [&](int oc) {
        double bacc = 0.0;
        for (int n = 0; n < in.n(); ++n) {
            const double* gplane = &out.grad[out.idx(n, oc, 0, 0)];
            for (int i = 0; i < oh * ow; ++i) bacc += gplane[i];
        }
        bias.grad[oc] += bacc;
        for (int ic = 0; ic < spec.in_channels; ++ic)
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    double acc = 0.0;
                    const int ox_lo = std::max(0, (p - kx + st - 1) / st);
                    const int ox_hi = std::min(ow, (W - 1 - kx + p) / st + 1);
                    for (int n = 0; n < in.n(); ++n) {
                        const double* iplane = &in.value[in.idx(n, ic, 0, 0)];
                        const double* gplane = &out.grad[out.idx(n, oc, 0, 0)];
                        for (int oy = 0; oy < oh; ++oy) {
                            const int iy = oy * st + ky - p;
                            if (iy < 0 || iy >= H) continue;
                            const double* irow = iplane + static_cast<std::size_t>(iy) * W;
                            const double* grow = gplane + static_cast<std::size_t>(oy) * ow;
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                acc += grow[ox] * irow[ox * st + kx - p];
                        }
                    }
                    weight.g(oc, ic, ky, kx) += acc;
                }
    });
    // input gradient: parallel over (n, ic), disjoint input planes
    const int jobs = in.n() * spec.in_channels;
    parallel_for(jobs, [&](int job) {
        const int n = job / spec.in_channels;
        const int ic = job % spec.in_channels;
        double* gin = &in.grad[in.idx(n, ic, 0, 0)];
        for (int oc = 0; oc < spec.out_channels; ++oc) {
            const double* gplane = &out.grad[out.idx(n, oc, 0, 0)];
            for (int ky = 0; ky < k; ++ky)
                for (int kx = 0; kx < k; ++kx) {
                    const double wv = weight.v(oc, ic, ky, kx);
                    if (wv == 0.0) continue;
                    const int ox_lo = std::max(0, (p - kx + st - 1) / st);
                    const int ox_hi = std::min(ow, (W - 1 - kx + p) / st + 1);
                    for (int oy = 0; oy < oh; ++oy) {
                        const int iy = oy * st + ky - p;
                        if (iy < 0 || iy >= H) continue;
                        double* grow = gin + static_cast<std::size_t>(iy) * W;
                        const double* gout = gplane + static_cast<std::size_t>(oy) * ow;
                        if (st == 1) {
                            double* gb = grow + (ox_lo + kx - p);
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                gb[ox - ox_lo] += wv * gout[ox];
                        } else {
                            for (int ox = ox_lo; ox < ox_hi; ++ox)
                                grow[ox * st + kx - p] += wv * gout[ox];
                        }
                    }
                }
        }
    });
}

inline void avg_pool2_forward(const LayerSpec& spec, const TensorGrad& in, TensorGrad& out) {
    if (in.h() % 2 || in.w() % 2)
        layer_fail(spec, "spatial dims must be even, got " + in.shape_str());
    out.resize(in.n(), in.c(), in.h() / 2, in.w() / 2);
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < out.h(); ++y)
                for (int x = 0; x < out.w(); ++x)
                    out.v(n, c, y, x) = 0.25 * (in.v(n, c, 2 * y, 2 * x) +
                                                in.v(n, c, 2 * y, 2 * x + 1) +
                                                in.v(n, c, 2 * y + 1, 2 * x) +
                                                in.v(n, c, 2 * y + 1, 2 * x + 1));
}

inline void avg_pool2_backward(TensorGrad& in, const TensorGrad& out) {
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < out.h(); ++y)
                for (int x = 0; x < out.w(); ++x) {
                    const double g = 0.25 * out.grad[out.idx(n, c, y, x)];
                    in.g(n, c, 2 * y, 2 * x) += g;
                    in.g(n, c, 2 * y, 2 * x + 1) += g;
                    in.g(n, c, 2 * y + 1, 2 * x) += g;
                    in.g(n, c, 2 * y + 1, 2 * x + 1) += g;
                }
}

// 2x bilinear upsampling, align-corners-false: output pixel (oy, ox) samples
// the input at ((oy+0.5)/2 - 0.5, (ox+0.5)/2 - 0.5), clamped at the borders.
struct BilinearTap {
    int i0, i1;
    double w0, w1;
};

inline BilinearTap bilinear_tap(int o, int n_in) {
    const double src = (o + 0.5) / 2.0 - 0.5;
    double fl = std::floor(src);
    int i0 = static_cast<int>(fl);
    double f = src - fl;
    if (i0 < 0) { i0 = 0; f = 0.0; }
    int i1 = i0 + 1;
    if (i1 >= n_in) { i1 = n_in - 1; f = 0.0; }
    return {i0, i1, 1.0 - f, f};
}

inline void bilinear_up2_forward(const TensorGrad& in, TensorGrad& out) {
    out.resize(in.n(), in.c(), in.h() * 2, in.w() * 2);
    std::vector<BilinearTap> ty(out.h()), tx(out.w());
    for (int y = 0; y < out.h(); ++y) ty[y] = bilinear_tap(y, in.h());
    for (int x = 0; x < out.w(); ++x) tx[x] = bilinear_tap(x, in.w());
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < out.h(); ++y) {
                const auto& a = ty[y];
                for (int x = 0; x < out.w(); ++x) {
                    const auto& b = tx[x];
                    out.v(n, c, y, x) = a.w0 * (b.w0 * in.v(n, c, a.i0, b.i0) +
                                                b.w1 * in.v(n, c, a.i0, b.i1)) +
                                        a.w1 * (b.w0 * in.v(n, c, a.i1, b.i0) +
                                                b.w1 * in.v(n, c, a.i1, b.i1));
                }
            }
}

inline void bilinear_up2_backward(TensorGrad& in, const TensorGrad& out) {
    std::vector<BilinearTap> ty(out.h()), tx(out.w());
    for (int y = 0; y < out.h(); ++y) ty[y] = bilinear_tap(y, in.h());
    for (int x = 0; x < out.w(); ++x) tx[x] = bilinear_tap(x, in.w());
    for (int n = 0; n < in.n(); ++n)
        for (int c = 0; c < in.c(); ++c)
            for (int y = 0; y < out.h(); ++y) {
                const auto& a = ty[y];
                for (int x = 0; x < out.w(); ++x) {
                    const auto& b = tx[x];
                    const double g = out.grad[out.idx(n, c, y, x)];
                    in.g(n, c, a.i0, b.i0) += g * a.w0 * b.w0;
                    in.g(n, c, a.i0, b.i1) += g * a.w0 * b.w1;
                    in.g(n, c, a.i1, b.i0) += g * a.w1 * b.w0;
                    in.g(n, c, a.i1, b.i1) += g * a.w1 * b.w1;
                }
            }
}

inline void batch_norm_forward(const LayerSpec& spec, const TensorGrad& in, ParamSet& params,
                               TensorGrad& out, bool training) {
    const TensorGrad& gamma = params.tensors[spec.param];
    const TensorGrad& beta = params.tensors[spec.param + 1];
    TensorGrad& rmean = params.tensors[spec.param + 2];
    TensorGrad& rvar = params.tensors[spec.param + 3];
    if (in.c() != gamma.c()) layer_fail(spec, "channel mismatch: " + in.shape_str());
    out.resize(in.n(), in.c(), in.h(), in.w());
    const std::size_t plane = static_cast<std::size_t>(in.h()) * in.w();
    const double count = static_cast<double>(in.n()) * static_cast<double>(plane);
    for (int c = 0; c < in.c(); ++c) {
        double mean, var;
        if (training) {
            double s = 0.0;
            for (int n = 0; n < in.n(); ++n) {
                const double* p = &in.value[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) s += p[i];
            }
            mean = s / count;
            double sq = 0.0;
            for (int n = 0; n < in.n(); ++n) {
                const double* p = &in.value[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) {
                    const double d = p[i] - mean;
                    sq += d * d;
                }
            }
            var = sq / count; // biased, used both for normalization and running stats
            rmean.value[c] = (1.0 - kBnMomentum) * rmean.value[c] + kBnMomentum * mean;
            rvar.value[c] = (1.0 - kBnMomentum) * rvar.value[c] + kBnMomentum * var;
        } else {
            mean = rmean.value[c];
            var = rvar.value[c];
        }
        const double inv = 1.0 / std::sqrt(var + kBnEps);
        const double g = gamma.value[c], b = beta.value[c];
        for (int n = 0; n < in.n(); ++n) {
            const double* p = &in.value[in.idx(n, c, 0, 0)];
            double* q = &out.value[out.idx(n, c, 0, 0)];
            for (std::size_t i = 0; i < plane; ++i) q[i] = g * (p[i] - mean) * inv + b;
        }
    }
}

inline void batch_norm_backward(const LayerSpec& spec, TensorGrad& in, ParamSet& params,
                                const TensorGrad& out, bool training) {
    TensorGrad& gamma = params.tensors[spec.param];
    TensorGrad& beta = params.tensors[spec.param + 1];
    const TensorGrad& rmean = params.tensors[spec.param + 2];
    const TensorGrad& rvar = params.tensors[spec.param + 3];
    const std::size_t plane = static_cast<std::size_t>(in.h()) * in.w();
    const double count = static_cast<double>(in.n()) * static_cast<double>(plane);
    for (int c = 0; c < in.c(); ++c) {
        // recompute batch statistics from the recorded input
        double mean, var;
        if (training) {
            double s = 0.0, sq = 0.0;
            for (int n = 0; n < in.n(); ++n) {
                const double* p = &in.value[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) s += p[i];
            }
            mean = s / count;
            for (int n = 0; n < in.n(); ++n) {
                const double* p = &in.value[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) {
                    const double d = p[i] - mean;
                    sq += d * d;
                }
            }
            var = sq / count;
        } else {
            mean = rmean.value[c];
            var = rvar.value[c];
        }
        const double inv = 1.0 / std::sqrt(var + kBnEps);
        const double g = gamma.value[c];
        double dg = 0.0, db = 0.0, dxh_sum = 0.0, dxh_xhat_sum = 0.0;
        for (int n = 0; n < in.n(); ++n) {
            const double* p = &in.value[in.idx(n, c, 0, 0)];
            const double* go = &out.grad[out.idx(n, c, 0, 0)];
            for (std::size_t i = 0; i < plane; ++i) {
                const double xhat = (p[i] - mean) * inv;
                dg += go[i] * xhat;
                db += go[i];
                dxh_sum += go[i];
                dxh_xhat_sum += go[i] * xhat;
            }
        }
        gamma.grad[c] += dg;
        beta.grad[c] += db;
        if (training) {
            const double m_dxh = dxh_sum / count;
            const double m_dxh_xhat = dxh_xhat_sum / count;
            for (int n = 0; n < in.n(); ++n) {
                const double* p = &in.value[in.idx(n, c, 0, 0)];
                const double* go = &out.grad[out.idx(n, c, 0, 0)];
                double* gi = &in.grad[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) {
                    const double xhat = (p[i] - mean) * inv;
                    gi[i] += g * inv * (go[i] - m_dxh - xhat * m_dxh_xhat);
                }
            }
        } else {
            for (int n = 0; n < in.n(); ++n) {
                const double* go = &out.grad[out.idx(n, c, 0, 0)];
                double* gi = &in.grad[in.idx(n, c, 0, 0)];
                for (std::size_t i = 0; i < plane; ++i) gi[i] += g * inv * go[i];
            }
        }
    }
}

} // namespace detail

} // namespace ctsr::nn
