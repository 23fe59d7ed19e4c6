#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ctsr/common.hpp"

namespace ctsr::nn {

// Value array paired with a gradient array of identical shape; the unit of
// all differentiable computation. Layout is NCHW, row-major.
struct TensorGrad {
    std::array<int, 4> shape{0, 0, 0, 0}; // n, c, h, w
    std::vector<double> value;
    std::vector<double> grad;

    TensorGrad() = default;
    TensorGrad(int n, int c, int h, int w) { resize(n, c, h, w); }

    void resize(int n, int c, int h, int w) {
        shape = {n, c, h, w};
        const std::size_t sz =
            static_cast<std::size_t>(n) * c * static_cast<std::size_t>(h) * w;
        value.assign(sz, 0.0);
        grad.assign(sz, 0.0);
    }

    int n() const { return shape[0]; }
    int c() const { return shape[1]; }
    int h() const { return shape[2]; }
    int w() const { return shape[3]; }
    std::size_t numel() const { return value.size(); }

    std::size_t idx(int n_, int c_, int h_, int w_) const {
        return ((static_cast<std::size_t>(n_) * shape[1] + c_) * shape[2] + h_) * shape[3] + w_;
    }
    double& v(int n_, int c_, int h_, int w_) { return value[idx(n_, c_, h_, w_)]; }
    double v(int n_, int c_, int h_, int w_) const { return value[idx(n_, c_, h_, w_)]; }
    double& g(int n_, int c_, int h_, int w_) { return grad[idx(n_, c_, h_, w_)]; }

    void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }

    bool same_shape(const TensorGrad& o) const { return shape == o.shape; }

    std::string shape_str() const {
        return std::to_string(shape[0]) + "x" + std::to_string(shape[1]) + "x" +
               std::to_string(shape[2]) + "x" + std::to_string(shape[3]);
    }
};

} // namespace ctsr::nn
