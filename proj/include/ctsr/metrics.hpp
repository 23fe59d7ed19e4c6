#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ctsr/common.hpp"
#include "ctsr/geometry.hpp"

namespace ctsr {

struct MetricReport {
    double psnr_db = 0.0;
    double ssim = 0.0;
    double roi_radius = 0.0;
    double data_range = 1.0;
};

namespace detail {

// Circular ROI: disk of radius size/2 centered at ((size-1)/2, (size-1)/2),
// boundary pixels included.
inline bool in_roi(int r, int c, int size) {
    const double cc = (size - 1) / 2.0;
    const double rad = size / 2.0;
    const double dy = r - cc, dx = c - cc;
    return dx * dx + dy * dy <= rad * rad;
}

// scipy-style 'reflect' boundary: index sequence (... b a | a b c | c b a ...)
inline int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

inline std::vector<double> gaussian_taps(double sigma, int radius) {
    std::vector<double> g(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        g[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += g[i + radius];
    }
    for (double& v : g) v /= sum;
    return g;
}

// separable gaussian blur with reflect boundary, over a rows x cols grid
inline std::vector<double> gauss_filter(const std::vector<double>& in, int rows, int cols,
                                        const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size() / 2);
    std::vector<double> tmp(in.size()), out(in.size());
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += taps[t + radius] * in[static_cast<std::size_t>(r) * cols +
                                             reflect_index(c + t, cols)];
            tmp[static_cast<std::size_t>(r) * cols + c] = acc;
        }
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            double acc = 0.0;
            for (int t = -radius; t <= radius; ++t)
                acc += taps[t + radius] *
                       tmp[static_cast<std::size_t>(reflect_index(r + t, rows)) * cols + c];
            out[static_cast<std::size_t>(r) * cols + c] = acc;
        }
    return out;
}

} // namespace detail

// PSNR over the circular ROI (or the full grid with use_roi = false, for
// rectangular sinogram comparisons). data_range is declared, not inferred.
// Zero MSE reports the 99 dB cap; all values are capped at 99.
inline double psnr_roi(const std::vector<double>& pred, const std::vector<double>& target,
                       int rows, int cols, double data_range = 1.0, bool use_roi = true) {
    require(pred.size() == target.size() &&
                pred.size() == static_cast<std::size_t>(rows) * cols,
            "psnr_roi: size mismatch");
    double sq = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (use_roi && !detail::in_roi(r, c, rows)) continue;
            const double d = pred[static_cast<std::size_t>(r) * cols + c] -
                             target[static_cast<std::size_t>(r) * cols + c];
            sq += d * d;
            ++count;
        }
    const double mse = sq / static_cast<double>(count);
    if (mse == 0.0) return 99.0;
    return std::min(99.0, 10.0 * std::log10(data_range * data_range / mse));
}

inline double psnr_roi(const Image& pred, const Image& target, double data_range = 1.0) {
    require(pred.size == target.size, "psnr_roi: image size mismatch");
    return psnr_roi(pred.pixels, target.pixels, pred.size, pred.size, data_range, true);
}

// Mean local SSIM over ROI pixels. 11x11 Gaussian window (sigma 1.5),
// C1 = (0.01 range)^2, C2 = (0.03 range)^2, weighted (not sample) covariance,
// reflect boundary. Matches the scikit-image gaussian_weights configuration.
inline double ssim_roi(const std::vector<double>& pred, const std::vector<double>& target,
                       int rows, int cols, double data_range = 1.0, bool use_roi = true) {
    require(pred.size() == target.size() &&
                pred.size() == static_cast<std::size_t>(rows) * cols,
            "ssim_roi: size mismatch");
    const auto taps = detail::gaussian_taps(1.5, 5);
    const std::size_t n = pred.size();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = pred[i] * pred[i];
        yy[i] = target[i] * target[i];
        xy[i] = pred[i] * target[i];
    }
    const auto ux = detail::gauss_filter(pred, rows, cols, taps);
    const auto uy = detail::gauss_filter(target, rows, cols, taps);
    const auto uxx = detail::gauss_filter(xx, rows, cols, taps);
    const auto uyy = detail::gauss_filter(yy, rows, cols, taps);
    const auto uxy = detail::gauss_filter(xy, rows, cols, taps);
    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);
    double acc = 0.0;
    std::size_t count = 0;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
            if (use_roi && !detail::in_roi(r, c, rows)) continue;
            const std::size_t i = static_cast<std::size_t>(r) * cols + c;
            const double vx = uxx[i] - ux[i] * ux[i];
            const double vy = uyy[i] - uy[i] * uy[i];
            const double cov = uxy[i] - ux[i] * uy[i];
            const double s = ((2.0 * ux[i] * uy[i] + c1) * (2.0 * cov + c2)) /
                             ((ux[i] * ux[i] + uy[i] * uy[i] + c1) * (vx + vy + c2));
            acc += s;
            ++count;
        }
    return acc / static_cast<double>(count);
}

inline double ssim_roi(const Image& pred, const Image& target, double data_range = 1.0) {
    require(pred.size == target.size, "ssim_roi: image size mismatch");
    return ssim_roi(pred.pixels, target.pixels, pred.size, pred.size, data_range, true);
}

inline MetricReport evaluate(const Image& pred, const Image& target, double data_range = 1.0) {
    MetricReport rep;
    rep.psnr_db = psnr_roi(pred, target, data_range);
    rep.ssim = ssim_roi(pred, target, data_range);
    rep.roi_radius = pred.size / 2.0;
    rep.data_range = data_range;
    return rep;
}

} // namespace ctsr
