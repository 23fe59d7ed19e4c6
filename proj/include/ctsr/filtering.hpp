#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "ctsr/common.hpp"
#include "ctsr/fft.hpp"
#include "ctsr/geometry.hpp"

namespace ctsr {

// Discrete Ram-Lak impulse response sampled at spacing ds:
//   h(0)      =  1 / (4 ds^2)
//   h(n even) =  0
//   h(n odd)  = -1 / (pi^2 n^2 ds^2)
// The infinite sequence sums to zero; a truncation at half-width W keeps a
// residual DC gain of about 1/(pi^2 W).
struct RampKernel {
    int half_width = 0;
    double spacing = 1.0;
    std::vector<double> taps; // length 2*half_width + 1, taps[half_width] = h(0)

    double tap(int n) const { return taps[half_width + n]; }
};

inline RampKernel ramp_kernel(int half_width, double spacing = 1.0) {
    require(half_width >= 1, "ramp_kernel: half_width must be >= 1");
    require(spacing > 0, "ramp_kernel: spacing must be positive");
    RampKernel k;
    k.half_width = half_width;
    k.spacing = spacing;
    k.taps.assign(2 * half_width + 1, 0.0);
    const double ds2 = spacing * spacing;
    k.taps[half_width] = 1.0 / (4.0 * ds2);
    for (int n = 1; n <= half_width; n += 2) {
        const double v = -1.0 / (kPi * kPi * n * n * ds2);
        k.taps[half_width + n] = v;
        k.taps[half_width - n] = v;
    }
    return k;
}

enum class RampMode { spatial, frequency };

namespace detail {

// q[k] = ds * sum_n p[n] h[k-n], zero padding outside [0, S)
inline void ramp_column_spatial(const double* p, double* q, int S, const RampKernel& k) {
    const int W = k.half_width;
    for (int i = 0; i < S; ++i) {
        double acc = 0.0;
        const int lo = std::max(0, i - W);
        const int hi = std::min(S - 1, i + W);
        for (int n = lo; n <= hi; ++n) acc += p[n] * k.taps[W + (i - n)];
        q[i] = k.spacing * acc;
    }
}

struct RampTransfer {
    std::size_t padded = 0;
    std::vector<std::complex<double>> H; // DFT of the wrapped kernel taps
};

// Transfer function derived from the kernel taps on a power-of-two grid of
// length >= 2S; the central S outputs of the circular product equal the
// linear convolution.
inline RampTransfer ramp_transfer(int S, const RampKernel& k) {
    RampTransfer t;
    t.padded = next_pow2(static_cast<std::size_t>(2 * S));
    std::vector<std::complex<double>> h(t.padded, 0.0);
    const int W = k.half_width;
    for (int n = -W; n <= W; ++n) {
        if (k.tap(n) == 0.0) continue;
        const std::size_t idx = static_cast<std::size_t>((n + static_cast<int>(t.padded)) %
                                                         static_cast<int>(t.padded));
        h[idx] += k.tap(n);
    }
    fft_inplace(h, false);
    t.H = std::move(h);
    return t;
}

inline void ramp_column_frequency(const double* p, double* q, int S, const RampKernel& k,
                                  const RampTransfer& t) {
    std::vector<std::complex<double>> buf(t.padded, 0.0);
    for (int i = 0; i < S; ++i) buf[i] = p[i];
    fft_inplace(buf, false);
    for (std::size_t i = 0; i < t.padded; ++i) buf[i] *= t.H[i];
    fft_inplace(buf, true);
    for (int i = 0; i < S; ++i) q[i] = k.spacing * buf[i].real();
}

} // namespace detail

// Ramp-filters every angle column along the detector axis. The spatial and
// frequency paths compute the same zero-padded linear convolution.
inline Sinogram apply_ramp(const Sinogram& sino, const RampKernel& kernel,
                           RampMode mode = RampMode::frequency) {
    Sinogram out(sino.num_detectors, sino.angles);
    const int S = sino.num_detectors;
    if (mode == RampMode::spatial) {
        for (int a = 0; a < sino.num_angles(); ++a)
            detail::ramp_column_spatial(sino.column(a), out.column(a), S, kernel);
    } else {
        const auto t = detail::ramp_transfer(S, kernel);
        for (int a = 0; a < sino.num_angles(); ++a)
            detail::ramp_column_frequency(sino.column(a), out.column(a), S, kernel, t);
    }
    return out;
}

inline Sinogram apply_ramp(const Sinogram& sino, RampMode mode = RampMode::frequency) {
    return apply_ramp(sino, ramp_kernel(sino.num_detectors - 1, 1.0), mode);
}

// fbp = (pi / num_angles) * backproject(apply_ramp(sino)). The scale is
// calibrated so a unit disk reconstructs to ~1 (checked by test). Requires a
// base [0, pi) grid: two-ends padding must be cropped first.
inline Image fbp(const Sinogram& sino, const Geometry& geom,
                 RampMode mode = RampMode::frequency) {
    for (double a : sino.angles)
        require(a >= -1e-12 && a < kPi - 1e-12,
                "fbp: angle " + std::to_string(a) +
                    " outside [0, pi); crop two-ends padding before reconstruction");
    RampKernel kernel = ramp_kernel(sino.num_detectors - 1, geom.detector_spacing);
    Sinogram filtered = apply_ramp(sino, kernel, mode);
    Image img = backproject(filtered, geom);
    const double scale = kPi / sino.num_angles();
    for (double& v : img.pixels) v *= scale;
    return img;
}

} // namespace ctsr
