#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ctsr/common.hpp"
#include "ctsr/filtering.hpp"
#include "ctsr/geometry.hpp"

namespace ctsr {

// Measurement-domain manipulations. The flip identity behind all of them:
// under parallel projection, the projection at theta + pi equals the
// projection at theta reversed along the detector axis (j -> S-1-j).

inline void flip_column(const double* src, double* dst, int s) {
    for (int j = 0; j < s; ++j) dst[j] = src[s - 1 - j];
}

// Keeps angle indices {0, k, 2k, ...}.
inline Sinogram sparse_sample(const Sinogram& full, int every_k) {
    require(every_k >= 1, "sparse_sample: every_k must be >= 1");
    std::vector<double> angles;
    for (int a = 0; a < full.num_angles(); a += every_k) angles.push_back(full.angles[a]);
    Sinogram out(full.num_detectors, angles);
    int oi = 0;
    for (int a = 0; a < full.num_angles(); a += every_k, ++oi) {
        const double* src = full.column(a);
        double* dst = out.column(oi);
        for (int j = 0; j < full.num_detectors; ++j) dst[j] = src[j];
    }
    return out;
}

// Keeps every factor-th column starting at index 0.
inline Sinogram downsample_angular(const Sinogram& sino, int factor) {
    require(factor >= 1, "downsample_angular: factor must be >= 1");
    return sparse_sample(sino, factor);
}

// Per-detector linear interpolation along the angle axis onto a uniform
// [0, pi) grid of target_angles columns. Target angles beyond the last
// sample interpolate against the virtual pi column, which is the
// detector-flip of the 0 column (flip identity). Every target angle that
// coincides with a source angle copies that column bitwise.
inline Sinogram linear_upsample_angular(const Sinogram& sparse, int target_angles) {
    require(target_angles >= sparse.num_angles(),
            "linear_upsample_angular: target grid smaller than source");
    const int S = sparse.num_detectors;
    const int P = sparse.num_angles();
    std::vector<double> tangles(target_angles);
    for (int i = 0; i < target_angles; ++i) tangles[i] = i * kPi / target_angles;

    // every source angle must lie on the target grid
    std::vector<int> src_pos(P, -1);
    for (int k = 0; k < P; ++k) {
        const double pos = sparse.angles[k] * target_angles / kPi;
        const int idx = static_cast<int>(std::lround(pos));
        if (idx < 0 || idx >= target_angles || std::fabs(pos - idx) > 1e-9)
            fail("linear_upsample_angular: target grid is not a superset of source angles "
                 "(source angle " + std::to_string(sparse.angles[k]) + ")");
        src_pos[k] = idx;
    }

    Sinogram out(S, tangles);
    std::vector<double> virt(S); // virtual column at angle pi
    flip_column(sparse.column(0), virt.data(), S);

    int k = 0; // index of last source angle <= current target angle
    for (int t = 0; t < target_angles; ++t) {
        while (k + 1 < P && src_pos[k + 1] <= t) ++k;
        double* dst = out.column(t);
        if (src_pos[k] == t) {
            const double* c = sparse.column(k);
            for (int j = 0; j < S; ++j) dst[j] = c[j];
            continue;
        }
        const double a0 = sparse.angles[k];
        const double* c0 = sparse.column(k);
        double a1;
        const double* c1;
        if (k + 1 < P) {
            a1 = sparse.angles[k + 1];
            c1 = sparse.column(k + 1);
        } else {
            a1 = kPi;
            c1 = virt.data();
        }
        const double w = (tangles[t] - a0) / (a1 - a0);
        for (int j = 0; j < S; ++j) dst[j] = (1.0 - w) * c0[j] + w * c1[j];
    }
    return out;
}

// Prepends flipped copies of the last `pad` columns at angles theta - pi and
// appends flipped copies of the first `pad` columns at angles theta + pi.
// Output layout: [flipped tail | original | flipped head]; the angle axis
// stays monotone. No original value is modified.
inline Sinogram two_ends_extend(const Sinogram& sino, int pad) {
    require(pad >= 0, "two_ends_extend: pad must be non-negative");
    require(pad < sino.num_angles(), "two_ends_extend: pad must be < num_angles");
    const int S = sino.num_detectors;
    const int P = sino.num_angles();
    std::vector<double> angles(P + 2 * pad);
    for (int i = 0; i < pad; ++i) angles[i] = sino.angles[P - pad + i] - kPi;
    for (int i = 0; i < P; ++i) angles[pad + i] = sino.angles[i];
    for (int i = 0; i < pad; ++i) angles[pad + P + i] = sino.angles[i] + kPi;
    Sinogram out(S, angles);
    for (int i = 0; i < pad; ++i)
        flip_column(sino.column(P - pad + i), out.column(i), S);
    for (int i = 0; i < P; ++i) {
        const double* src = sino.column(i);
        double* dst = out.column(pad + i);
        for (int j = 0; j < S; ++j) dst[j] = src[j];
    }
    for (int i = 0; i < pad; ++i)
        flip_column(sino.column(i), out.column(pad + P + i), S);
    return out;
}

// Removes `pad` columns from each end; exact inverse of two_ends_extend.
inline Sinogram two_ends_crop(const Sinogram& sino, int pad) {
    require(pad >= 0, "two_ends_crop: pad must be non-negative");
    require(sino.num_angles() > 2 * pad, "two_ends_crop: pad too large for angle count");
    const int S = sino.num_detectors;
    const int P = sino.num_angles() - 2 * pad;
    std::vector<double> angles(sino.angles.begin() + pad, sino.angles.begin() + pad + P);
    Sinogram out(S, angles);
    for (int i = 0; i < P; ++i) {
        const double* src = sino.column(pad + i);
        double* dst = out.column(i);
        for (int j = 0; j < S; ++j) dst[j] = src[j];
    }
    return out;
}

// Four reconstructions in ascending view count, e.g. 23/45/90/180.
struct CascadeStack {
    std::array<Image, 4> channels;
    std::array<int, 4> source_view_counts{};
};

// channels = [fbp(sparse), fbp(down4(inpainted)), fbp(down2(inpainted)),
// fbp(inpainted)]. `inpainted_full` must be on the base (cropped) grid.
inline CascadeStack build_cascade(const Sinogram& sparse, const Sinogram& inpainted_full,
                                  const Geometry& geom) {
    require(sparse.num_detectors == geom.num_detectors &&
                inpainted_full.num_detectors == geom.num_detectors,
            "build_cascade: detector count mismatch");
    require(inpainted_full.num_angles() == geom.num_angles(),
            "build_cascade: inpainted sinogram must be on the base angle grid");
    CascadeStack stack;
    const Sinogram down4 = downsample_angular(inpainted_full, 4);
    const Sinogram down2 = downsample_angular(inpainted_full, 2);
    auto sub_geom = [&](const Sinogram& s) {
        Geometry g = geom;
        g.angles = s.angles;
        return g;
    };
    stack.channels[0] = fbp(sparse, sub_geom(sparse));
    stack.channels[1] = fbp(down4, sub_geom(down4));
    stack.channels[2] = fbp(down2, sub_geom(down2));
    stack.channels[3] = fbp(inpainted_full, geom);
    stack.source_view_counts = {sparse.num_angles(), down4.num_angles(), down2.num_angles(),
                                inpainted_full.num_angles()};
    for (int c = 1; c < 4; ++c)
        require(stack.source_view_counts[c] > stack.source_view_counts[c - 1],
                "build_cascade: channel view counts must be ascending");
    return stack;
}

} // namespace ctsr
