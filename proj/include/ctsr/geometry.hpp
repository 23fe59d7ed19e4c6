#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ctsr/common.hpp"

namespace ctsr {

// Parallel-beam acquisition description. Detector j sits at
// s_j = (j - (S-1)/2) * detector_spacing; the base angle grid is
// theta_i = i*pi/P (endpoint-exclusive). Extended grids produced by
// two_ends_extend may reach into [-pad*dtheta, pi + pad*dtheta).
struct Geometry {
    int num_detectors = 0;
    double detector_spacing = 1.0;
    std::vector<double> angles;
    int image_size = 0;

    int num_angles() const { return static_cast<int>(angles.size()); }

    static Geometry parallel(int num_detectors, int num_angles, int image_size = 0,
                             double spacing = 1.0) {
        require(num_detectors > 0, "Geometry: num_detectors must be positive");
        require(num_angles > 0, "Geometry: num_angles must be positive");
        Geometry g;
        g.num_detectors = num_detectors;
        g.detector_spacing = spacing;
        g.image_size = image_size > 0 ? image_size : num_detectors;
        g.angles.resize(num_angles);
        for (int i = 0; i < num_angles; ++i) g.angles[i] = i * kPi / num_angles;
        return g;
    }

    void validate() const {
        require(num_detectors > 0 && image_size > 0 && !angles.empty(),
                "Geometry: empty or non-positive fields");
        require(detector_spacing > 0, "Geometry: detector_spacing must be positive");
        for (std::size_t i = 1; i < angles.size(); ++i)
            require(angles[i] > angles[i - 1], "Geometry: angles must be strictly increasing");
    }
};

// Square attenuation image, row-major. Pixel (row r, col c) is centered at
// world (x, y) = (c - (size-1)/2, r - (size-1)/2); spacing 1.
struct Image {
    int size = 0;
    std::vector<double> pixels;

    Image() = default;
    explicit Image(int n) : size(n), pixels(static_cast<std::size_t>(n) * n, 0.0) {}

    double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * size + c]; }
    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * size + c]; }
};

// Measurement grid: one column of num_detectors samples per angle,
// detector index fastest-varying.
struct Sinogram {
    int num_detectors = 0;
    std::vector<double> angles;
    std::vector<double> data; // data[a * num_detectors + j]

    Sinogram() = default;
    Sinogram(int s, std::vector<double> ang)
        : num_detectors(s), angles(std::move(ang)),
          data(static_cast<std::size_t>(s) * angles.size(), 0.0) {}

    int num_angles() const { return static_cast<int>(angles.size()); }

    double& at(int det, int angle) {
        return data[static_cast<std::size_t>(angle) * num_detectors + det];
    }
    double at(int det, int angle) const {
        return data[static_cast<std::size_t>(angle) * num_detectors + det];
    }
    double* column(int angle) { return &data[static_cast<std::size_t>(angle) * num_detectors]; }
    const double* column(int angle) const {
        return &data[static_cast<std::size_t>(angle) * num_detectors];
    }
};

namespace detail {

// Enumerates the sparse interpolation weights of one projection ray.
// Ray (theta, s): points p with p.omega = s, omega = (cos, sin). Joseph
// discretization: step along the axis most orthogonal to the ray
// (rows when |cos| >= |sin|, else columns), linear interpolation along
// the other axis, weighted by the traversed length per step. Both the
// forward projector and the backprojector consume the same weights, so
// the pair is an exact algebraic transpose.
template <typename Fn>
inline void joseph_ray(int n, double cos_t, double sin_t, double s, Fn&& emit) {
    const double center = (n - 1) / 2.0;
    if (std::fabs(cos_t) >= std::fabs(sin_t)) {
        const double step_len = 1.0 / std::fabs(cos_t);
        for (int r = 0; r < n; ++r) {
            const double y = r - center;
            const double xc = (s - y * sin_t) / cos_t + center;
            const int i0 = static_cast<int>(std::floor(xc));
            const double f = xc - i0;
            if (i0 >= 0 && i0 < n) emit(static_cast<std::size_t>(r) * n + i0, (1.0 - f) * step_len);
            if (i0 + 1 >= 0 && i0 + 1 < n)
                emit(static_cast<std::size_t>(r) * n + i0 + 1, f * step_len);
        }
    } else {
        const double step_len = 1.0 / std::fabs(sin_t);
        for (int c = 0; c < n; ++c) {
            const double x = c - center;
            const double yc = (s - x * cos_t) / sin_t + center;
            const int i0 = static_cast<int>(std::floor(yc));
            const double f = yc - i0;
            if (i0 >= 0 && i0 < n) emit(static_cast<std::size_t>(i0) * n + c, (1.0 - f) * step_len);
            if (i0 + 1 >= 0 && i0 + 1 < n)
                emit(static_cast<std::size_t>(i0 + 1) * n + c, f * step_len);
        }
    }
}

} // namespace detail

inline Sinogram radon_forward(const Image& image, const Geometry& geom) {
    geom.validate();
    require(image.size == geom.image_size,
            "radon_forward: image size " + std::to_string(image.size) +
                " does not match geometry image_size " + std::to_string(geom.image_size));
    Sinogram sino(geom.num_detectors, geom.angles);
    const int S = geom.num_detectors;
    const int n = image.size;
    const double det_c = (S - 1) / 2.0;
    for (int a = 0; a < sino.num_angles(); ++a) {
        const double ct = std::cos(geom.angles[a]);
        const double st = std::sin(geom.angles[a]);
        double* col = sino.column(a);
        for (int j = 0; j < S; ++j) {
            const double s = (j - det_c) * geom.detector_spacing;
            double acc = 0.0;
            detail::joseph_ray(n, ct, st, s,
                               [&](std::size_t px, double w) { acc += image.pixels[px] * w; });
            col[j] = acc;
        }
    }
    return sino;
}

inline Image backproject(const Sinogram& sino, const Geometry& geom) {
    geom.validate();
    require(sino.num_detectors == geom.num_detectors,
            "backproject: sinogram has " + std::to_string(sino.num_detectors) +
                " detectors, geometry expects " + std::to_string(geom.num_detectors));
    require(sino.num_angles() == geom.num_angles(),
            "backproject: sinogram has " + std::to_string(sino.num_angles()) +
                " angles, geometry expects " + std::to_string(geom.num_angles()));
    Image img(geom.image_size);
    const int S = geom.num_detectors;
    const int n = geom.image_size;
    const double det_c = (S - 1) / 2.0;
    for (int a = 0; a < sino.num_angles(); ++a) {
        const double ct = std::cos(geom.angles[a]);
        const double st = std::sin(geom.angles[a]);
        const double* col = sino.column(a);
        for (int j = 0; j < S; ++j) {
            const double s = (j - det_c) * geom.detector_spacing;
            const double v = col[j];
            if (v == 0.0) continue;
            detail::joseph_ray(n, ct, st, s,
                               [&](std::size_t px, double w) { img.pixels[px] += v * w; });
        }
    }
    return img;
}

} // namespace ctsr
