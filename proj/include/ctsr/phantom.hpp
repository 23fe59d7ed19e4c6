#pragma once

#include <array>
#include <cmath>
#include <string>

#include "ctsr/common.hpp"
#include "ctsr/geometry.hpp"
#include "ctsr/rng.hpp"

namespace ctsr {

enum class PhantomKind { shepp_logan, random_ellipses };

struct PhantomSpec {
    PhantomKind kind = PhantomKind::shepp_logan;
    int size = 320;
    int ellipse_count = 12; // upper bound for the random kind; count is drawn in [n/2, n]
    std::uint64_t seed = 0;
};

namespace detail {

struct EllipseDef {
    double intensity, a, b, x0, y0, phi_deg;
};

// Modified Shepp-Logan parameter table (Toft intensity variant):
// {intensity, semi-axis a, semi-axis b, center x0, center y0, rotation deg}
// in unit coordinates (x right, y up, image spans [-1, 1]).
inline const std::array<EllipseDef, 10>& shepp_logan_table() {
    static const std::array<EllipseDef, 10> t = {{
        {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
        {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
        {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
        {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
        {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
        {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
        {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
        {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
        {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
    }};
    return t;
}

inline void add_ellipse(Image& img, const EllipseDef& e) {
    const int n = img.size;
    const double c = (n - 1) / 2.0;
    const double phi = e.phi_deg * kPi / 180.0;
    const double ct = std::cos(phi), st = std::sin(phi);
    for (int r = 0; r < n; ++r) {
        const double y = -(r - c) / (n / 2.0);
        for (int col = 0; col < n; ++col) {
            const double x = (col - c) / (n / 2.0);
            const double xr = (x - e.x0) * ct + (y - e.y0) * st;
            const double yr = -(x - e.x0) * st + (y - e.y0) * ct;
            if ((xr / e.a) * (xr / e.a) + (yr / e.b) * (yr / e.b) <= 1.0)
                img.at(r, col) += e.intensity;
        }
    }
}

} // namespace detail

// Pixel-center rasterization; additive composition clamped to [0, 1].
// The random kind draws, in order: count, then per ellipse
// {x0, y0, a, b, angle, intensity} from the seeded stream.
inline Image make_phantom(const PhantomSpec& spec) {
    require(spec.size > 0, "make_phantom: size must be positive");
    Image img(spec.size);
    if (spec.kind == PhantomKind::shepp_logan) {
        for (const auto& e : detail::shepp_logan_table()) detail::add_ellipse(img, e);
    } else {
        Rng rng(spec.seed);
        const int lo = std::max(1, spec.ellipse_count / 2);
        const int count = lo + static_cast<int>(rng.below(spec.ellipse_count - lo + 1));
        for (int i = 0; i < count; ++i) {
            detail::EllipseDef e;
            e.x0 = rng.uniform(-0.55, 0.55);
            e.y0 = rng.uniform(-0.55, 0.55);
            e.a = rng.uniform(0.04, 0.35);
            e.b = rng.uniform(0.04, 0.35);
            e.phi_deg = rng.uniform(0.0, 180.0);
            e.intensity = rng.uniform(0.15, 0.6);
            detail::add_ellipse(img, e);
        }
    }
    for (double& v : img.pixels) v = std::min(1.0, std::max(0.0, v));
    return img;
}

} // namespace ctsr
