#pragma once

#include <cstdint>
#include <random>

namespace ctsr {

// Single seeded stream used everywhere randomness is needed. Uniform and
// normal draws are derived from raw mt19937_64 output by fixed arithmetic
// (not std distributions), so a given seed produces the same sequence on
// any standard library. Draw order is part of the reproducibility contract.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is < 2^-40 for the n used here (dataset/patch indices)
        return gen_() % n;
    }

    // Box-Muller; draws two uniforms per call
    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // independent child stream, e.g. one per dataset sample
    Rng split() { return Rng(gen_() ^ 0x9e3779b97f4a7c15ull); }

  private:
    std::mt19937_64 gen_;
};

} // namespace ctsr
