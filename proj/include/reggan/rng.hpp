#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace reggan {

/// Deterministic random source. Wraps a mersenne-twister engine and keeps all
/// distribution logic explicit so that serialized state fully determines the
/// stream (std::normal_distribution caches a hidden second sample, which would
/// break checkpoint round trips; Box-Muller below does not).
class Rng {
  public:
    Rng() : engine_(0x9e3779b97f4a7c15ull) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform double in [lo, hi). Returns lo exactly when hi == lo.
    double uniform(double lo, double hi) {
        if (hi == lo) return lo;
        return lo + (hi - lo) * std::generate_canonical<double, 53>(engine_);
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_index(std::uint64_t n) {
        std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
        return d(engine_);
    }

    /// Standard normal via Box-Muller; always consumes exactly two uniforms.
    double normal(double mean = 0.0, double stddev = 1.0) {
        double u1 = std::generate_canonical<double, 53>(engine_);
        double u2 = std::generate_canonical<double, 53>(engine_);
        if (u1 <= 0.0) u1 = 1e-300;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// Derive an independent child seed; advances this stream by one draw.
    std::uint64_t fork_seed() { return splitmix(engine_()); }

    std::string serialize() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    static Rng deserialize(const std::string& state) {
        Rng r;
        std::istringstream is(state);
        is >> r.engine_;
        return r;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

  private:
    std::mt19937_64 engine_;
};

} // namespace reggan
