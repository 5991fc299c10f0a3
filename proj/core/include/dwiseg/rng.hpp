#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dwiseg {

/// SplitMix64 finalizer; full-avalanche mix of a 64-bit word.
inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Sequential stream generator (SplitMix64). Hand-rolled so that identical
/// seeds give identical sequences on every platform and standard library;
/// model reproducibility depends on this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix64(state_);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, n). Requires n > 0.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller.
    double normal() {
        double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; // (0,1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

struct NormalPair {
    double n0;
    double n1;
};

/// Counter-based pair of independent standard normals. The draw depends only
/// on (seed, stream, counter), so per-voxel noise is order-independent and a
/// parallel synthesis partitions the stream deterministically.
inline NormalPair counter_normal_pair(std::uint64_t seed, std::uint64_t stream,
                                      std::uint64_t counter) {
    std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull);
    h = mix64(h ^ (stream + 0x9e3779b97f4a7c15ull));
    h = mix64(h ^ (counter + 0x9e3779b97f4a7c15ull));
    std::uint64_t g = mix64(h ^ 0xd1b54a32d192ed03ull);

    double u1 = static_cast<double>((h >> 11) + 1) * 0x1.0p-53; // (0,1]
    double u2 = static_cast<double>(g >> 11) * 0x1.0p-53;       // [0,1)
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925287 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

} // namespace dwiseg
