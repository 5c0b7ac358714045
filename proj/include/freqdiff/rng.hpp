#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace freqdiff {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. Gaussian draws use a fixed Box-Muller
// recipe on top of mt19937_64 so the byte-level sequence is pinned by this
// code, not by the standard library's distribution implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed), stream_seed_(seed) {}

    // Independent stream for item `index` of a batch keyed by `seed`.
    static Rng derive(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= index * 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(s);
        return Rng(a ^ (b + 0x165667b19e3779f9ULL + (a << 6) + (a >> 2)));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    int uniform_int(int n) { return static_cast<int>(uniform() * n); }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t stream_seed() const { return stream_seed_; }

  private:
    std::mt19937_64 eng_;
    std::uint64_t stream_seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Content hash used to key per-item random streams, so results depend on what
// an item is rather than where it sits in a container.
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace freqdiff
