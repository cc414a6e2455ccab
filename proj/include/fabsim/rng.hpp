#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace fabsim {

// splitmix64, used to derive independent child seeds from a parent seed.
inline std::uint64_t splitmix64(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic RNG. Draw functions are hand-rolled on top of the mt19937_64
// bit stream so results do not depend on the standard library's distribution
// implementations. fork() derives an independent child stream from the seed
// and a caller-chosen stream id; child streams do not depend on how much the
// parent has already drawn, so they can be handed to parallel workers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // uniform in [0, 1)
    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) { return int(uniform() * double(n)); }

    // standard normal via Box-Muller; always consumes exactly two uniforms
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    Rng fork(std::uint64_t stream) const {
        std::uint64_t s = seed_ ^ (0xd1b54a32d192ed03ull * (stream + 1));
        std::uint64_t a = splitmix64(s);
        std::uint64_t b = splitmix64(s);
        return Rng(a ^ (b << 1 | b >> 63));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

}  // namespace fabsim
