#pragma once

#include <cmath>
#include <cstdint>

namespace cipherlab {

// Counter-based splittable generator. A draw is a pure function of
// (seed, stream, counter), so identical triples reproduce identical
// values on every platform. Streams are cheap to fork and never share
// state with their parent.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t counter() const { return counter_; }

    // Independent substream; the child starts with counter 0.
    Rng fork(std::uint64_t substream) const {
        return Rng(seed_, mix(stream_ ^ mix(substream + 0x1d8e4e27c47d124full)));
    }
    Rng fork(std::uint64_t a, std::uint64_t b) const { return fork(a).fork(b); }

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + 0x9e3779b97f4a7c15ull;
        z = mix(z ^ mix(stream_ + 0xbf58476d1ce4e5b9ull));
        return mix(z + counter_++ * 0x94d049bb133111ebull);
    }

    // Uniform on [0,1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0,n). Fixed-point multiply keeps the mapping
    // platform-independent.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Box-Muller; consumes exactly two draws per call (no cached spare,
    // keeping the counter a complete description of generator state).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double exponential() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return -std::log(u);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ull;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

} // namespace cipherlab
