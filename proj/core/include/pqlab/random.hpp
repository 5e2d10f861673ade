#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pqlab::rng {

/// SplitMix64 finalizer; a bijective 64-bit mix used to derive substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of an independent substream `stream` of `seed`.
constexpr std::uint64_t substream(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + 1));
}

/// Substream tags inside one simulation run.
inline constexpr std::uint64_t kServiceStream = 0;
constexpr std::uint64_t arrival_stream(std::size_t class_index0) noexcept {
    return 1 + static_cast<std::uint64_t>(class_index0);
}

/// Exponential variates by inversion on 53-bit uniforms, so sample paths do not
/// depend on the standard library's distribution implementation.
class ExpStream {
public:
    explicit ExpStream(std::uint64_t seed) : engine_(seed) {}

    double next(double rate) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return -std::log1p(-u) / rate;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pqlab::rng
