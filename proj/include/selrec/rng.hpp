#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace selrec {

/// SplitMix64 finaliser; used to derive seeds, not as a generator.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for an independent sub-experiment identified by `tag`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return mix64(mix64(seed) ^ mix64(~tag)); }

/// Random stream "mt19937_64/seed_seq": a Mersenne Twister seeded from
/// (seed, stream index) through std::seed_seq. Streams for distinct indices
/// are treated as independent; replicate r of an experiment always uses
/// stream r, so results do not depend on how replicates are scheduled.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                          0x5e1ec7edU};
        engine_.seed(seq);
    }

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

private:
    std::mt19937_64 engine_;
};

}  // namespace selrec
