// rng.hpp — counter-based random number generation.
//
// Every draw is a pure function of (seed, stream, substream, index): there is
// no generator state, so parallel workers can consume disjoint index ranges of
// the same logical stream and reproduce results independently of scheduling.
#pragma once

#include <cstdint>

namespace lpt::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// Named stream ids. Data and sign draws must never share a stream: changing
// the sign seed may not perturb the sample, and vice versa.
namespace stream {
inline constexpr std::uint64_t sample = 0x01;
inline constexpr std::uint64_t signs = 0x02;
inline constexpr std::uint64_t oracle = 0x03;
inline constexpr std::uint64_t oscillation = 0x04;
inline constexpr std::uint64_t verify = 0x05;
inline constexpr std::uint64_t weights = 0x06;
}  // namespace stream

// SplitMix64 finalizer (Stafford mix13).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0)
        : key_(derive_key(seed, stream_id, substream)) {}

    // Substream fork, e.g. one substream per Monte Carlo trial.
    CounterRng fork(std::uint64_t substream) const {
        CounterRng r(*this);
        r.key_ = mix64(mix64(key_ + kGolden) ^ (substream + 0x6A09E667F3BCC909ull));
        return r;
    }

    std::uint64_t bits(std::uint64_t index) const {
        return mix64(mix64(key_ + index * kGolden));
    }

    // Uniform on the open interval (0,1); never returns an exact endpoint.
    double u01(std::uint64_t index) const {
        return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    std::uint64_t key() const { return key_; }

private:
    static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id,
                                    std::uint64_t substream) {
        std::uint64_t k = mix64(seed + kGolden);
        k = mix64(k ^ (stream_id + 0xD1B54A32D192ED03ull));
        k = mix64(k ^ (substream + 0x6A09E667F3BCC909ull));
        return k;
    }

    std::uint64_t key_;
};

}  // namespace lpt::rng
