#pragma once

#include <cstdint>
#include <cmath>

namespace pathsplit {

/// Counter-based random stream. Streams are keyed by (seed, path, step, level)
/// so that Monte Carlo runs are reproducible regardless of thread scheduling:
/// the draws consumed for a given path/step never depend on what other workers
/// are doing.
///
/// The generator is a SplitMix64 sequence whose initial state is an avalanche
/// mix of the key tuple. Distinct tuples give statistically independent
/// streams; identical tuples give identical draws.
class RngStream {
public:
    RngStream() = default;
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return finalize(state_);
    }

    /// Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe as a log() argument.
    double uniform_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Standard normal draw (Box-Muller; the second variate is cached, so
    /// normals are consumed from the underlying counter two at a time).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Normal with mean zero and the given standard deviation.
    double normal(double stddev) { return stddev * normal(); }

private:
    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

namespace detail {
inline std::uint64_t mix_key(std::uint64_t acc, std::uint64_t word) {
    acc ^= word * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL + (acc << 6) + (acc >> 2);
    acc ^= acc >> 30;
    acc *= 0xbf58476d1ce4e5b9ULL;
    acc ^= acc >> 27;
    acc *= 0x94d049bb133111ebULL;
    acc ^= acc >> 31;
    return acc;
}
} // namespace detail

/// Pure function from a key tuple to a random stream. Identical inputs give
/// identical streams; distinct tuples give statistically independent streams.
inline RngStream stream_for(std::uint64_t seed, std::uint64_t path_index,
                            std::uint64_t step_index, std::uint64_t level) {
    std::uint64_t acc = detail::mix_key(0x8c95d4a7b1e3f20dULL, seed);
    acc = detail::mix_key(acc, path_index);
    acc = detail::mix_key(acc, step_index);
    acc = detail::mix_key(acc, level);
    return RngStream(acc);
}

/// Derives a sub-seed for an independent experiment (e.g. one per step count
/// in a convergence study).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
    return detail::mix_key(detail::mix_key(0xa52fb3161ce4e5b9ULL, seed), tag);
}

} // namespace pathsplit
