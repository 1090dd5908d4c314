#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace pearsonq {

/// splitmix64 finalizer. Full-avalanche 64->64 mixing, used to derive
/// substream states from (master_seed, experiment_id, replication_index).
[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a hash of a label, for naming experiment streams ("calibrate/ks/n=100").
[[nodiscard]] constexpr std::uint64_t stream_label(std::string_view label) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// One independent random stream. The generator is xoshiro256++ whose state is
/// derived by hashing (master_seed, stream_id); identical inputs produce the
/// identical sequence on every platform and thread schedule.
class RngStream {
public:
    RngStream() : RngStream(0, 0) {}

    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed(master_seed), stream_id(stream_id) {
        std::uint64_t z = 0x9E3779B97F4A7C15ULL;
        z = mix64(z ^ master_seed);
        z = mix64(z ^ stream_id);
        for (auto& word : state_) {
            z += 0x9E3779B97F4A7C15ULL;
            word = mix64(z);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t master_seed;
    std::uint64_t stream_id;

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0,1]; safe as a log() argument.
    double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via the Marsaglia polar method; the second variate of
    /// each accepted pair is cached in the stream.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// Deterministic substream for one Monte Carlo replication. The stream is a
/// pure function of the three inputs, so results do not depend on how
/// replications are scheduled across workers.
[[nodiscard]] inline RngStream substream(std::uint64_t master_seed,
                                         std::uint64_t experiment_id,
                                         std::uint64_t replication_index) {
    const std::uint64_t id =
        mix64(experiment_id + 0x2545F4914F6CDD1DULL * (replication_index + 1));
    return RngStream(master_seed, id);
}

}  // namespace pearsonq
