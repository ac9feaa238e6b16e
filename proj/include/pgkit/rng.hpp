#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pgkit {

// Deterministic pseudo-random stream with cheap substream derivation.
//
// A stream is identified by a 64-bit key derived from (seed, stream_id).
// substream(id) derives an independent child stream from the parent key, so
// parallel workers can be handed (iteration, worker)-keyed streams whose
// output does not depend on thread scheduling. Generator is xoshiro256++
// seeded through splitmix64; all draws depend only on the key and the call
// sequence.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    RngStream substream(std::uint64_t id) const;
    RngStream substream(std::uint64_t a, std::uint64_t b) const;

    std::uint64_t key() const noexcept { return key_; }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1).
    double uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Marsaglia's polar method; second variate cached.
    double normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) noexcept { return mean + sd * normal(); }

    // Gamma(shape, scale), Marsaglia-Tsang with the shape<1 boost.
    double gamma(double shape, double scale);

    // Inverse gamma with density proportional to x^{-shape-1} exp(-rate/x).
    double inverse_gamma(double shape, double rate) { return 1.0 / gamma(shape, 1.0 / rate); }

    // Student t with dof degrees of freedom (dof beyond 1e12 degenerates to a
    // normal draw, which is exact to double precision and keeps the draw
    // count at one normal).
    double student_t(double dof);

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    struct FromKey {};
    RngStream(FromKey, std::uint64_t key) { reseed(key); }

    void reseed(std::uint64_t key);

    std::array<std::uint64_t, 4> s_{};
    std::uint64_t key_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace pgkit
