#include "pgkit/rng.hpp"

#include "pgkit/errors.hpp"

namespace pgkit {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += kGolden);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t parent, std::uint64_t id) noexcept {
    std::uint64_t state = parent ^ (kGolden * (id + 1));
    std::uint64_t k = splitmix64(state);
    k = splitmix64(state) ^ k;
    return k;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id) {
    reseed(derive_key(seed, stream_id));
}

void RngStream::reseed(std::uint64_t key) {
    key_ = key;
    std::uint64_t state = key;
    for (auto& word : s_) word = splitmix64(state);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = kGolden;
    have_spare_ = false;
}

RngStream RngStream::substream(std::uint64_t id) const {
    return RngStream(FromKey{}, derive_key(key_, id));
}

RngStream RngStream::substream(std::uint64_t a, std::uint64_t b) const {
    return RngStream(FromKey{}, derive_key(derive_key(key_, a), b));
}

double RngStream::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0) || !std::isfinite(shape) || !std::isfinite(scale))
        throw Error("rng", "gamma draw requires positive finite shape and scale");
    if (shape < 1.0) {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
        if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
}

double RngStream::student_t(double dof) {
    if (!(dof > 0.0)) throw Error("rng", "student_t draw requires positive dof");
    const double z = normal();
    if (dof > 1e12) return z;
    const double chi2 = gamma(0.5 * dof, 2.0);
    return z * std::sqrt(dof / chi2);
}

}  // namespace pgkit
