#include "rng.hpp"

#include "normal.hpp"

#include <cmath>
#include <stdexcept>

namespace wbb {

namespace {

inline void mulhilo64(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> ctr,
                                        std::uint64_t k0, std::uint64_t k1) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo64(kMult0, ctr[0], hi0, lo0);
        mulhilo64(kMult1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return ctr;
}

} // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {}

void RandomStream::refill() {
    buf_ = philox4x64({block_, 0, 0, 0}, seed_, stream_);
    ++block_;
    pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
    if (pos_ == 4) refill();
    return buf_[static_cast<std::size_t>(pos_++)];
}

double RandomStream::next_uniform() {
    // 53 significand bits, offset by half an ulp so 0 and 1 never occur.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::next_normal() {
    ++normal_draws_;
    return std_normal_quantile(next_uniform());
}

double sample_std_normal(RandomStream& rs) { return rs.next_normal(); }

double bridge_midpoint(RandomStream& rs, const Interval& iv, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
        throw std::invalid_argument("bridge_midpoint: endpoint values must be finite");
    }
    return 0.5 * (x + y) + 0.5 * std::sqrt(iv.hi - iv.lo) * rs.next_normal();
}

double bridge_forward(RandomStream& rs, double s, double t, double x) {
    if (!(s >= 0.0 && s < t)) {
        throw std::domain_error("bridge_forward: need 0 <= s < t");
    }
    if (t >= 1.0) {
        throw std::domain_error("bridge_forward: t must be < 1 (the terminal pin is implicit)");
    }
    if (!std::isfinite(x)) {
        throw std::invalid_argument("bridge_forward: current value must be finite");
    }
    const double ratio = (1.0 - t) / (1.0 - s);
    const double mean = x * ratio;
    const double var = (t - s) * ratio;
    return mean + std::sqrt(var) * rs.next_normal();
}

} // namespace wbb
