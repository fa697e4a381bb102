#pragma once

#include "weights.hpp"

#include <array>
#include <cstdint>

namespace wbb {

// Counter-based random stream.  The generator is a Philox-style 4x64 block
// cipher keyed by (seed, stream): any two distinct (seed, stream) pairs yield
// independent sequences, and the same pair reproduces the same sequence
// bit-for-bit on every platform and under any thread schedule.  Normal
// variates come from the inverse c.d.f., so the uniform-to-normal coupling is
// monotone and golden-value tests stay stable.
//
// A stream is single-owner: no concurrent draws from one instance.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double next_uniform(); // strictly inside (0, 1)
    double next_normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    // Number of normal variates drawn so far.
    std::uint64_t normal_draws() const { return normal_draws_; }

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buf_{};
    int pos_ = 4;
    std::uint64_t normal_draws_ = 0;
};

double sample_std_normal(RandomStream& rs);

// Conditional midpoint value of a Brownian bridge given B(lo) = x, B(hi) = y:
// N((x+y)/2, (hi-lo)/4).
double bridge_midpoint(RandomStream& rs, const Interval& iv, double x, double y);

// Markov step of the bridge pinned at B(1) = 0: given B(s) = x with
// 0 <= s < t < 1, draws from N(x (1-t)/(1-s), (t-s)(1-t)/(1-s)).
double bridge_forward(RandomStream& rs, double s, double t, double x);

} // namespace wbb
