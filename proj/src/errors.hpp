#pragma once

#include <stdexcept>

namespace wbb {

// The n0 search exceeded its iteration cap.  This is the "output undefined"
// case of the precomputing step, surfaced as an error instead of a hang.
class PrecomputeDivergence : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed or unreadable observation data.
class DataError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// The sample is too small to admit an order-statistic confidence interval
// at the requested level.
class InsufficientSamples : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace wbb
