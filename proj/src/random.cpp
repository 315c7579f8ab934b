#include "chronosim/random.hpp"

#include <cmath>
#include <numbers>

namespace chronosim {

namespace {
// 53-bit uniform in (0, 1].
double unit_open(uint64_t bits) { return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53; }
}  // namespace

double hashed_normal(uint64_t seed, uint64_t index) {
  const uint64_t a = splitmix64(seed ^ splitmix64(index));
  const uint64_t b = splitmix64(a);
  // Box-Muller, cosine branch.
  return std::sqrt(-2.0 * std::log(unit_open(a))) * std::cos(2.0 * std::numbers::pi * unit_open(b));
}

}  // namespace chronosim
