#include <cmath>

#include "hatmatch/rng.hpp"

namespace hatmatch {

double SplitMix::normal() noexcept {
  // Box-Muller; one variate per call keeps the stream position obvious.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int SplitMix::poisson(double mean) noexcept {
  if (mean <= 0.0) return 0;
  if (mean > 60.0) {
    const double draw = std::round(mean + std::sqrt(mean) * normal());
    return draw < 0.0 ? 0 : static_cast<int>(draw);
  }
  // Knuth multiplication method.
  const double limit = std::exp(-mean);
  int k = 0;
  double prod = uniform();
  while (prod > limit) {
    ++k;
    prod *= uniform();
  }
  return k;
}

}  // namespace hatmatch
