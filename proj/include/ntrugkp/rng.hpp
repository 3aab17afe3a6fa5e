#pragma once

#include <cstdint>
#include <initializer_list>

#include "ntrugkp/common.hpp"

namespace ntrugkp {

// Counter-style deterministic generator (splitmix64 core). Every experiment
// derives one Rng per (master seed, stream tags...) so results do not depend
// on thread count or evaluation order. Determinism is per-build: the float
// helpers go through libm.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();
  // Uniform in [0, 1), 53-bit mantissa.
  double uniform();
  // Uniform integer in [0, bound), bound > 0, rejection-free bias via 128-bit
  // multiply would be overkill here; plain rejection keeps it exact.
  uint64_t bounded(uint64_t bound);
  // N(0, sigma^2), Box-Muller with a cached spare.
  double normal(double sigma);

  // Integer Gaussian with weight exp(-k^2 / (2*sigma2)), support truncated at
  // |k| <= ceil(6*sqrt(sigma2)). Rejection sampler: uniform integer proposal
  // over the window, Gaussian acceptance weight; exact on the window.
  i64 discrete_gaussian(double sigma2);

 private:
  uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Hash a master seed with stream tags into an independent substream seed.
uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> tags);

}  // namespace ntrugkp
