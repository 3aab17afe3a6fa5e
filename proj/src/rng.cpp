#include "ntrugkp/rng.hpp"

#include <cmath>

namespace ntrugkp {

uint64_t Rng::next_u64() {
  // splitmix64 (public-domain constants).
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return (next_u64() >> 11) * 0x1.0p-53;
}

uint64_t Rng::bounded(uint64_t bound) {
  // Rejection from the top to avoid modulo bias.
  uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double Rng::normal(double sigma) {
  if (has_spare_) {
    has_spare_ = false;
    return spare_ * sigma;
  }
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 == 0.0);
  u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a) * sigma;
}

i64 Rng::discrete_gaussian(double sigma2) {
  if (!(sigma2 > 0.0)) return 0;
  i64 tail = (i64)std::ceil(6.0 * std::sqrt(sigma2));
  uint64_t width = (uint64_t)(2 * tail + 1);
  for (;;) {
    i64 k = (i64)bounded(width) - tail;
    double accept = std::exp(-(double)k * (double)k / (2.0 * sigma2));
    if (uniform() < accept) return k;
  }
}

uint64_t derive_seed(uint64_t master, std::initializer_list<uint64_t> tags) {
  Rng h(master ^ 0xa5a5a5a55a5a5a5aULL);
  uint64_t acc = h.next_u64();
  for (uint64_t t : tags) {
    Rng g(acc ^ (t + 0x9e3779b97f4a7c15ULL));
    acc = g.next_u64();
  }
  return acc;
}

}  // namespace ntrugkp
