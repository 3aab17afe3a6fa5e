#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntrugkp/common.hpp"
#include "ntrugkp/rng.hpp"

namespace ntrugkp::ring {

enum class Quotient { XnMinus1, XnPlus1 };

struct RingParams {
  int n = 0;
  Quotient quot = Quotient::XnMinus1;
};

// Coefficient vector of length n, lowest degree first.
using Poly = std::vector<i64>;

Poly zero_poly(int n);
Poly one_poly(int n);
bool is_zero(const Poly& f);

Poly poly_add(const Poly& a, const Poly& b);
Poly poly_sub(const Poly& a, const Poly& b);
Poly poly_neg(const Poly& a);

// Centered residue of x mod m, in (-m/2, m/2]. E.g. mod 8 the range is
// {-3,...,4}; 7 -> -1, -5 -> 3, 4 -> 4.
i64 centered(i64 x, i64 m);
Poly reduce_centered(const Poly& f, i64 m);

// Schoolbook product folded by x^n = +1 or -1.
Poly poly_mul(const Poly& a, const Poly& b, const RingParams& ring);
Poly poly_mul_mod(const Poly& a, const Poly& b, const RingParams& ring, i64 m);

// Coefficient mirror f(x) -> f(x^{-1}): index 0 fixed, i -> n-i; for x^n+1
// the moved coefficients pick up a sign.
Poly mirror(const Poly& f, const RingParams& ring);

i64 eval_at_one(const Poly& f);

// Inverse of f in Z_m[x]/(quotient). m must be prime or a power of two
// (extended Euclid over GF(m), plus a Hensel lift for 2^k). Empty when f is
// not a unit.
std::optional<Poly> poly_invert(const Poly& f, const RingParams& ring, i64 m);

struct InvalidModulus : Error {
  explicit InvalidModulus(const std::string& msg) : Error("invalid modulus: " + msg) {}
};

// d1 coefficients +1, d2 coefficients -1, rest 0, positions shuffled.
Poly sample_ternary(int n, int d1, int d2, Rng& rng);
// Independent integer Gaussians with variance sigma2 per coefficient.
Poly sample_gaussian_poly(int n, double sigma2, Rng& rng);

// Multiplication operator x*f as an n x n matrix (coefficient columns).
IntMat rot_matrix(const RingParams& ring);
// Rows of C(f) are x^i * f, so coeff(g*f) = g^T C(f) and C(f)C(g) = C(fg).
IntMat circulant(const Poly& f, const RingParams& ring);
// Rows of A(f) are x^{-i} * f; symmetric for every f, A(f) = sigma * C(f).
IntMat anticirculant(const Poly& f, const RingParams& ring);
// A(1): permutation part of the mirror map (signed for x^n+1).
IntMat sigma_matrix(const RingParams& ring);

// Comma-separated coefficients, lowest degree first.
std::string poly_to_string(const Poly& f);
Poly poly_from_string(const std::string& text);

std::string quotient_name(Quotient q);
std::optional<Quotient> quotient_from_name(const std::string& name);

}  // namespace ntrugkp::ring
