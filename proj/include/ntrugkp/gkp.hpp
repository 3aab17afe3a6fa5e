#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

#include "ntrugkp/common.hpp"
#include "ntrugkp/lattice.hpp"
#include "ntrugkp/ntru.hpp"
#include "ntrugkp/ring.hpp"

namespace ntrugkp::gkp {

struct NotInDualLattice : Error {
  explicit NotInDualLattice(const std::string& msg)
      : Error("vector outside the code's integer lattice: " + msg) {}
};
struct SecondBlockNonzero : Error {
  explicit SecondBlockNonzero(const std::string& msg)
      : Error("syndrome wiring violation: " + msg) {}
};
struct RadiusTooSmall : Error {
  explicit RadiusTooSmall(const std::string& msg) : Error("radius too small: " + msg) {}
};

// Integer residual after the trivial correction, split into the two
// conjugate blocks of length n.
struct ResidualError {
  ring::Poly u;
  ring::Poly v;
};

// A scaled symplectic code built on the q-symplectic lattice generated by
// basis. All integer-side work happens in units of 1/sqrt(lambda*q): the
// code lattice corresponds to lambda*L, its dual to L, and the trivial
// (square) code to lambda*q*Z^2n with dual Z^2n.
struct GkpCode {
  int n = 0;
  i64 q = 0;
  i64 lambda = 2;
  ring::RingParams ring;
  ring::Poly h;      // centered mod q
  IntMat basis;      // H = [[I, A(h)], [0, qI]]
  IntMat flipped;    // H^J = [[qI, 0], [-A(h), I]]
  IntMat a_h;        // A(h), cached for syndrome maps
  i64 lambda1_sq = 0;
  std::vector<i64> short_witness;  // realizes lambda1_sq

  mpq_class distance_sq() const {
    mpq_class r((long)lambda1_sq, (long)(lambda * q));
    r.canonicalize();
    return r;
  }
  double delta() const;
  double scale() const;  // sqrt(lambda*q)
};

// Builds the code lattice from an NTRU public key; runs exact SVP on the
// 2n-dimensional basis to cache the shortest-vector length.
GkpCode code_from_ntru(const ring::Poly& h, i64 lambda, const ntru::NtruParams& params);

struct TrivialCorrection {
  std::vector<double> syndrome;  // fractional parts in [-1/2, 1/2), integer units
  ResidualError residual;        // rounded integer displacement (u, v)
};
// Rounds sqrt(lambda*q)*e half-up per coordinate.
TrivialCorrection trivial_syndrome_and_correct(const std::vector<double>& e, const GkpCode& code);

// Centered (v - u A(h)) mod q. The first coefficient block of a residual can
// never carry syndrome; a violation of that invariant throws.
std::vector<i64> residual_syndrome(const ResidualError& r, const GkpCode& code);

// Coefficients of x in the basis, reduced mod lambda into [0, lambda).
// Throws NotInDualLattice when x is not an integer combination of the rows.
std::vector<i64> logical_coset(const std::vector<i64>& x, const GkpCode& code);
bool is_trivial_coset(const std::vector<i64>& label);

struct DistanceInfo {
  i64 min_norm_sq = 0;    // integer units
  mpq_class delta_sq;     // min_norm_sq / (lambda*q), physical units
  i64 kissing = 0;        // antipodal pairs realizing the minimum
  std::vector<i64> witness;
};

// Shortest lattice vector outside lambda*L. The minimum shell of L can never
// lie inside lambda*L, so this equals lambda1; the membership filter stays as
// a guard.
DistanceInfo distance_of_basis(const IntMat& basis, i64 lambda, i64 q);
DistanceInfo distance(const GkpCode& code);

// Same quantity read off the theta-series gap between L and lambda*L;
// reference path for dimensions 2n <= 8. Throws RadiusTooSmall when no gap
// appears up to r2max.
DistanceInfo distance_of_basis_theta(const IntMat& basis, i64 lambda, i64 q, i64 r2max);
DistanceInfo distance_from_theta(const GkpCode& code, i64 r2max);

struct MldResult {
  std::vector<i64> label;            // arg max coset, entries in [0, lambda)
  double best_log_weight = 0;        // log of the winning Gaussian coset sum
  double runner_up_log_weight = 0;
  double truncation_radius_sq = 0;   // integer-unit enumeration radius used
};
// Maximum-likelihood coset of the displacement e under the isotropic
// Gaussian channel of coordinate deviation sigma_bar (physical units):
// maximizes sum_{w in lambda*L} exp(-|c0 + xi*H + w|^2 / (2*(sigma_bar*scale)^2))
// over labels xi, with c0 the observed displacement in integer units.
// Ties resolve toward the lexicographically smaller label. r2max < 0 picks
// the lambda1_sq + 8 shell width default. Dimensions 2n <= 8 only.
MldResult mld_decode(const std::vector<double>& e, const GkpCode& code, double sigma_bar,
                     double r2max = -1);

struct ThresholdInfo {
  double bound = 0;  // min over counted cosets of delta_xi^2 / ln(N_xi), physical units
  std::vector<std::vector<i64>> unit_multiplicity;  // labels skipped for N_xi = 1
  std::vector<i64> arg_label;
  double arg_delta_sq = 0;  // physical units
  i64 arg_count = 0;
  i64 next_norm_sq = 0;  // next shell of the arg coset, integer units
  i64 next_count = 0;
};
// Exact per-coset minimum distances and multiplicities via CVP enumeration.
// Dimensions 2n <= 8 only.
ThresholdInfo threshold_bound(const GkpCode& code);

}  // namespace ntrugkp::gkp
