#pragma once

#include <gmpxx.h>

#include <map>
#include <optional>
#include <vector>

#include "ntrugkp/common.hpp"

namespace ntrugkp::lattice {

struct DimensionTooLarge : Error {
  explicit DimensionTooLarge(const std::string& msg) : Error("dimension too large: " + msg) {}
};
struct PointCapExceeded : Error {
  explicit PointCapExceeded(const std::string& msg) : Error("point cap exceeded: " + msg) {}
};
struct NotFullRank : Error {
  explicit NotFullRank(const std::string& msg) : Error("not full rank: " + msg) {}
};

// Basis rows are the generators; rows <= cols always.
using Basis = IntMat;
using RatMat = std::vector<std::vector<mpq_class>>;

inline constexpr int kMaxEnumDim = 48;   // hard cap for SVP/HKZ enumeration
inline constexpr int kMaxCvpDim = 34;    // hard cap for CVP enumeration

// Float Gram-Schmidt of the rows: mu lower-triangular, squared GS norms.
struct GsInfo {
  std::vector<double> mu;  // row-major m x m, mu[i*m+j] valid for j < i
  std::vector<double> bstar_sq;
};
GsInfo gram_schmidt(const Basis& b);

// Exact rational Gram-Schmidt (reference path; also used on rational bases).
struct GsExact {
  RatMat mu;
  std::vector<mpq_class> bstar_sq;
  RatMat bstar;  // the orthogonalized vectors themselves
};
GsExact gram_schmidt_exact(const RatMat& rows);
RatMat rat_from_int(const Basis& b);

// In-place delta-LLL on rows [start, m). Rows before `start` are fixed
// context: later rows are reduced in the projection against them and may
// absorb integer multiples of them, which keeps entries small but never
// changes the generated lattice.
void lll_reduce(Basis& b, double delta = 0.99, int start = 0);

// Local block enumeration tours; cheap preprocessing that flattens the GS
// profile before a full enumeration. Deterministic.
void bkz_reduce(Basis& b, int beta, int tours = 2, double delta = 0.99);

struct EnumResult {
  std::vector<i64> coeffs;  // with respect to the basis handed in
  std::vector<i64> vec;
  i64 norm_sq = 0;  // squared norm (SVP) or squared distance (CVP), exact
};

// Exact shortest nonzero vector. Preprocesses a copy (LLL, plus block tours
// on bigger instances); candidate norms are re-verified in integer
// arithmetic, so the result is exact. Ties resolve to the lexicographically
// smallest coefficient vector with respect to the preprocessed basis.
EnumResult svp_enumerate(const Basis& b);

// Exact closest vector to an integer target, ties broken by the
// lexicographically smallest coefficient vector with respect to `b`.
EnumResult cvp_enumerate(const Basis& b, const std::vector<i64>& target);
// All lattice vectors at the minimum distance (used for tie-aware callers).
std::vector<EnumResult> cvp_enumerate_all(const Basis& b, const std::vector<i64>& target);

// One representative per antipodal pair {v, -v}, 0 < |v|^2 <= r2.
struct ShortVector {
  std::vector<i64> vec;
  i64 norm_sq;
};
std::vector<ShortVector> short_vectors_up_to(const Basis& b, i64 r2, size_t cap = 2000000);

// Point counts N_m for 0 <= m <= r2 (zero vector included at m = 0).
std::map<i64, i64> theta_series(const Basis& b, i64 r2, size_t cap = 2000000);

// All lattice points within squared distance r2 of a real-valued target,
// sorted by (distance, lex). Distances are float; callers needing exact
// arithmetic should use cvp_enumerate_all on integer targets instead.
struct NearPoint {
  std::vector<i64> vec;
  double dist_sq;
};
std::vector<NearPoint> points_near(const Basis& b, const std::vector<double>& target,
                                   double r2, size_t cap = 2000000);

// HKZ reduction in place: b*_i realizes the shortest vector of the lattice
// projected orthogonally to the first i rows.
void hkz_reduce(Basis& b, double delta = 0.99);

struct NearestResult {
  std::vector<i64> coeffs;
  std::vector<i64> vec;
};
// Babai nearest-plane against the rows of b (float GS). Exact when the
// target lies within min|b*_i|/2 of the lattice.
NearestResult babai_nearest_plane(const Basis& b, const std::vector<double>& target);

// B J B^T with J the 2n x 2n symplectic form; exact.
IntMat symplectic_gram(const Basis& b);
bool is_q_symplectic(const Basis& b, i64 q);

// sqrt(dim/(2 pi e)) * det^(1/dim)
double gaussian_heuristic(int dim, double det);

// Euclidean dual basis rows (inverse transpose), exact.
RatMat dual_basis_exact(const Basis& b);

// Exact check that a and b generate the same lattice: solves b = U a for an
// integer U with |det U| = 1.
bool same_lattice(const Basis& a, const Basis& b);

// Unimodular matrix with the given primitive vector as first row.
IntMat unimodular_with_first_row(const std::vector<i64>& x);

i64 norm_sq(const std::vector<i64>& v);
double norm_sq_d(const std::vector<double>& v);

}  // namespace ntrugkp::lattice
