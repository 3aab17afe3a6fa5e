#include "ntrugkp/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace ntrugkp::lattice {

i64 norm_sq(const std::vector<i64>& v) {
  i128 acc = 0;
  for (i64 x : v) acc += (i128)x * x;
  return checked_i64(acc, "norm_sq");
}

double norm_sq_d(const std::vector<double>& v) {
  double acc = 0;
  for (double x : v) acc += x * x;
  return acc;
}

GsInfo gram_schmidt(const Basis& b) {
  int m = b.rows, c = b.cols;
  GsInfo gs;
  gs.mu.assign((size_t)m * m, 0.0);
  gs.bstar_sq.assign(m, 0.0);
  std::vector<double> bstar((size_t)m * c);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < c; ++j) bstar[(size_t)i * c + j] = (double)b.at(i, j);
    for (int j = 0; j < i; ++j) {
      double dot = 0;
      for (int k = 0; k < c; ++k) dot += (double)b.at(i, k) * bstar[(size_t)j * c + k];
      double mu = gs.bstar_sq[j] > 0 ? dot / gs.bstar_sq[j] : 0.0;
      gs.mu[(size_t)i * m + j] = mu;
      for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] -= mu * bstar[(size_t)j * c + k];
    }
    double nsq = 0;
    for (int k = 0; k < c; ++k) nsq += bstar[(size_t)i * c + k] * bstar[(size_t)i * c + k];
    gs.bstar_sq[i] = nsq;
    gs.mu[(size_t)i * m + i] = 1.0;
    if (!(nsq > 1e-9)) throw NotFullRank("gram_schmidt: row " + std::to_string(i));
  }
  return gs;
}

RatMat rat_from_int(const Basis& b) {
  RatMat rows(b.rows, std::vector<mpq_class>(b.cols));
  for (int i = 0; i < b.rows; ++i)
    for (int j = 0; j < b.cols; ++j) rows[i][j] = (long)b.at(i, j);
  return rows;
}

GsExact gram_schmidt_exact(const RatMat& rows) {
  int m = (int)rows.size();
  int c = (int)rows[0].size();
  GsExact gs;
  gs.mu.assign(m, std::vector<mpq_class>(m, 0));
  gs.bstar_sq.assign(m, 0);
  gs.bstar = rows;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < i; ++j) {
      mpq_class dot = 0;
      for (int k = 0; k < c; ++k) dot += rows[i][k] * gs.bstar[j][k];
      mpq_class mu = dot / gs.bstar_sq[j];
      gs.mu[i][j] = mu;
      for (int k = 0; k < c; ++k) gs.bstar[i][k] -= mu * gs.bstar[j][k];
    }
    mpq_class nsq = 0;
    for (int k = 0; k < c; ++k) nsq += gs.bstar[i][k] * gs.bstar[i][k];
    if (nsq == 0) throw NotFullRank("gram_schmidt_exact: row " + std::to_string(i));
    gs.bstar_sq[i] = nsq;
    gs.mu[i][i] = 1;
  }
  return gs;
}

namespace {

// Coefficients of a lattice vector in a given full-rank basis, computed
// exactly. Throws if v is not an integer combination of the rows.
std::vector<i64> coeffs_in_basis(const Basis& b, const std::vector<i64>& v) {
  GsExact gs = gram_schmidt_exact(rat_from_int(b));
  int m = b.rows, c = b.cols;
  std::vector<mpq_class> rem(c);
  for (int k = 0; k < c; ++k) rem[k] = (long)v[k];
  std::vector<i64> out(m, 0);
  for (int i = m - 1; i >= 0; --i) {
    mpq_class dot = 0;
    for (int k = 0; k < c; ++k) dot += rem[k] * gs.bstar[i][k];
    mpq_class x = dot / gs.bstar_sq[i];
    x.canonicalize();
    if (x.get_den() != 1) throw Error("coeffs_in_basis: non-integer coefficient");
    if (!x.get_num().fits_slong_p()) throw WidthOverflow("coeffs_in_basis");
    i64 xi = (i64)x.get_num().get_si();
    out[i] = xi;
    for (int k = 0; k < c; ++k) rem[k] -= mpq_class((long)xi) * mpq_class((long)b.at(i, k));
  }
  for (int k = 0; k < c; ++k)
    if (rem[k] != 0) throw Error("coeffs_in_basis: vector outside the lattice");
  return out;
}

// Incremental float GS state used by LLL.
struct LllState {
  int m = 0, c = 0;
  std::vector<double> mu;  // m x m
  std::vector<double> B;

  double& at(int i, int j) { return mu[(size_t)i * m + j]; }
};

void recompute_gs(const Basis& b, LllState& s) {
  GsInfo gs = gram_schmidt(b);
  s.m = b.rows;
  s.c = b.cols;
  s.mu = std::move(gs.mu);
  s.B = std::move(gs.bstar_sq);
}

void row_submul(Basis& b, int dst, int src, i64 r) {
  if (r == 0) return;
  i64* d = b.row(dst);
  const i64* sr = b.row(src);
  for (int k = 0; k < b.cols; ++k)
    d[k] = checked_i64((i128)d[k] - (i128)r * sr[k], "lll row op");
}

void size_reduce_one(Basis& b, LllState& s, int k, int j) {
  double mu = s.at(k, j);
  if (std::fabs(mu) <= 0.5) return;
  i64 r = (i64)std::llround(mu);
  row_submul(b, k, j, r);
  for (int l = 0; l < j; ++l) s.at(k, l) -= (double)r * s.at(j, l);
  s.at(k, j) -= (double)r;
}

}  // namespace

void lll_reduce(Basis& b, double delta, int start) {
  int m = b.rows;
  if (m <= start + 1) return;
  for (int attempt = 0; attempt < 4; ++attempt) {
    LllState s;
    recompute_gs(b, s);
    int k = start + 1;
    long steps = 0;
    const long step_cap = 400L * m * m * 64;  // defensive; never hit at desk scale
    while (k < m) {
      for (int j = k - 1; j >= 0; --j) size_reduce_one(b, s, k, j);
      double musq = s.at(k, k - 1) * s.at(k, k - 1);
      if (k > start && s.B[k] < (delta - musq) * s.B[k - 1]) {
        // swap rows k-1, k and patch GS data in place (Cohen 2.6.3 update)
        double nu = s.at(k, k - 1);
        double Bk = s.B[k], Bj = s.B[k - 1];
        double Bp = Bk + nu * nu * Bj;
        double mup = nu * Bj / Bp;
        s.B[k] = Bj * Bk / Bp;
        s.B[k - 1] = Bp;
        for (int j = 0; j < b.cols; ++j) std::swap(b.at(k - 1, j), b.at(k, j));
        for (int l = 0; l < k - 1; ++l) std::swap(s.at(k - 1, l), s.at(k, l));
        s.at(k, k - 1) = mup;
        for (int i = k + 1; i < m; ++i) {
          double t = s.at(i, k);
          s.at(i, k) = s.at(i, k - 1) - nu * t;
          s.at(i, k - 1) = t + mup * s.at(i, k);
        }
        k = std::max(k - 1, start + 1);
      } else {
        ++k;
      }
      if (++steps > step_cap) break;
    }
    // verify against a fresh orthogonalization; float GS drifts
    LllState v;
    recompute_gs(b, v);
    bool ok = true;
    for (int i = start + 1; i < m && ok; ++i) {
      double musq = v.at(i, i - 1) * v.at(i, i - 1);
      if (v.B[i] < (delta - 0.02 - musq) * v.B[i - 1]) ok = false;
      for (int j = 0; j < i && ok; ++j)
        if (std::fabs(v.at(i, j)) > 0.52) ok = false;
    }
    if (ok) return;
  }
  throw Error("lll_reduce failed to stabilize");
}

namespace {

// Schnorr-Euchner depth-first enumeration over levels [lo, hi) of a GS
// decomposition. Float partial norms drive pruning; leaves are re-verified
// exactly by the callers that need it. In SVP mode the +/- symmetry is cut
// by forcing the topmost nonzero coefficient nonnegative; candidates at a
// level come out in nondecreasing |x - center| order, so the first pruned
// candidate ends the level.
struct EnumCtx {
  int m = 0, lo = 0, hi = 0;
  const double* mu = nullptr;
  const double* B = nullptr;
  const std::vector<double>* tc = nullptr;  // GS target coords; null for SVP
  bool svp_mode = true;
};

// leaf(x, float_dist) returns a new float bound, or a negative value to keep
// the current one.
template <typename Leaf>
void enumerate_tree(const EnumCtx& ctx, double bound0, Leaf&& leaf) {
  const int lo = ctx.lo, hi = ctx.hi, m = ctx.m;
  if (hi - lo <= 0) return;
  std::vector<i64> x(hi, 0);
  std::vector<long> t(hi, 0);
  std::vector<double> base(hi, 0), center(hi, 0), pd(hi + 1, 0.0);
  std::vector<int> side(hi, 1);
  std::vector<char> sym(hi, 0);
  double bound = bound0;

  auto descend = [&](int i, bool all_zero_above) {
    double c = ctx.tc ? (*ctx.tc)[i] : 0.0;
    for (int j = i + 1; j < hi; ++j) c -= (double)x[j] * ctx.mu[(size_t)j * m + i];
    center[i] = c;
    sym[i] = ctx.svp_mode && all_zero_above;
    t[i] = 0;
    if (sym[i]) {
      x[i] = 0;
    } else {
      double r = std::floor(c + 0.5);
      base[i] = r;
      side[i] = (c >= r) ? 1 : -1;
      x[i] = (i64)r;
    }
  };

  auto advance = [&](int i) {
    ++t[i];
    if (sym[i]) {
      x[i] = t[i];
    } else {
      long k = t[i];
      long off = (k % 2 == 1) ? (k + 1) / 2 : -(k / 2);
      x[i] = (i64)base[i] + (i64)(side[i] * off);
    }
  };

  int i = hi - 1;
  descend(i, true);
  for (;;) {
    double diff = (double)x[i] - center[i];
    double d = pd[i + 1] + ctx.B[i] * diff * diff;
    if (d <= bound) {
      if (i == lo) {
        double nb = leaf(x, d);
        if (nb >= 0 && nb < bound) bound = nb;
        advance(i);
      } else {
        pd[i] = d;
        bool za = sym[i] && x[i] == 0;
        --i;
        descend(i, za);
      }
    } else {
      ++i;
      if (i >= hi) return;
      advance(i);
    }
  }
}

std::vector<i64> combine_rows(const Basis& b, const std::vector<i64>& x, int lo, int hi) {
  std::vector<i64> v(b.cols, 0);
  for (int i = lo; i < hi; ++i) {
    if (x[i] == 0) continue;
    const i64* r = b.row(i);
    for (int k = 0; k < b.cols; ++k)
      v[k] = checked_i64((i128)v[k] + (i128)x[i] * r[k], "combine_rows");
  }
  return v;
}

bool lex_less(const std::vector<i64>& a, const std::vector<i64>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

struct SvpBest {
  bool found = false;
  i64 norm_sq = 0;   // exact mode only
  double score = 0;  // float mode: best projected squared norm
  std::vector<i64> coeffs;
};

// Shortest nonzero vector of the block [lo, hi), projected orthogonally to
// the first lo rows. Exact mode (lo must be 0) rescores leaves in integers
// and breaks ties toward the lex-smallest coefficient vector; float mode
// keeps the numerically best leaf and serves reduction decisions only.
SvpBest svp_on(const Basis& b, const GsInfo& gs, int lo, int hi, bool exact_rescore) {
  EnumCtx ctx;
  ctx.m = b.rows;
  ctx.lo = lo;
  ctx.hi = hi;
  ctx.mu = gs.mu.data();
  ctx.B = gs.bstar_sq.data();
  ctx.svp_mode = true;

  SvpBest best;
  double init;
  if (exact_rescore) {
    assert(lo == 0);
    i64 init_exact = 0;
    int arg = lo;
    for (int i = lo; i < hi; ++i) {
      i64 nr = norm_sq(std::vector<i64>(b.row(i), b.row(i) + b.cols));
      if (i == lo || nr < init_exact) {
        init_exact = nr;
        arg = i;
      }
    }
    best.found = true;
    best.norm_sq = init_exact;
    best.coeffs.assign(b.rows, 0);
    best.coeffs[arg] = 1;
    init = (double)init_exact;
  } else {
    init = gs.bstar_sq[lo];
  }

  double slack = init * 1e-9 + 1e-6;
  enumerate_tree(ctx, init + slack, [&](const std::vector<i64>& x, double d) -> double {
    bool nonzero = false;
    for (int i = lo; i < hi; ++i)
      if (x[i] != 0) nonzero = true;
    if (!nonzero) return -1.0;
    if (exact_rescore) {
      std::vector<i64> v = combine_rows(b, x, lo, hi);
      i64 nsq = norm_sq(v);
      if (nsq == 0) return -1.0;
      std::vector<i64> cf(b.rows, 0);
      for (int i = lo; i < hi; ++i) cf[i] = x[i];
      if (nsq < best.norm_sq || (nsq == best.norm_sq && lex_less(cf, best.coeffs))) {
        best.norm_sq = nsq;
        best.coeffs = std::move(cf);
      }
      return (double)best.norm_sq * (1 + 1e-9) + 1e-6;
    }
    if (!best.found || d < best.score) {
      best.found = true;
      best.score = d;
      best.coeffs.assign(b.rows, 0);
      for (int i = lo; i < hi; ++i) best.coeffs[i] = x[i];
    }
    return d;
  });
  return best;
}

// Insert the integer combination xs of rows [i, j) at row i via a unimodular
// transform of that block, then restore LLL shape from row i on.
void insert_block_combination(Basis& b, int i, int j, std::vector<i64> xs, double delta) {
  i64 g = 0;
  for (i64 v : xs) g = std::gcd(g, v);
  if (g > 1)
    for (i64& v : xs) v /= g;
  IntMat u = unimodular_with_first_row(xs);
  IntMat block(j - i, b.cols);
  for (int r = i; r < j; ++r)
    for (int cc = 0; cc < b.cols; ++cc) block.at(r - i, cc) = b.at(r, cc);
  IntMat nb = mat_mul(u, block);
  for (int r = i; r < j; ++r)
    for (int cc = 0; cc < b.cols; ++cc) b.at(r, cc) = nb.at(r - i, cc);
  lll_reduce(b, delta, std::max(0, i - 1));
}

bool is_unit_vector(const std::vector<i64>& xs) {
  if (std::abs(xs[0]) != 1) return false;
  for (size_t k = 1; k < xs.size(); ++k)
    if (xs[k] != 0) return false;
  return true;
}

}  // namespace

void bkz_reduce(Basis& b, int beta, int tours, double delta) {
  int m = b.rows;
  if (m > kMaxEnumDim) throw DimensionTooLarge("bkz_reduce: " + std::to_string(m));
  if (beta < 2) beta = 2;
  lll_reduce(b, delta, 0);
  for (int tour = 0; tour < tours; ++tour) {
    for (int i = 0; i + 1 < m; ++i) {
      int j = std::min(m, i + beta);
      GsInfo gs = gram_schmidt(b);
      SvpBest loc = svp_on(b, gs, i, j, /*exact_rescore=*/false);
      if (!loc.found) continue;
      if (loc.score >= gs.bstar_sq[i] * (1 - 1e-9)) continue;
      std::vector<i64> xs(loc.coeffs.begin() + i, loc.coeffs.begin() + j);
      if (is_unit_vector(xs)) continue;
      insert_block_combination(b, i, j, std::move(xs), delta);
    }
  }
  lll_reduce(b, delta, 0);
}

void hkz_reduce(Basis& b, double delta) {
  int m = b.rows;
  if (m > kMaxEnumDim) throw DimensionTooLarge("hkz_reduce: " + std::to_string(m));
  if (m >= 28)
    bkz_reduce(b, std::min(20, m - 2), 2, delta);
  else
    lll_reduce(b, delta, 0);
  for (int i = 0; i < m - 1; ++i) {
    lll_reduce(b, delta, i);
    GsInfo gs = gram_schmidt(b);
    SvpBest loc = svp_on(b, gs, i, m, /*exact_rescore=*/false);
    if (!loc.found) continue;
    if (loc.score >= gs.bstar_sq[i] * (1 - 1e-9)) continue;
    std::vector<i64> xs(loc.coeffs.begin() + i, loc.coeffs.end());
    if (is_unit_vector(xs)) continue;
    insert_block_combination(b, i, m, std::move(xs), delta);
  }
  lll_reduce(b, delta, 0);
}

EnumResult svp_enumerate(const Basis& b) {
  if (b.rows > kMaxEnumDim) throw DimensionTooLarge("svp_enumerate: " + std::to_string(b.rows));
  Basis work = b;
  if (work.rows >= 28)
    bkz_reduce(work, std::min(20, work.rows - 2), 2);
  else
    lll_reduce(work, 0.99, 0);
  GsInfo gs = gram_schmidt(work);
  SvpBest best = svp_on(work, gs, 0, work.rows, /*exact_rescore=*/true);
  assert(best.found);
  EnumResult out;
  out.vec = combine_rows(work, best.coeffs, 0, work.rows);
  out.norm_sq = best.norm_sq;
  out.coeffs = coeffs_in_basis(b, out.vec);
  return out;
}

namespace {

std::vector<EnumResult> cvp_core(const Basis& b, const std::vector<i64>& target, bool all_ties) {
  if (b.rows > kMaxCvpDim) throw DimensionTooLarge("cvp_enumerate: " + std::to_string(b.rows));
  assert((int)target.size() == b.cols);
  Basis work = b;
  lll_reduce(work, 0.99, 0);
  GsInfo gs = gram_schmidt(work);
  int m = work.rows, c = work.cols;

  std::vector<double> bstar((size_t)m * c);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] = (double)work.at(i, k);
    for (int j = 0; j < i; ++j) {
      double mu = gs.mu[(size_t)i * m + j];
      for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] -= mu * bstar[(size_t)j * c + k];
    }
  }
  std::vector<double> tc(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double dot = 0;
    for (int k = 0; k < c; ++k) dot += (double)target[k] * bstar[(size_t)i * c + k];
    tc[i] = dot / gs.bstar_sq[i];
  }

  // Babai on the reduced basis seeds the search radius
  std::vector<double> td(target.begin(), target.end());
  NearestResult seed = babai_nearest_plane(work, td);
  i64 best;
  {
    i128 acc = 0;
    for (int k = 0; k < c; ++k) {
      i128 d = (i128)target[k] - seed.vec[k];
      acc += d * d;
    }
    best = checked_i64(acc, "cvp seed dist");
  }

  struct Cand {
    i64 dist;
    std::vector<i64> vec;
  };
  std::vector<Cand> ties;
  ties.push_back({best, seed.vec});

  EnumCtx ctx;
  ctx.m = m;
  ctx.lo = 0;
  ctx.hi = m;
  ctx.mu = gs.mu.data();
  ctx.B = gs.bstar_sq.data();
  ctx.tc = &tc;
  ctx.svp_mode = false;

  double slack = (double)best * 1e-9 + 1e-6;
  enumerate_tree(ctx, (double)best + slack, [&](const std::vector<i64>& x, double) -> double {
    std::vector<i64> v = combine_rows(work, x, 0, m);
    i128 acc = 0;
    for (int k = 0; k < c; ++k) {
      i128 d = (i128)target[k] - v[k];
      acc += d * d;
    }
    i64 dist = checked_i64(acc, "cvp dist");
    if (dist < best) {
      best = dist;
      ties.clear();
    }
    if (dist == best) ties.push_back({dist, std::move(v)});
    return (double)best * (1 + 1e-9) + 1e-6;
  });

  std::vector<EnumResult> out;
  for (auto& cand : ties) {
    if (cand.dist != best) continue;
    EnumResult r;
    r.norm_sq = cand.dist;
    r.coeffs = coeffs_in_basis(b, cand.vec);
    r.vec = std::move(cand.vec);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const EnumResult& a, const EnumResult& bb) {
    return lex_less(a.coeffs, bb.coeffs);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const EnumResult& a, const EnumResult& bb) {
                          return a.coeffs == bb.coeffs;
                        }),
            out.end());
  if (!all_ties && out.size() > 1) out.resize(1);
  return out;
}

}  // namespace

EnumResult cvp_enumerate(const Basis& b, const std::vector<i64>& target) {
  return cvp_core(b, target, false)[0];
}

std::vector<EnumResult> cvp_enumerate_all(const Basis& b, const std::vector<i64>& target) {
  return cvp_core(b, target, true);
}

std::vector<ShortVector> short_vectors_up_to(const Basis& b, i64 r2, size_t cap) {
  if (b.rows > kMaxEnumDim)
    throw DimensionTooLarge("short_vectors_up_to: " + std::to_string(b.rows));
  Basis work = b;
  lll_reduce(work, 0.99, 0);
  GsInfo gs = gram_schmidt(work);

  EnumCtx ctx;
  ctx.m = work.rows;
  ctx.lo = 0;
  ctx.hi = work.rows;
  ctx.mu = gs.mu.data();
  ctx.B = gs.bstar_sq.data();
  ctx.svp_mode = true;

  std::vector<ShortVector> out;
  double slack = (double)r2 * 1e-9 + 1e-6;
  enumerate_tree(ctx, (double)r2 + slack, [&](const std::vector<i64>& x, double) -> double {
    bool nonzero = false;
    for (i64 xi : x)
      if (xi != 0) nonzero = true;
    if (!nonzero) return -1.0;
    std::vector<i64> v = combine_rows(work, x, 0, work.rows);
    i64 nsq = norm_sq(v);
    if (nsq == 0 || nsq > r2) return -1.0;
    out.push_back({std::move(v), nsq});
    if (out.size() > cap) throw PointCapExceeded("short_vectors_up_to");
    return -1.0;
  });
  std::sort(out.begin(), out.end(), [](const ShortVector& a, const ShortVector& bb) {
    if (a.norm_sq != bb.norm_sq) return a.norm_sq < bb.norm_sq;
    return lex_less(a.vec, bb.vec);
  });
  return out;
}

std::map<i64, i64> theta_series(const Basis& b, i64 r2, size_t cap) {
  std::map<i64, i64> counts;
  counts[0] = 1;  // the zero vector
  for (const auto& sv : short_vectors_up_to(b, r2, cap)) counts[sv.norm_sq] += 2;
  return counts;
}

std::vector<NearPoint> points_near(const Basis& b, const std::vector<double>& target,
                                   double r2, size_t cap) {
  if (b.rows > kMaxCvpDim) throw DimensionTooLarge("points_near: " + std::to_string(b.rows));
  assert((int)target.size() == b.cols);
  Basis work = b;
  lll_reduce(work, 0.99, 0);
  GsInfo gs = gram_schmidt(work);
  int m = work.rows, c = work.cols;

  std::vector<double> bstar((size_t)m * c);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] = (double)work.at(i, k);
    for (int j = 0; j < i; ++j) {
      double mu = gs.mu[(size_t)i * m + j];
      for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] -= mu * bstar[(size_t)j * c + k];
    }
  }
  std::vector<double> tc(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double dot = 0;
    for (int k = 0; k < c; ++k) dot += target[k] * bstar[(size_t)i * c + k];
    tc[i] = dot / gs.bstar_sq[i];
  }

  EnumCtx ctx;
  ctx.m = m;
  ctx.lo = 0;
  ctx.hi = m;
  ctx.mu = gs.mu.data();
  ctx.B = gs.bstar_sq.data();
  ctx.tc = &tc;
  ctx.svp_mode = false;

  std::vector<NearPoint> out;
  double slack = r2 * 1e-9 + 1e-6;
  enumerate_tree(ctx, r2 + slack, [&](const std::vector<i64>& x, double) -> double {
    std::vector<i64> v = combine_rows(work, x, 0, m);
    double d2 = 0;
    for (int k = 0; k < c; ++k) {
      double d = target[k] - (double)v[k];
      d2 += d * d;
    }
    if (d2 <= r2 + slack) {
      out.push_back({std::move(v), d2});
      if (out.size() > cap) throw PointCapExceeded("points_near");
    }
    return -1.0;
  });
  std::sort(out.begin(), out.end(), [](const NearPoint& a, const NearPoint& bb) {
    if (a.dist_sq != bb.dist_sq) return a.dist_sq < bb.dist_sq;
    return lex_less(a.vec, bb.vec);
  });
  return out;
}

NearestResult babai_nearest_plane(const Basis& b, const std::vector<double>& target) {
  assert((int)target.size() == b.cols);
  int m = b.rows, c = b.cols;
  GsInfo gs = gram_schmidt(b);
  std::vector<double> bstar((size_t)m * c);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] = (double)b.at(i, k);
    for (int j = 0; j < i; ++j) {
      double mu = gs.mu[(size_t)i * m + j];
      for (int k = 0; k < c; ++k) bstar[(size_t)i * c + k] -= mu * bstar[(size_t)j * c + k];
    }
  }
  std::vector<double> rem = target;
  NearestResult out;
  out.coeffs.assign(m, 0);
  out.vec.assign(c, 0);
  for (int i = m - 1; i >= 0; --i) {
    double dot = 0;
    for (int k = 0; k < c; ++k) dot += rem[k] * bstar[(size_t)i * c + k];
    i64 r = (i64)std::llround(dot / gs.bstar_sq[i]);
    out.coeffs[i] = r;
    for (int k = 0; k < c; ++k) {
      rem[k] -= (double)r * b.at(i, k);
      out.vec[k] = checked_i64((i128)out.vec[k] + (i128)r * b.at(i, k), "babai");
    }
  }
  return out;
}

IntMat symplectic_gram(const Basis& b) {
  assert(b.cols % 2 == 0);
  IntMat j = symplectic_form(b.cols / 2);
  return mat_mul(mat_mul(b, j), mat_transpose(b));
}

bool is_q_symplectic(const Basis& b, i64 q) {
  if (b.rows != b.cols || b.cols % 2 != 0) return false;
  IntMat g = symplectic_gram(b);
  IntMat qj = mat_scale(symplectic_form(b.cols / 2), q);
  return g == qj;
}

double gaussian_heuristic(int dim, double det) {
  return std::sqrt((double)dim / (2.0 * M_PI * M_E)) * std::pow(det, 1.0 / dim);
}

namespace {

RatMat rat_inverse(const RatMat& a) {
  int n = (int)a.size();
  RatMat w = a;
  RatMat inv(n, std::vector<mpq_class>(n, 0));
  for (int i = 0; i < n; ++i) inv[i][i] = 1;
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (w[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) throw NotFullRank("rat_inverse");
    std::swap(w[piv], w[col]);
    std::swap(inv[piv], inv[col]);
    mpq_class d = w[col][col];
    for (int c2 = 0; c2 < n; ++c2) {
      w[col][c2] /= d;
      inv[col][c2] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || w[r][col] == 0) continue;
      mpq_class f = w[r][col];
      for (int c2 = 0; c2 < n; ++c2) {
        w[r][c2] -= f * w[col][c2];
        inv[r][c2] -= f * inv[col][c2];
      }
    }
  }
  return inv;
}

mpz_class int_det(const IntMat& a) {
  // Bareiss fraction-free elimination; all divisions are exact.
  int n = a.rows;
  std::vector<std::vector<mpz_class>> w(n, std::vector<mpz_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w[i][j] = (long)a.at(i, j);
  mpz_class prev = 1;
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (w[k][k] == 0) {
      int piv = -1;
      for (int r = k + 1; r < n; ++r)
        if (w[r][k] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) return 0;
      std::swap(w[k], w[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j)
        w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) / prev;
      w[i][k] = 0;
    }
    prev = w[k][k];
  }
  return sign * w[n - 1][n - 1];
}

}  // namespace

RatMat dual_basis_exact(const Basis& b) {
  if (b.rows != b.cols) throw NotFullRank("dual_basis_exact: square bases only");
  RatMat inv = rat_inverse(rat_from_int(b));
  int n = b.rows;
  RatMat dual(n, std::vector<mpq_class>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) dual[i][j] = inv[j][i];
  return dual;
}

bool same_lattice(const Basis& a, const Basis& b) {
  if (a.rows != a.cols || b.rows != b.cols || a.rows != b.rows) return false;
  RatMat ainv = rat_inverse(rat_from_int(a));
  int n = a.rows;
  IntMat u(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mpq_class acc = 0;
      for (int k = 0; k < n; ++k) acc += mpq_class((long)b.at(i, k)) * ainv[k][j];
      acc.canonicalize();
      if (acc.get_den() != 1) return false;
      if (!acc.get_num().fits_slong_p()) throw WidthOverflow("same_lattice");
      u.at(i, j) = acc.get_num().get_si();
    }
  }
  mpz_class d = int_det(u);
  return d == 1 || d == -1;
}

IntMat unimodular_with_first_row(const std::vector<i64>& x) {
  int k = (int)x.size();
  assert(k >= 1);
  // Drive x to e_0 by 2x2 row ops W while accumulating P = W^{-1}; the
  // transpose of P then has first row x and determinant +/-1.
  IntMat p = identity_mat(k);
  std::vector<i64> v = x;
  auto xgcd = [](i64 a, i64 b, i64& s, i64& t) {
    i64 r0 = a, r1 = b, s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (r1 != 0) {
      i64 q = r0 / r1;
      std::tie(r0, r1) = std::make_tuple(r1, r0 - q * r1);
      std::tie(s0, s1) = std::make_tuple(s1, s0 - q * s1);
      std::tie(t0, t1) = std::make_tuple(t1, t0 - q * t1);
    }
    s = s0;
    t = t0;
    return r0;
  };
  for (int i = k - 1; i >= 1; --i) {
    if (v[i] == 0) continue;
    i64 s, t;
    i64 g = xgcd(v[0], v[i], s, t);
    if (g < 0) {
      g = -g;
      s = -s;
      t = -t;
    }
    i64 a = v[0] / g, bb = v[i] / g;
    // W: (v0, vi) <- (s v0 + t vi, -bb v0 + a vi); P picks up the inverse
    // acting on columns 0 and i
    for (int r = 0; r < k; ++r) {
      i64 c0 = p.at(r, 0), ci = p.at(r, i);
      p.at(r, 0) = checked_i64((i128)a * c0 + (i128)bb * ci, "unimodular");
      p.at(r, i) = checked_i64(-(i128)t * c0 + (i128)s * ci, "unimodular");
    }
    v[0] = g;
    v[i] = 0;
  }
  if (!(v[0] == 1 || v[0] == -1))
    throw Error("unimodular_with_first_row: vector not primitive");
  if (v[0] == -1)
    for (int r = 0; r < k; ++r) p.at(r, 0) = -p.at(r, 0);
  return mat_transpose(p);
}

}  // namespace ntrugkp::lattice
