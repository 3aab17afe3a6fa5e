#include "ntrugkp/ntru.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ntrugkp/lattice.hpp"

namespace ntrugkp::ntru {

std::string family_name(KeyFamily fam) {
  switch (fam) {
    case KeyFamily::TernaryXnMinus1: return "NtruTernary";
    case KeyFamily::GaussianXnPlus1: return "NtruGaussianXnPlus1";
  }
  return "?";
}

std::optional<KeyFamily> family_from_name(const std::string& name) {
  if (name == "NtruTernary") return KeyFamily::TernaryXnMinus1;
  if (name == "NtruGaussianXnPlus1") return KeyFamily::GaussianXnPlus1;
  return std::nullopt;
}

NtruParams ternary_params(int n, i64 q, i64 p, int d, bool require_h_invertible) {
  NtruParams params;
  params.ring = {n, ring::Quotient::XnMinus1};
  params.q = q;
  params.p = p;
  params.d = d > 0 ? d : n / 3;
  params.require_h_invertible = require_h_invertible;
  params.family = KeyFamily::TernaryXnMinus1;
  validate(params);
  return params;
}

NtruParams gaussian_params(int n, i64 q) {
  NtruParams params;
  params.ring = {n, ring::Quotient::XnPlus1};
  params.q = q;
  params.p = 3;
  params.d = 0;
  params.family = KeyFamily::GaussianXnPlus1;
  validate(params);
  return params;
}

void validate(const NtruParams& params) {
  const int n = params.ring.n;
  if (n < 2) throw InvalidConfig("n must be at least 2");
  if (params.q < 4 || (params.q & (params.q - 1)) != 0)
    throw InvalidConfig("q must be a power of two, q >= 4");
  if (params.p < 3 || params.p % 2 == 0) throw InvalidConfig("p must be an odd prime");
  if (params.family == KeyFamily::TernaryXnMinus1) {
    if (params.ring.quot != ring::Quotient::XnMinus1)
      throw InvalidConfig("ternary keys require the x^n - 1 quotient");
    if (params.d < 1) throw InvalidConfig("ternary weight d must be positive");
    const int dmax = params.require_h_invertible ? 2 * params.d + 1 : 2 * params.d;
    if (dmax > n) throw InvalidConfig("ternary weight too large for n");
  } else {
    if (params.ring.quot != ring::Quotient::XnPlus1)
      throw InvalidConfig("gaussian keys require the x^n + 1 quotient");
    if ((n & (n - 1)) != 0) throw InvalidConfig("x^n + 1 requires n a power of two");
  }
}

namespace {

ring::Poly scaled_ternary(int n, int d1, int d2, i64 p, Rng& rng) {
  ring::Poly t = ring::sample_ternary(n, d1, d2, rng);
  for (i64& c : t) c *= p;
  return t;
}

}  // namespace

NtruKeyMaterial keygen(const NtruParams& params, Rng& rng) {
  validate(params);
  const int n = params.ring.n;
  NtruKeyMaterial keys;

  int tries = 0;
  while (true) {
    if (++tries > kMaxResample) throw MaxResampleExceeded("f never invertible mod q");
    ring::Poly f;
    if (params.family == KeyFamily::TernaryXnMinus1) {
      f = scaled_ternary(n, params.d, params.d, params.p, rng);
      f[0] += 1;
    } else {
      f = ring::sample_gaussian_poly(n, (double)params.q, rng);
    }
    auto inv = ring::poly_invert(f, params.ring, params.q);
    if (!inv) continue;
    keys.f = std::move(f);
    keys.f_inv_q = ring::reduce_centered(*inv, params.q);
    break;
  }

  tries = 0;
  while (true) {
    if (++tries > kMaxResample) throw MaxResampleExceeded("h never invertible mod q");
    ring::Poly g;
    if (params.family == KeyFamily::TernaryXnMinus1) {
      g = params.require_h_invertible
              ? scaled_ternary(n, params.d + 1, params.d, params.p, rng)
              : scaled_ternary(n, params.d, params.d, params.p, rng);
    } else {
      g = ring::sample_gaussian_poly(n, (double)params.q, rng);
    }
    ring::Poly h =
        ring::reduce_centered(ring::poly_mul_mod(g, keys.f_inv_q, params.ring, params.q), params.q);
    if (params.require_h_invertible) {
      auto hinv = ring::poly_invert(h, params.ring, params.q);
      if (!hinv) continue;
      keys.h_inv_q = ring::reduce_centered(*hinv, params.q);
    }
    keys.g = std::move(g);
    keys.h = std::move(h);
    break;
  }
  return keys;
}

ring::Poly encrypt(const ring::Poly& h, const ring::Poly& m, const ring::Poly& r,
                   const NtruParams& params) {
  ring::Poly hr = ring::poly_mul_mod(h, r, params.ring, params.q);
  return ring::reduce_centered(ring::poly_add(hr, m), params.q);
}

ring::Poly decrypt(const ring::Poly& c, const NtruKeyMaterial& keys, const NtruParams& params) {
  if (params.family != KeyFamily::TernaryXnMinus1)
    throw InvalidConfig("decrypt is defined for the ternary family only");
  ring::Poly a =
      ring::reduce_centered(ring::poly_mul_mod(keys.f, c, params.ring, params.q), params.q);
  return ring::reduce_centered(a, params.p);
}

bool decryption_valid(const ring::Poly& m, const ring::Poly& r, const NtruKeyMaterial& keys,
                      const NtruParams& params) {
  ring::Poly gr = ring::poly_mul(keys.g, r, params.ring);
  ring::Poly fm = ring::poly_mul(keys.f, m, params.ring);
  ring::Poly a = ring::poly_add(gr, fm);
  for (i64 coeff : a)
    if (ring::centered(coeff, params.q) != coeff) return false;
  return true;
}

IntMat public_basis(const ring::Poly& h, const NtruParams& params) {
  const int n = params.ring.n;
  IntMat A = ring::anticirculant(ring::reduce_centered(h, params.q), params.ring);
  IntMat H(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    H.at(i, i) = 1;
    for (int j = 0; j < n; ++j) H.at(i, n + j) = A.at(i, j);
    H.at(n + i, n + i) = params.q;
  }
  return H;
}

IntMat flipped_public_basis(const ring::Poly& h, const NtruParams& params) {
  const int n = params.ring.n;
  IntMat A = ring::anticirculant(ring::reduce_centered(h, params.q), params.ring);
  IntMat HJ(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    HJ.at(i, i) = params.q;
    for (int j = 0; j < n; ++j) HJ.at(n + i, j) = -A.at(i, j);
    HJ.at(n + i, n + i) = 1;
  }
  return HJ;
}

namespace {

using ZMat = std::vector<std::vector<mpz_class>>;

// Particular integer solution of M y = rhs via column-echelon reduction with
// a tracked unimodular column transform. Throws CompletionInfeasible when the
// system has no integer solution.
std::vector<mpz_class> solve_integer_system(ZMat M, const std::vector<mpz_class>& rhs) {
  const int nrows = (int)M.size();
  const int ncols = (int)M[0].size();
  ZMat U(ncols, std::vector<mpz_class>(ncols, 0));
  for (int j = 0; j < ncols; ++j) U[j][j] = 1;

  auto col_swap = [&](int a, int b) {
    if (a == b) return;
    for (int i = 0; i < nrows; ++i) std::swap(M[i][a], M[i][b]);
    for (int i = 0; i < ncols; ++i) std::swap(U[i][a], U[i][b]);
  };
  auto col_negate = [&](int a) {
    for (int i = 0; i < nrows; ++i) M[i][a] = -M[i][a];
    for (int i = 0; i < ncols; ++i) U[i][a] = -U[i][a];
  };
  auto col_axpy = [&](int dst, int src, const mpz_class& k) {  // col_dst -= k * col_src
    if (k == 0) return;
    for (int i = 0; i < nrows; ++i) M[i][dst] -= k * M[i][src];
    for (int i = 0; i < ncols; ++i) U[i][dst] -= k * U[i][src];
  };

  std::vector<int> pivot_col(nrows, -1);
  int c = 0;
  for (int r = 0; r < nrows && c < ncols; ++r) {
    while (true) {
      int jbest = -1;
      for (int j = c; j < ncols; ++j) {
        if (M[r][j] == 0) continue;
        if (jbest < 0 || mpz_cmpabs(M[r][j].get_mpz_t(), M[r][jbest].get_mpz_t()) < 0) jbest = j;
      }
      if (jbest < 0) break;
      col_swap(c, jbest);
      if (M[r][c] < 0) col_negate(c);
      bool clean = true;
      for (int j = c + 1; j < ncols; ++j) {
        if (M[r][j] == 0) continue;
        mpz_class quo;
        mpz_fdiv_q(quo.get_mpz_t(), M[r][j].get_mpz_t(), M[r][c].get_mpz_t());
        col_axpy(j, c, quo);
        if (M[r][j] != 0) clean = false;
      }
      if (clean) {
        pivot_col[r] = c;
        ++c;
        break;
      }
    }
  }

  std::vector<mpz_class> z(ncols, 0);
  for (int r = 0; r < nrows; ++r) {
    mpz_class acc = rhs[r];
    for (int j = 0; j < ncols; ++j)
      if (z[j] != 0) acc -= M[r][j] * z[j];
    if (pivot_col[r] < 0) {
      if (acc != 0) throw CompletionInfeasible("inconsistent row in the echelon system");
      continue;
    }
    const mpz_class& piv = M[r][pivot_col[r]];
    if (!mpz_divisible_p(acc.get_mpz_t(), piv.get_mpz_t()))
      throw CompletionInfeasible("no integer solution (non-divisible pivot)");
    z[pivot_col[r]] = acc / piv;
  }

  std::vector<mpz_class> y(ncols, 0);
  for (int i = 0; i < ncols; ++i) {
    mpz_class acc = 0;
    for (int j = 0; j < ncols; ++j)
      if (z[j] != 0) acc += U[i][j] * z[j];
    y[i] = acc;
  }
  return y;
}

}  // namespace

void complete_secret_basis(NtruKeyMaterial& keys, const NtruParams& params) {
  if (params.family != KeyFamily::TernaryXnMinus1)
    throw InvalidConfig("completion is defined for the ternary x^n - 1 family");
  const int n = params.ring.n;
  const int w = 2 * n;

  // M (G; F) = q e0 with M = [C(f)^T | -C(g)^T] encodes f*G - g*F = q.
  IntMat cf = ring::circulant(keys.f, params.ring);
  IntMat cg = ring::circulant(keys.g, params.ring);
  ZMat M(n, std::vector<mpz_class>(w));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      M[i][j] = (long)cf.at(j, i);
      M[i][n + j] = (long)-cg.at(j, i);
    }
  std::vector<mpz_class> rhs(n, 0);
  rhs[0] = (long)params.q;
  std::vector<mpz_class> y = solve_integer_system(std::move(M), rhs);

  // Size-reduce (G; F) against the invariance lattice spanned by the rows
  // (x^i g, x^i f): adding w*(g, f) maps (F, G) to (F + w*f, G + w*g).
  IntMat inv_rows(n, w);
  for (int i = 0; i < n; ++i) {
    ring::Poly xi = ring::zero_poly(n);
    xi[i] = 1;
    ring::Poly gi = ring::poly_mul(keys.g, xi, params.ring);
    ring::Poly fi = ring::poly_mul(keys.f, xi, params.ring);
    for (int k = 0; k < n; ++k) {
      inv_rows.at(i, k) = gi[k];
      inv_rows.at(i, n + k) = fi[k];
    }
  }
  bool reducible = true;
  try {
    lattice::lll_reduce(inv_rows, 0.99, 0);
  } catch (const lattice::NotFullRank&) {
    reducible = false;  // degenerate f, g rotations; keep the raw solution
  }
  std::vector<mpq_class> rem(w);
  for (int k = 0; k < w; ++k) rem[k] = mpq_class(y[k]);
  if (reducible) {
    lattice::RatMat rows = lattice::rat_from_int(inv_rows);
    lattice::GsExact gs = lattice::gram_schmidt_exact(rows);
    for (int i = n - 1; i >= 0; --i) {
      mpq_class num = 0;
      for (int k = 0; k < w; ++k) num += rem[k] * gs.bstar[i][k];
      mpq_class mu = num / gs.bstar_sq[i];
      mpq_class shifted = mu + mpq_class(1, 2);
      mpz_class c;
      mpz_fdiv_q(c.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
      if (c != 0)
        for (int k = 0; k < w; ++k) rem[k] -= mpq_class(c) * mpq_class((long)inv_rows.at(i, k));
    }
  }

  ring::Poly G(n), F(n);
  for (int k = 0; k < w; ++k) {
    assert(rem[k].get_den() == 1);
    mpz_class val = rem[k].get_num();
    if (!val.fits_slong_p()) throw CompletionInfeasible("completion coefficients exceed i64");
    if (k < n)
      G[k] = val.get_si();
    else
      F[k - n] = val.get_si();
  }

  // fG - gF = q exactly, by construction; guard the wiring.
  ring::Poly check =
      ring::poly_sub(ring::poly_mul(keys.f, G, params.ring), ring::poly_mul(keys.g, F, params.ring));
  for (int k = 0; k < n; ++k)
    if (check[k] != (k == 0 ? params.q : 0))
      throw Error("completion verification failed");

  keys.F = std::move(F);
  keys.G = std::move(G);
}

IntMat secret_basis(const NtruKeyMaterial& keys, const NtruParams& params) {
  if (!keys.F || !keys.G) throw InvalidConfig("secret basis needs a completed key");
  const int n = params.ring.n;
  IntMat S = ring::sigma_matrix(params.ring);
  IntMat TL = mat_mul(ring::circulant(keys.f, params.ring), S);
  IntMat TR = ring::circulant(keys.g, params.ring);
  IntMat BL = mat_mul(S, mat_mul(ring::circulant(*keys.F, params.ring), S));
  IntMat BR = mat_mul(S, ring::circulant(*keys.G, params.ring));
  IntMat B(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      B.at(i, j) = TL.at(i, j);
      B.at(i, n + j) = TR.at(i, j);
      B.at(n + i, j) = BL.at(i, j);
      B.at(n + i, n + j) = BR.at(i, j);
    }
  assert(lattice::is_q_symplectic(B, params.q));
  return B;
}

BddRadius bdd_radius_secret(const IntMat& secret, const NtruKeyMaterial& keys,
                            const NtruParams& params) {
  lattice::GsInfo gs = lattice::gram_schmidt(secret);
  double min_b = *std::min_element(gs.bstar_sq.begin(), gs.bstar_sq.end());
  double fg = 0, FG = 0;
  const int n = params.ring.n;
  for (int k = 0; k < n; ++k) {
    fg += (double)keys.f[k] * keys.f[k] + (double)keys.g[k] * keys.g[k];
    if (keys.F && keys.G) FG += (double)(*keys.F)[k] * (*keys.F)[k] + (double)(*keys.G)[k] * (*keys.G)[k];
  }
  double worst = std::sqrt(std::max(fg, FG));
  BddRadius out;
  out.radius = 0.5 * std::sqrt(min_b);
  out.bound = worst > 0 ? (double)params.q / (2.0 * worst) : 0.0;
  return out;
}

BddRadius bdd_radius_public(const IntMat& pub, const NtruParams& params, double delta,
                            double lambda1) {
  IntMat work = pub;
  lattice::lll_reduce(work, delta, 0);
  lattice::GsInfo gs = lattice::gram_schmidt(work);
  double min_b = *std::min_element(gs.bstar_sq.begin(), gs.bstar_sq.end());
  const double n = (double)params.ring.n;
  BddRadius out;
  out.radius = 0.5 * std::sqrt(min_b);
  out.bound = 0.5 * lambda1 * std::exp(-std::sqrt(n * std::log((double)params.q) * std::log(1.0 / delta)));
  return out;
}

void save_key_file(const std::string& path, const NtruKeyMaterial& keys,
                   const NtruParams& params) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open key file for writing: " + path);
  out << "params=" << params.ring.n << "," << params.q << "," << params.p << "," << params.d
      << "," << ring::quotient_name(params.ring.quot) << "\n";
  out << "family=" << family_name(params.family) << "\n";
  out << "f=" << ring::poly_to_string(keys.f) << "\n";
  out << "g=" << ring::poly_to_string(keys.g) << "\n";
  out << "h=" << ring::poly_to_string(keys.h) << "\n";
  if (keys.h_inv_q) out << "h_inv=" << ring::poly_to_string(*keys.h_inv_q) << "\n";
  if (keys.F) out << "F=" << ring::poly_to_string(*keys.F) << "\n";
  if (keys.G) out << "G=" << ring::poly_to_string(*keys.G) << "\n";
  if (!out) throw Error("write failed: " + path);
}

std::pair<NtruKeyMaterial, NtruParams> load_key_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open key file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("malformed key file line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* req : {"params", "f", "g", "h"})
    if (!kv.count(req)) throw Error(std::string("key file missing section: ") + req);

  NtruParams params;
  {
    std::stringstream ss(kv["params"]);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ',')) parts.push_back(tok);
    if (parts.size() != 5) throw Error("params section needs n,q,p,d,quotient");
    params.ring.n = std::stoi(parts[0]);
    params.q = std::stoll(parts[1]);
    params.p = std::stoll(parts[2]);
    params.d = std::stoi(parts[3]);
    auto quot = ring::quotient_from_name(parts[4]);
    if (!quot) throw Error("unknown quotient: " + parts[4]);
    params.ring.quot = *quot;
  }
  if (kv.count("family")) {
    auto fam = family_from_name(kv["family"]);
    if (!fam) throw Error("unknown key family: " + kv["family"]);
    params.family = *fam;
  }

  NtruKeyMaterial keys;
  keys.f = ring::poly_from_string(kv["f"]);
  keys.g = ring::poly_from_string(kv["g"]);
  keys.h = ring::poly_from_string(kv["h"]);
  if (kv.count("h_inv")) {
    keys.h_inv_q = ring::poly_from_string(kv["h_inv"]);
    params.require_h_invertible = true;
  }
  if (kv.count("F")) keys.F = ring::poly_from_string(kv["F"]);
  if (kv.count("G")) keys.G = ring::poly_from_string(kv["G"]);
  for (const ring::Poly* poly : {&keys.f, &keys.g, &keys.h})
    if ((int)poly->size() != params.ring.n) throw Error("key file polynomial length mismatch");

  auto inv = ring::poly_invert(keys.f, params.ring, params.q);
  if (!inv) throw Error("key file f is not invertible mod q");
  keys.f_inv_q = ring::reduce_centered(*inv, params.q);
  validate(params);
  return {std::move(keys), std::move(params)};
}

}  // namespace ntrugkp::ntru
