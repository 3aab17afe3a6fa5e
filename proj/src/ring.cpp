#include "ntrugkp/ring.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ntrugkp {

IntMat identity_mat(int n) {
  IntMat m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

IntMat mat_mul(const IntMat& a, const IntMat& b) {
  assert(a.cols == b.rows);
  IntMat out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      i64 aik = a.at(i, k);
      if (aik == 0) continue;
      for (int j = 0; j < b.cols; ++j) {
        i128 acc = (i128)out.at(i, j) + (i128)aik * b.at(k, j);
        out.at(i, j) = checked_i64(acc, "mat_mul");
      }
    }
  }
  return out;
}

IntMat mat_transpose(const IntMat& a) {
  IntMat out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
  return out;
}

IntMat mat_scale(const IntMat& a, i64 s) {
  IntMat out = a;
  for (auto& x : out.v) x = checked_i64((i128)x * s, "mat_scale");
  return out;
}

IntMat symplectic_form(int n) {
  IntMat j(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j.at(i, n + i) = 1;
    j.at(n + i, i) = -1;
  }
  return j;
}

std::string mat_to_string(const IntMat& a) {
  std::ostringstream os;
  for (int i = 0; i < a.rows; ++i) {
    for (int j = 0; j < a.cols; ++j) {
      if (j) os << ' ';
      os << a.at(i, j);
    }
    os << '\n';
  }
  return os.str();
}

IntMat mat_from_string(const std::string& text) {
  std::vector<std::vector<i64>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<i64> row;
    i64 x;
    while (ls >> x) row.push_back(x);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("mat_from_string: no rows");
  IntMat m((int)rows.size(), (int)rows[0].size());
  for (int i = 0; i < m.rows; ++i) {
    if ((int)rows[i].size() != m.cols) throw Error("mat_from_string: ragged rows");
    for (int j = 0; j < m.cols; ++j) m.at(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace ntrugkp

namespace ntrugkp::ring {

Poly zero_poly(int n) { return Poly(n, 0); }

Poly one_poly(int n) {
  Poly f(n, 0);
  f[0] = 1;
  return f;
}

bool is_zero(const Poly& f) {
  return std::all_of(f.begin(), f.end(), [](i64 c) { return c == 0; });
}

Poly poly_add(const Poly& a, const Poly& b) {
  assert(a.size() == b.size());
  Poly out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = checked_i64((i128)a[i] + b[i], "poly_add");
  return out;
}

Poly poly_sub(const Poly& a, const Poly& b) {
  assert(a.size() == b.size());
  Poly out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = checked_i64((i128)a[i] - b[i], "poly_sub");
  return out;
}

Poly poly_neg(const Poly& a) {
  Poly out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

i64 centered(i64 x, i64 m) {
  assert(m > 0);
  i64 r = x % m;
  if (r < 0) r += m;
  if (2 * r > m) r -= m;
  return r;
}

Poly reduce_centered(const Poly& f, i64 m) {
  Poly out(f.size());
  for (size_t i = 0; i < f.size(); ++i) out[i] = centered(f[i], m);
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b, const RingParams& ring) {
  int n = ring.n;
  assert((int)a.size() == n && (int)b.size() == n);
  std::vector<i128> acc(n, 0);
  for (int i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < n; ++j) {
      if (b[j] == 0) continue;
      int k = i + j;
      i128 term = (i128)a[i] * b[j];
      if (k >= n) {
        k -= n;
        if (ring.quot == Quotient::XnPlus1) term = -term;
      }
      acc[k] += term;
    }
  }
  Poly out(n);
  for (int k = 0; k < n; ++k) out[k] = checked_i64(acc[k], "poly_mul");
  return out;
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const RingParams& ring, i64 m) {
  return reduce_centered(poly_mul(a, b, ring), m);
}

Poly mirror(const Poly& f, const RingParams& ring) {
  int n = ring.n;
  assert((int)f.size() == n);
  Poly out(n);
  out[0] = f[0];
  for (int i = 1; i < n; ++i) {
    i64 c = f[n - i];
    out[i] = (ring.quot == Quotient::XnPlus1) ? -c : c;
  }
  return out;
}

i64 eval_at_one(const Poly& f) {
  i128 s = 0;
  for (i64 c : f) s += c;
  return checked_i64(s, "eval_at_one");
}

namespace {

// Dense GF(p) polynomials of degree <= n as coefficient vectors; the quotient
// polynomial itself has degree n, everything else stays below.
using FPoly = std::vector<i64>;

int fdeg(const FPoly& f) {
  for (int i = (int)f.size() - 1; i >= 0; --i)
    if (f[i] != 0) return i;
  return -1;
}

i64 mod_pos(i64 x, i64 p) {
  i64 r = x % p;
  return r < 0 ? r + p : r;
}

i64 inv_mod_prime(i64 a, i64 p) {
  // Extended Euclid on integers.
  i64 t = 0, newt = 1, r = p, newr = mod_pos(a, p);
  while (newr != 0) {
    i64 q = r / newr;
    std::swap(t -= q * newt, newt);
    std::swap(r -= q * newr, newr);
  }
  assert(r == 1);
  return mod_pos(t, p);
}

// rem, and quotient accumulated into (tq): r -= q*b with Bezout tracking done
// by the caller.
void fpoly_submul(FPoly& r, const FPoly& b, i64 c, int shift, i64 p) {
  for (size_t i = 0; i + shift < r.size() && i < b.size(); ++i)
    r[i + shift] = mod_pos(r[i + shift] - c * b[i], p);
}

FPoly quotient_poly(const RingParams& ring) {
  FPoly q(ring.n + 1, 0);
  q[ring.n] = 1;
  q[0] = (ring.quot == Quotient::XnPlus1) ? 1 : -1;
  return q;
}

// Inverse of f modulo (quotient, prime p): extended Euclid over GF(p)[x].
std::optional<Poly> invert_mod_prime(const Poly& f, const RingParams& ring, i64 p) {
  int n = ring.n;
  FPoly r0 = quotient_poly(ring);
  for (auto& c : r0) c = mod_pos(c, p);
  FPoly r1(n + 1, 0);
  for (int i = 0; i < n; ++i) r1[i] = mod_pos(f[i], p);
  // Bezout coefficients with respect to f only: s0*f == r0 - (multiple of
  // quotient), s1*f == r1 (mod quotient).
  FPoly s0(n + 1, 0), s1(n + 1, 0);
  s1[0] = 1;
  while (fdeg(r1) >= 0) {
    while (fdeg(r0) >= fdeg(r1) && fdeg(r1) >= 0) {
      int d0 = fdeg(r0), d1 = fdeg(r1);
      i64 c = mod_pos(r0[d0] * inv_mod_prime(r1[d1], p), p);
      int shift = d0 - d1;
      fpoly_submul(r0, r1, c, shift, p);
      // s0 -= c x^shift s1, reduced mod quotient lazily: degrees stay <= n
      // because shift <= n and we fold afterwards.
      FPoly tmp(2 * n + 2, 0);
      for (size_t i = 0; i < s1.size(); ++i)
        if (s1[i]) tmp[i + shift] = s1[i];
      // fold x^n = -quot[0]
      i64 fold = (ring.quot == Quotient::XnPlus1) ? p - 1 : 1;
      for (int i = 2 * n + 1; i > n; --i) {
        if (tmp[i]) {
          tmp[i - n] = mod_pos(tmp[i - n] + fold * tmp[i], p);
          tmp[i] = 0;
        }
      }
      // careful: x^n itself also folds to fold*x^0, but only for the working
      // representative; keep index n explicit since r0 may hold degree n.
      if (tmp[n]) {
        tmp[0] = mod_pos(tmp[0] + fold * tmp[n], p);
        tmp[n] = 0;
      }
      for (int i = 0; i <= n; ++i) s0[i] = mod_pos(s0[i] - c * tmp[i], p);
    }
    std::swap(r0, r1);
    std::swap(s0, s1);
  }
  int d = fdeg(r0);
  if (d != 0) return std::nullopt;  // non-trivial gcd with the quotient
  i64 scale = inv_mod_prime(r0[0], p);
  Poly inv(n, 0);
  for (int i = 0; i < n; ++i) inv[i] = mod_pos(s0[i] * scale, p);
  // Degree-n residue of the Bezout coefficient folds into the ring.
  if (s0[n]) {
    i64 fold = (ring.quot == Quotient::XnPlus1) ? p - 1 : 1;
    inv[0] = mod_pos(inv[0] + fold * mod_pos(s0[n] * scale, p), p);
  }
  return reduce_centered(inv, p);
}

bool is_power_of_two(i64 m) { return m > 0 && (m & (m - 1)) == 0; }

bool is_prime(i64 m) {
  if (m < 2) return false;
  for (i64 d = 2; d * d <= m; ++d)
    if (m % d == 0) return false;
  return true;
}

}  // namespace

std::optional<Poly> poly_invert(const Poly& f, const RingParams& ring, i64 m) {
  assert((int)f.size() == ring.n);
  if (is_power_of_two(m)) {
    if (m == 1) return zero_poly(ring.n);
    auto v2 = invert_mod_prime(f, ring, 2);
    if (!v2) return std::nullopt;
    // Hensel: v <- v(2 - f v), doubling the 2-adic precision each round.
    Poly v = *v2;
    i64 mod = 2;
    while (mod < m) {
      mod = std::min(m, mod * mod);
      Poly fv = poly_mul_mod(f, v, ring, mod);
      Poly two = zero_poly(ring.n);
      two[0] = 2;
      v = poly_mul_mod(v, poly_sub(two, fv), ring, mod);
    }
    Poly check = poly_mul_mod(f, v, ring, m);
    if (check != one_poly(ring.n)) return std::nullopt;
    return reduce_centered(v, m);
  }
  if (is_prime(m)) {
    auto inv = invert_mod_prime(f, ring, m);
    if (!inv) return std::nullopt;
    Poly check = poly_mul_mod(f, *inv, ring, m);
    if (check != one_poly(ring.n)) return std::nullopt;
    return inv;
  }
  throw InvalidModulus("poly_invert requires a prime or power-of-two modulus, got " +
                       std::to_string(m));
}

Poly sample_ternary(int n, int d1, int d2, Rng& rng) {
  assert(d1 + d2 <= n);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    int j = (int)rng.bounded((uint64_t)i + 1);
    std::swap(idx[i], idx[j]);
  }
  Poly f(n, 0);
  for (int i = 0; i < d1; ++i) f[idx[i]] = 1;
  for (int i = 0; i < d2; ++i) f[idx[d1 + i]] = -1;
  return f;
}

Poly sample_gaussian_poly(int n, double sigma2, Rng& rng) {
  Poly f(n);
  for (int i = 0; i < n; ++i) f[i] = rng.discrete_gaussian(sigma2);
  return f;
}

IntMat rot_matrix(const RingParams& ring) {
  int n = ring.n;
  IntMat t(n, n);
  // Row i of C(f) is x^i f; the companion matrix acts as f -> x f.
  // Column form: (x*f)_0 = -quot0 * f_{n-1}, (x*f)_j = f_{j-1}.
  i64 wrap = (ring.quot == Quotient::XnPlus1) ? -1 : 1;
  for (int j = 1; j < n; ++j) t.at(j - 1, j) = 1;
  t.at(n - 1, 0) = wrap;
  return t;
}

IntMat circulant(const Poly& f, const RingParams& ring) {
  int n = ring.n;
  assert((int)f.size() == n);
  IntMat c(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int k = i + j;
      i64 val = f[j];
      if (k >= n) {
        k -= n;
        if (ring.quot == Quotient::XnPlus1) val = -val;
      }
      c.at(i, k) = val;
    }
  }
  return c;
}

IntMat anticirculant(const Poly& f, const RingParams& ring) {
  int n = ring.n;
  assert((int)f.size() == n);
  IntMat a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      int k = i + j;  // entry (i, j) holds coefficient j of x^{-i} f
      i64 val;
      if (k < n) {
        val = f[k];
      } else {
        val = f[k - n];
        if (ring.quot == Quotient::XnPlus1) val = -val;
      }
      a.at(i, j) = val;
    }
  }
  return a;
}

IntMat sigma_matrix(const RingParams& ring) {
  return anticirculant(one_poly(ring.n), ring);
}

std::string poly_to_string(const Poly& f) {
  std::ostringstream os;
  for (size_t i = 0; i < f.size(); ++i) {
    if (i) os << ',';
    os << f[i];
  }
  return os.str();
}

Poly poly_from_string(const std::string& text) {
  Poly f;
  std::string tok;
  std::istringstream is(text);
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) continue;
    f.push_back(std::stoll(tok));
  }
  if (f.empty()) throw Error("poly_from_string: empty");
  return f;
}

std::string quotient_name(Quotient q) {
  return q == Quotient::XnMinus1 ? "XnMinus1" : "XnPlus1";
}

std::optional<Quotient> quotient_from_name(const std::string& name) {
  if (name == "XnMinus1") return Quotient::XnMinus1;
  if (name == "XnPlus1") return Quotient::XnPlus1;
  return std::nullopt;
}

}  // namespace ntrugkp::ring
