#include "ntrugkp/gkp.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace ntrugkp::gkp {

double GkpCode::delta() const {
  return std::sqrt((double)lambda1_sq / ((double)lambda * q));
}

double GkpCode::scale() const { return std::sqrt((double)lambda * q); }

GkpCode code_from_ntru(const ring::Poly& h, i64 lambda, const ntru::NtruParams& params) {
  if (lambda < 2) throw InvalidConfig("lambda must be at least 2");
  GkpCode code;
  code.n = params.ring.n;
  code.q = params.q;
  code.lambda = lambda;
  code.ring = params.ring;
  code.h = ring::reduce_centered(h, params.q);
  code.basis = ntru::public_basis(code.h, params);
  code.flipped = ntru::flipped_public_basis(code.h, params);
  code.a_h = ring::anticirculant(code.h, params.ring);
  assert(lattice::is_q_symplectic(code.basis, code.q));
  lattice::EnumResult svp = lattice::svp_enumerate(code.basis);
  code.lambda1_sq = svp.norm_sq;
  code.short_witness = svp.vec;
  return code;
}

TrivialCorrection trivial_syndrome_and_correct(const std::vector<double>& e,
                                               const GkpCode& code) {
  const int n = code.n;
  assert((int)e.size() == 2 * n);
  const double sc = code.scale();
  TrivialCorrection out;
  out.syndrome.resize(2 * n);
  out.residual.u.assign(n, 0);
  out.residual.v.assign(n, 0);
  for (int k = 0; k < 2 * n; ++k) {
    double x = sc * e[k];
    double r = std::floor(x + 0.5);  // half rounds up
    out.syndrome[k] = x - r;
    i64 ri = (i64)r;
    if (k < n)
      out.residual.u[k] = ri;
    else
      out.residual.v[k - n] = ri;
  }
  return out;
}

namespace {

// row-vector product u A(h)
std::vector<i64> times_ah(const std::vector<i64>& u, const IntMat& A) {
  const int n = A.rows;
  std::vector<i64> out(n, 0);
  for (int i = 0; i < n; ++i) {
    i128 acc = 0;
    for (int j = 0; j < n; ++j) acc += (i128)u[j] * A.at(j, i);
    out[i] = checked_i64(acc, "u*A(h)");
  }
  return out;
}

i64 pos_mod(i64 x, i64 m) { return ((x % m) + m) % m; }

}  // namespace

std::vector<i64> residual_syndrome(const ResidualError& r, const GkpCode& code) {
  const int n = code.n;
  assert((int)r.u.size() == n && (int)r.v.size() == n);
  std::vector<i64> ua = times_ah(r.u, code.a_h);
  std::vector<i64> out(n);
  for (int i = 0; i < n; ++i) {
    i64 w = checked_i64((i128)r.v[i] - ua[i], "syndrome");
    out[i] = ring::centered(pos_mod(w, code.q), code.q);
    if (pos_mod(w - out[i], code.q) != 0)
      throw SecondBlockNonzero("mod-q reduction drifted");
  }
  return out;
}

std::vector<i64> logical_coset(const std::vector<i64>& x, const GkpCode& code) {
  const int n = code.n;
  assert((int)x.size() == 2 * n);
  std::vector<i64> u(x.begin(), x.begin() + n);
  std::vector<i64> ua = times_ah(u, code.a_h);
  std::vector<i64> label(2 * n);
  for (int i = 0; i < n; ++i) label[i] = pos_mod(u[i], code.lambda);
  for (int i = 0; i < n; ++i) {
    i64 w = checked_i64((i128)x[n + i] - ua[i], "coset");
    if (w % code.q != 0) throw NotInDualLattice("second-block coefficient not integral");
    label[n + i] = pos_mod(w / code.q, code.lambda);
  }
  return label;
}

bool is_trivial_coset(const std::vector<i64>& label) {
  return std::all_of(label.begin(), label.end(), [](i64 v) { return v == 0; });
}

namespace {

// y in the row span of basis with integer coefficients, checked exactly.
bool integer_coeffs(const std::vector<mpq_class>& y, const lattice::RatMat& dual) {
  const size_t m = dual.size();
  for (size_t j = 0; j < m; ++j) {
    mpq_class c = 0;
    for (size_t k = 0; k < y.size(); ++k) c += y[k] * dual[j][k];
    if (c.get_den() != 1) return false;
  }
  return true;
}

DistanceInfo pick_nontrivial(const std::vector<lattice::ShortVector>& shell, const IntMat& basis,
                             i64 lambda, i64 q) {
  lattice::RatMat dual = lattice::dual_basis_exact(basis);
  DistanceInfo out;
  out.min_norm_sq = -1;
  for (const auto& sv : shell) {
    bool divisible = std::all_of(sv.vec.begin(), sv.vec.end(),
                                 [&](i64 c) { return c % lambda == 0; });
    if (divisible) {
      std::vector<mpq_class> y(sv.vec.size());
      for (size_t k = 0; k < sv.vec.size(); ++k) {
      y[k] = mpq_class((long)sv.vec[k], (long)lambda);
      y[k].canonicalize();
    }
      if (integer_coeffs(y, dual)) continue;  // member of lambda*L, logically trivial
    }
    if (out.min_norm_sq < 0) {
      out.min_norm_sq = sv.norm_sq;
      out.witness = sv.vec;
    }
    if (sv.norm_sq == out.min_norm_sq) ++out.kissing;
  }
  if (out.min_norm_sq >= 0) {
    out.delta_sq = mpq_class((long)out.min_norm_sq, (long)(lambda * q));
    out.delta_sq.canonicalize();
  }
  return out;
}

}  // namespace

DistanceInfo distance_of_basis(const IntMat& basis, i64 lambda, i64 q) {
  lattice::EnumResult svp = lattice::svp_enumerate(basis);
  i64 r2 = svp.norm_sq;
  // The minimum shell always survives the lambda*L filter: x = lambda*y with
  // y in L would be strictly longer than lambda1. The loop is a pure guard.
  for (int rounds = 0; rounds < 4; ++rounds) {
    auto shell = lattice::short_vectors_up_to(basis, r2);
    DistanceInfo out = pick_nontrivial(shell, basis, lambda, q);
    if (out.min_norm_sq >= 0) return out;
    r2 *= 2;
  }
  throw Error("distance: no nontrivial vector found (unreachable)");
}

DistanceInfo distance(const GkpCode& code) {
  return distance_of_basis(code.basis, code.lambda, code.q);
}

DistanceInfo distance_of_basis_theta(const IntMat& basis, i64 lambda, i64 q, i64 r2max) {
  if (basis.rows > 8)
    throw lattice::DimensionTooLarge("distance_of_basis_theta: " + std::to_string(basis.rows));
  auto counts_l = lattice::theta_series(basis, r2max);
  auto counts_ll = lattice::theta_series(mat_scale(basis, lambda), r2max);
  for (const auto& [m, cnt] : counts_l) {
    if (m == 0) continue;
    auto it = counts_ll.find(m);
    i64 diff = cnt - (it == counts_ll.end() ? 0 : it->second);
    if (diff > 0) {
      assert(diff % 2 == 0);
      DistanceInfo out;
      out.min_norm_sq = m;
      out.delta_sq = mpq_class((long)m, (long)(lambda * q));
      out.delta_sq.canonicalize();
      out.kissing = diff / 2;
      return out;
    }
  }
  throw RadiusTooSmall("no theta gap up to " + std::to_string(r2max));
}

DistanceInfo distance_from_theta(const GkpCode& code, i64 r2max) {
  return distance_of_basis_theta(code.basis, code.lambda, code.q, r2max);
}

namespace {

bool next_label(std::vector<i64>& xi, i64 lambda) {
  for (int k = (int)xi.size() - 1; k >= 0; --k) {
    if (++xi[k] < lambda) return true;
    xi[k] = 0;
  }
  return false;
}

std::vector<i64> label_times_basis(const std::vector<i64>& xi, const IntMat& basis) {
  std::vector<i64> out(basis.cols, 0);
  for (int i = 0; i < basis.rows; ++i) {
    if (xi[i] == 0) continue;
    for (int k = 0; k < basis.cols; ++k)
      out[k] = checked_i64((i128)out[k] + (i128)xi[i] * basis.at(i, k), "label rep");
  }
  return out;
}

}  // namespace

MldResult mld_decode(const std::vector<double>& e, const GkpCode& code, double sigma_bar,
                     double r2max) {
  const int dim = 2 * code.n;
  if (dim > 8) throw lattice::DimensionTooLarge("mld_decode: " + std::to_string(dim));
  assert((int)e.size() == dim);
  if (sigma_bar <= 0) throw InvalidConfig("sigma_bar must be positive");

  TrivialCorrection tc = trivial_syndrome_and_correct(e, code);
  std::vector<i64> qs1 = residual_syndrome(tc.residual, code);
  std::vector<double> c0(dim);
  for (int k = 0; k < dim; ++k)
    c0[k] = tc.syndrome[k] + (k < code.n ? 0.0 : (double)qs1[k - code.n]);

  IntMat laml = mat_scale(code.basis, code.lambda);
  const double s2int = 2.0 * sigma_bar * sigma_bar * code.lambda * code.q;
  const double shell = r2max < 0 ? (double)code.lambda1_sq + 8.0 : r2max;

  MldResult out;
  out.best_log_weight = -std::numeric_limits<double>::infinity();
  out.runner_up_log_weight = -std::numeric_limits<double>::infinity();

  std::vector<i64> xi(dim, 0);
  do {
    std::vector<i64> rep = label_times_basis(xi, code.basis);
    std::vector<double> target(dim);
    for (int k = 0; k < dim; ++k) target[k] = -(c0[k] + (double)rep[k]);
    lattice::NearestResult seed = lattice::babai_nearest_plane(laml, target);
    double d0 = 0;
    for (int k = 0; k < dim; ++k) {
      double d = target[k] - (double)seed.vec[k];
      d0 += d * d;
    }
    double radius = d0 + shell;
    auto pts = lattice::points_near(laml, target, radius);
    assert(!pts.empty());
    double dmin = pts[0].dist_sq;
    double acc = 0;
    for (const auto& pt : pts) acc += std::exp(-(pt.dist_sq - dmin) / s2int);
    double logw = -dmin / s2int + std::log(acc);
    // Labels are visited in ascending lexicographic order, so keeping the
    // incumbent on a within-tolerance tie realizes the smallest-label rule
    // even when summation order perturbs exactly-tied weights.
    if (logw > out.best_log_weight + 1e-9) {
      out.runner_up_log_weight = out.best_log_weight;
      out.best_log_weight = logw;
      out.label = xi;
    } else if (logw > out.runner_up_log_weight) {
      out.runner_up_log_weight = logw;
    }
    out.truncation_radius_sq = std::max(out.truncation_radius_sq, radius);
  } while (next_label(xi, code.lambda));
  return out;
}

ThresholdInfo threshold_bound(const GkpCode& code) {
  const int dim = 2 * code.n;
  if (dim > 8) throw lattice::DimensionTooLarge("threshold_bound: " + std::to_string(dim));
  IntMat laml = mat_scale(code.basis, code.lambda);
  const double unit = (double)code.lambda * code.q;

  ThresholdInfo out;
  out.bound = std::numeric_limits<double>::infinity();
  std::vector<i64> best_target;

  std::vector<i64> xi(dim, 0);
  while (next_label(xi, code.lambda)) {  // skips the all-zero label
    std::vector<i64> rep = label_times_basis(xi, code.basis);
    std::vector<i64> target(dim);
    for (int k = 0; k < dim; ++k) target[k] = -rep[k];
    auto ties = lattice::cvp_enumerate_all(laml, target);
    i64 d2 = ties[0].norm_sq;
    i64 count = (i64)ties.size();
    if (count <= 1) {
      out.unit_multiplicity.push_back(xi);
      continue;
    }
    double val = ((double)d2 / unit) / std::log((double)count);
    if (val < out.bound) {
      out.bound = val;
      out.arg_label = xi;
      out.arg_delta_sq = (double)d2 / unit;
      out.arg_count = count;
      best_target = target;
    }
  }

  if (!best_target.empty()) {
    std::vector<double> treal(best_target.begin(), best_target.end());
    double base = out.arg_delta_sq * unit;
    out.next_norm_sq = 0;
    out.next_count = 0;
    // The shell after the minimum can sit arbitrarily far out; widen the
    // window until it shows up.
    for (double extra = 8.5; out.next_count == 0; extra *= 2) {
      auto pts = lattice::points_near(laml, treal, base + extra);
      for (const auto& pt : pts) {
        i64 d2 = (i64)std::llround(pt.dist_sq);
        if (d2 <= (i64)std::llround(base)) continue;
        if (out.next_norm_sq == 0 || d2 < out.next_norm_sq) {
          out.next_norm_sq = d2;
          out.next_count = 1;
        } else if (d2 == out.next_norm_sq) {
          ++out.next_count;
        }
      }
    }
  }
  return out;
}

}  // namespace ntrugkp::gkp
