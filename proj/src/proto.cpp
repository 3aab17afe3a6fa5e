#include "ntrugkp/proto.hpp"

#include <cassert>
#include <cmath>

namespace ntrugkp::proto {

std::string status_name(Status s) {
  switch (s) {
    case Status::Recovered: return "recovered";
    case Status::CheckFail: return "check-fail";
    case Status::LogicalCorrupted: return "logical-corrupted";
  }
  return "?";
}

Session make_session(const ntru::NtruParams& params, i64 lambda, Rng& rng) {
  Session s;
  s.params = params;
  s.keys = ntru::keygen(params, rng);
  s.code = gkp::code_from_ntru(s.keys.h, lambda, params);
  s.reduced_flipped = decode::reduced_flipped_basis(s.code, true);
  return s;
}

std::pair<ring::Poly, ring::Poly> sample_message_pair(const gkp::GkpCode& code, Rng& rng) {
  const int n = code.n;
  const i64 wmax = (code.lambda1_sq - 1) / 4;  // 4*w < lambda1_sq keeps |(r,m)| < lambda1/2
  i64 w = (i64)rng.bounded((uint64_t)wmax + 1);
  if (w > 2 * n) w = 2 * n;

  std::vector<int> idx(2 * n);
  for (int i = 0; i < 2 * n; ++i) idx[i] = i;
  for (i64 i = 0; i < w; ++i) {
    int j = (int)(i + (i64)rng.bounded((uint64_t)(2 * n - i)));
    std::swap(idx[i], idx[j]);
  }
  ring::Poly r = ring::zero_poly(n), m = ring::zero_poly(n);
  for (i64 i = 0; i < w; ++i) {
    i64 sign = rng.bounded(2) ? 1 : -1;
    if (idx[i] < n)
      r[idx[i]] = sign;
    else
      m[idx[i] - n] = sign;
  }
  return {std::move(m), std::move(r)};
}

std::vector<double> bob_encode(const ring::Poly& m, const ring::Poly& r,
                               const gkp::GkpCode& code) {
  const int n = code.n;
  assert((int)m.size() == n && (int)r.size() == n);
  ring::Poly u = ring::poly_neg(ring::mirror(r, code.ring));
  std::vector<double> e0(2 * n);
  const double sc = code.scale();
  for (int i = 0; i < n; ++i) {
    e0[i] = (double)u[i] / sc;
    e0[n + i] = (double)m[i] / sc;
  }
  return e0;
}

std::vector<double> transmit(const std::vector<double>& e0, double sigma, Rng& rng) {
  double sigma_bar = sigma / std::sqrt(2.0 * M_PI);
  std::vector<double> e = e0;
  for (double& x : e) x += rng.normal(sigma_bar);
  return e;
}

ReceiveResult alice_receive(const std::vector<double>& e, const Session& session,
                            const gkp::ResidualError* truth, decode::Method method) {
  const gkp::GkpCode& code = session.code;
  gkp::TrivialCorrection tc = gkp::trivial_syndrome_and_correct(e, code);
  std::vector<i64> qs1 = gkp::residual_syndrome(tc.residual, code);

  decode::DecodeOutcome outcome;
  switch (method) {
    case decode::Method::NtruDecode:
      outcome = decode::ntru_decode(qs1, code, session.keys, session.params);
      break;
    case decode::Method::BabaiDecode:
      outcome = decode::babai_decode(qs1, code, session.reduced_flipped);
      break;
    case decode::Method::ExactMed:
      outcome = decode::exact_med(qs1, code);
      break;
  }

  ReceiveResult out;
  out.used = method;
  out.consistent = outcome.syndrome_consistent;
  out.m_hat = outcome.estimate.v;
  out.r_hat = ring::poly_neg(ring::mirror(outcome.estimate.u, code.ring));
  out.frame.resize(2 * code.n);
  for (int i = 0; i < code.n; ++i) {
    out.frame[i] = ((outcome.estimate.u[i] % code.lambda) + code.lambda) % code.lambda;
    out.frame[code.n + i] = ((outcome.estimate.v[i] % code.lambda) + code.lambda) % code.lambda;
  }
  if (!outcome.syndrome_consistent) {
    out.status = Status::CheckFail;
  } else if (truth) {
    bool exact = outcome.estimate.u == truth->u && outcome.estimate.v == truth->v;
    out.status = exact ? Status::Recovered : Status::LogicalCorrupted;
  } else {
    out.status = Status::Recovered;
  }
  return out;
}

EveView eavesdropper_view(const std::vector<double>& e, const gkp::GkpCode& code) {
  const int n = code.n;
  gkp::TrivialCorrection tc = gkp::trivial_syndrome_and_correct(e, code);
  std::vector<i64> qs1 = gkp::residual_syndrome(tc.residual, code);

  EveView out;
  out.c = qs1;

  const double sc = code.scale();
  out.residual_after_generic = e;
  for (int i = 0; i < n; ++i) out.residual_after_generic[n + i] -= (double)qs1[i] / sc;

  // Rounded leftover after the generic correction: (u, v - qs1). Its first
  // block determines the frame Eve cannot fix; mirrored back it reads as r.
  ring::Poly neg_u = ring::poly_neg(tc.residual.u);
  ring::Poly rr = ring::mirror(neg_u, code.ring);
  out.phase_labels.resize(n);
  for (int i = 0; i < n; ++i)
    out.phase_labels[i] = ((rr[i] % code.lambda) + code.lambda) % code.lambda;
  return out;
}

}  // namespace ntrugkp::proto
