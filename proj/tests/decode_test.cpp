#include "ntrugkp/decode.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "ntrugkp/gkp.hpp"
#include "ntrugkp/lattice.hpp"
#include "ntrugkp/ntru.hpp"
#include "ntrugkp/ring.hpp"
#include "ntrugkp/rng.hpp"

using namespace ntrugkp;
using namespace ntrugkp::decode;
using ring::Poly;

namespace {

struct Fixture {
  ntru::NtruParams params;
  ntru::NtruKeyMaterial keys;
  gkp::GkpCode code;
  IntMat reduced;
};

Fixture make_fixture(int n, i64 q, int d, uint64_t seed) {
  Fixture fx;
  fx.params = ntru::ternary_params(n, q, 3, d, true);
  Rng rng(seed);
  fx.keys = ntru::keygen(fx.params, rng);
  fx.code = gkp::code_from_ntru(fx.keys.h, 2, fx.params);
  fx.reduced = reduced_flipped_basis(fx.code, true);
  return fx;
}

i64 estimate_norm_sq(const gkp::ResidualError& e) {
  return lattice::norm_sq(e.u) + lattice::norm_sq(e.v);
}

}  // namespace

TEST(MethodNames, RoundTrip) {
  for (Method m : {Method::NtruDecode, Method::BabaiDecode, Method::ExactMed})
    EXPECT_EQ(method_from_name(method_name(m)), m);
  EXPECT_FALSE(method_from_name("nope").has_value());
}

TEST(NtruDecode, RecoversProvablyValidPlants) {
  Fixture fx = make_fixture(7, 8, 2, 90);
  // v = +x^i with u = 0, and u = -+x^j with v = 0: the decryption window
  // argument from the key structure guarantees validity.
  for (int i = 0; i < 7; ++i) {
    gkp::ResidualError truth{ring::zero_poly(7), ring::zero_poly(7)};
    truth.v[i] = 1;
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    DecodeOutcome out = ntru_decode(qs1, fx.code, fx.keys, fx.params);
    EXPECT_TRUE(out.syndrome_consistent);
    EXPECT_EQ(out.estimate.u, truth.u);
    EXPECT_EQ(out.estimate.v, truth.v);
    EXPECT_EQ(judge(out, truth, fx.code), Verdict::Success);
  }
  for (int j = 0; j < 7; ++j) {
    gkp::ResidualError truth{ring::zero_poly(7), ring::zero_poly(7)};
    truth.u[j] = (j % 2 == 0) ? 1 : -1;
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    DecodeOutcome out = ntru_decode(qs1, fx.code, fx.keys, fx.params);
    EXPECT_TRUE(out.syndrome_consistent);
    EXPECT_EQ(out.estimate.u, truth.u);
    EXPECT_EQ(out.estimate.v, truth.v);
    EXPECT_EQ(judge(out, truth, fx.code), Verdict::Success);
  }
}

TEST(NtruDecode, RecoveryMatchesTheValidityPredicate) {
  Fixture fx = make_fixture(7, 8, 2, 91);
  Rng rng(92);
  int valid_cnt = 0, invalid_cnt = 0;
  for (int it = 0; it < 200; ++it) {
    gkp::ResidualError truth;
    // Mix plants so both predicate branches occur. A lone +1 in v (with
    // u = 0) or a lone spike in u (with v = 0) always fits the centered
    // window; dense ternary pairs overflow it almost surely.
    truth.u = ring::zero_poly(7);
    truth.v = ring::zero_poly(7);
    if (it % 4 == 0) {
      truth.v[(int)rng.bounded(7)] = 1;
    } else if (it % 4 == 1) {
      truth.u[(int)rng.bounded(7)] = rng.bounded(2) ? 1 : -1;
    } else {
      truth.u = ring::sample_ternary(7, 2, 2, rng);
      truth.v = ring::sample_ternary(7, 2, 2, rng);
    }
    Poly r = ring::poly_neg(ring::mirror(truth.u, fx.params.ring));
    bool valid = ntru::decryption_valid(truth.v, r, fx.keys, fx.params);
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    DecodeOutcome out = ntru_decode(qs1, fx.code, fx.keys, fx.params);
    // The algebraic consistency of this decoder never depends on validity.
    EXPECT_TRUE(out.syndrome_consistent);
    bool recovered = out.estimate.u == truth.u && out.estimate.v == truth.v;
    EXPECT_EQ(recovered, valid) << "trial " << it;
    valid_cnt += valid;
    invalid_cnt += !valid;
  }
  EXPECT_GT(valid_cnt, 0);
  EXPECT_GT(invalid_cnt, 0);
}

TEST(NtruDecode, NeedsInvertibleH) {
  ntru::NtruParams params = ntru::ternary_params(7, 8, 3, 2, false);
  Rng rng(93);
  ntru::NtruKeyMaterial keys = ntru::keygen(params, rng);
  gkp::GkpCode code = gkp::code_from_ntru(keys.h, 2, params);
  std::vector<i64> qs1(7, 0);
  EXPECT_THROW(ntru_decode(qs1, code, keys, params), ntru::HNotInvertible);
}

TEST(BabaiBdd, SwappedReadingIsAlwaysConsistent) {
  Fixture fx = make_fixture(7, 8, 2, 94);
  Rng rng(95);
  for (int it = 0; it < 100; ++it) {
    gkp::ResidualError truth;
    truth.u = ring::sample_ternary(7, 2, 2, rng);
    truth.v = ring::sample_ternary(7, 2, 2, rng);
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    gkp::ResidualError est = babai_bdd_estimate(qs1, fx.code, fx.reduced);
    EXPECT_EQ(gkp::residual_syndrome(est, fx.code), qs1);
  }
  std::vector<i64> zero(7, 0);
  gkp::ResidualError est = babai_bdd_estimate(zero, fx.code, fx.reduced);
  EXPECT_TRUE(ring::is_zero(est.u));
  EXPECT_TRUE(ring::is_zero(est.v));
}

TEST(BabaiDecode, ZeroSyndromeIsFixedPoint) {
  Fixture fx = make_fixture(7, 8, 2, 96);
  std::vector<i64> qs1(7, 0);
  DecodeOutcome out = babai_decode(qs1, fx.code, fx.reduced);
  EXPECT_TRUE(out.syndrome_consistent);
  EXPECT_TRUE(ring::is_zero(out.estimate.u));
  EXPECT_TRUE(ring::is_zero(out.estimate.v));
  gkp::ResidualError zero{ring::zero_poly(7), ring::zero_poly(7)};
  EXPECT_EQ(judge(out, zero, fx.code), Verdict::Success);
}

TEST(BabaiDecode, DirectReadingUsuallyFailsTheCheck) {
  // The estimate is read off the residual blocks directly; its consistency
  // check recomputes the syndrome honestly, and for generic nonzero
  // displacements the recomputation does not come back equal.
  Fixture fx = make_fixture(7, 8, 2, 97);
  Rng rng(98);
  int fails = 0, trials = 100;
  for (int it = 0; it < trials; ++it) {
    gkp::ResidualError truth;
    truth.u = ring::sample_ternary(7, 1, 1, rng);
    truth.v = ring::sample_ternary(7, 1, 1, rng);
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    DecodeOutcome out = babai_decode(qs1, fx.code, fx.reduced);
    fails += !out.syndrome_consistent;
    Verdict v = judge(out, truth, fx.code);
    if (!out.syndrome_consistent) {
      EXPECT_EQ(v, Verdict::CheckFail);
    }
  }
  EXPECT_GT(fails, trials / 2);
}

TEST(ExactMed, MatchesBruteForceBox) {
  // No invertible h exists at n = 3, d = 1; this decoder never needs one.
  Fixture fx;
  fx.params = ntru::ternary_params(3, 8, 3, 1);
  Rng krng(99);
  fx.keys = ntru::keygen(fx.params, krng);
  fx.code = gkp::code_from_ntru(fx.keys.h, 2, fx.params);
  Rng rng(100);
  int compared = 0;
  for (int it = 0; it < 60; ++it) {
    gkp::ResidualError seed_err;
    seed_err.u = ring::sample_ternary(3, 1, 1, rng);
    seed_err.v = ring::sample_ternary(3, 1, 0, rng);
    std::vector<i64> qs1 = gkp::residual_syndrome(seed_err, fx.code);

    // Exhaustive scan of the coefficient box {-2..2}^6.
    i64 best = -1;
    gkp::ResidualError best_est;
    std::vector<i64> c(6, -2);
    while (true) {
      gkp::ResidualError cand;
      cand.u = {c[0], c[1], c[2]};
      cand.v = {c[3], c[4], c[5]};
      if (gkp::residual_syndrome(cand, fx.code) == qs1) {
        i64 nsq = estimate_norm_sq(cand);
        bool better = best < 0 || nsq < best ||
                      (nsq == best && (cand.u < best_est.u ||
                                       (cand.u == best_est.u && cand.v < best_est.v)));
        if (better) {
          best = nsq;
          best_est = cand;
        }
      }
      int k = 5;
      while (k >= 0 && c[k] == 2) c[k--] = -2;
      if (k < 0) break;
      ++c[k];
    }

    DecodeOutcome med = exact_med(qs1, fx.code);
    ASSERT_TRUE(med.syndrome_consistent);
    ASSERT_GE(best, 0);
    if (best <= 8) {
      // Any vector outside the box has a coordinate of magnitude 3 and norm
      // at least 9, so the global minimum and every tie sit inside the box.
      EXPECT_EQ(estimate_norm_sq(med.estimate), best);
      EXPECT_EQ(med.estimate.u, best_est.u);
      EXPECT_EQ(med.estimate.v, best_est.v);
      ++compared;
    } else {
      EXPECT_LE(estimate_norm_sq(med.estimate), best);
    }
  }
  EXPECT_GE(compared, 40);
}

TEST(ExactMed, NormNeverExceedsOtherConsistentEstimates) {
  Fixture fx = make_fixture(7, 8, 2, 101);
  Rng rng(102);
  for (int it = 0; it < 50; ++it) {
    gkp::ResidualError truth;
    truth.u = ring::sample_ternary(7, 2, 2, rng);
    truth.v = ring::sample_ternary(7, 2, 2, rng);
    std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
    DecodeOutcome med = exact_med(qs1, fx.code);
    EXPECT_LE(estimate_norm_sq(med.estimate), estimate_norm_sq(truth));
    DecodeOutcome nt = ntru_decode(qs1, fx.code, fx.keys, fx.params);
    if (nt.syndrome_consistent) {
      EXPECT_LE(estimate_norm_sq(med.estimate), estimate_norm_sq(nt.estimate));
    }
  }
}

TEST(ExactMed, DeterministicAcrossCalls) {
  Fixture fx = make_fixture(7, 8, 2, 103);
  Rng rng(104);
  gkp::ResidualError truth;
  truth.u = ring::sample_ternary(7, 2, 2, rng);
  truth.v = ring::sample_ternary(7, 2, 2, rng);
  std::vector<i64> qs1 = gkp::residual_syndrome(truth, fx.code);
  DecodeOutcome a = exact_med(qs1, fx.code);
  DecodeOutcome b = exact_med(qs1, fx.code);
  EXPECT_EQ(a.estimate.u, b.estimate.u);
  EXPECT_EQ(a.estimate.v, b.estimate.v);
}

TEST(MedLabel, TrivialOnZeroSyndrome) {
  Fixture fx = make_fixture(7, 8, 2, 105);
  std::vector<i64> qs1(7, 0);
  EXPECT_TRUE(gkp::is_trivial_coset(med_label(qs1, fx.code)));
}

TEST(MedLabel, WellFormed) {
  Fixture fx = make_fixture(7, 8, 2, 106);
  Rng rng(107);
  for (int it = 0; it < 20; ++it) {
    gkp::ResidualError truth;
    truth.u = ring::sample_ternary(7, 2, 2, rng);
    truth.v = ring::sample_ternary(7, 2, 2, rng);
    std::vector<i64> label = med_label(gkp::residual_syndrome(truth, fx.code), fx.code);
    ASSERT_EQ(label.size(), 14u);
    for (i64 b : label) EXPECT_TRUE(b == 0 || b == 1);
  }
}

TEST(Judge, FlagsOffLatticeDisagreement) {
  Fixture fx = make_fixture(7, 8, 2, 108);
  // Fabricate an outcome marked consistent whose estimate differs from the
  // truth by a non-lattice displacement.
  DecodeOutcome out;
  out.method = Method::ExactMed;
  out.estimate = {ring::zero_poly(7), ring::zero_poly(7)};
  out.syndrome_consistent = true;
  gkp::ResidualError truth{ring::zero_poly(7), ring::zero_poly(7)};
  truth.v[0] = 1;  // (0, e_0) is not in the dual lattice
  EXPECT_THROW(judge(out, truth, fx.code), InternalInconsistency);
}

TEST(Judge, LogicalErrorOnNontrivialShift) {
  Fixture fx = make_fixture(7, 8, 2, 109);
  // Shift the truth by one basis row: same syndrome, nontrivial coset.
  gkp::ResidualError est{ring::zero_poly(7), ring::zero_poly(7)};
  gkp::ResidualError truth = est;
  for (int i = 0; i < 7; ++i) {
    truth.u[i] += fx.code.basis.at(0, i);
    truth.v[i] += fx.code.basis.at(0, 7 + i);
  }
  DecodeOutcome out;
  out.method = Method::ExactMed;
  out.estimate = est;
  out.syndrome_consistent = true;
  EXPECT_EQ(judge(out, truth, fx.code), Verdict::LogicalError);

  // A shift by twice a row is a trivial coset: success.
  gkp::ResidualError truth2 = est;
  for (int i = 0; i < 7; ++i) {
    truth2.u[i] += 2 * fx.code.basis.at(1, i);
    truth2.v[i] += 2 * fx.code.basis.at(1, 7 + i);
  }
  EXPECT_EQ(judge(out, truth2, fx.code), Verdict::Success);
}
