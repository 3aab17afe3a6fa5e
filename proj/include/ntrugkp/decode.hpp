#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ntrugkp/common.hpp"
#include "ntrugkp/gkp.hpp"
#include "ntrugkp/ntru.hpp"

namespace ntrugkp::decode {

enum class Method { NtruDecode, BabaiDecode, ExactMed };

std::string method_name(Method m);
std::optional<Method> method_from_name(const std::string& name);

enum class Verdict { Success, LogicalError, CheckFail };

// A consistent outcome whose estimate error leaves the lattice: the decoders
// cannot produce this state, so reaching it means broken wiring.
struct InternalInconsistency : Error {
  explicit InternalInconsistency(const std::string& msg)
      : Error("internal inconsistency: " + msg) {}
};

struct DecodeOutcome {
  gkp::ResidualError estimate;
  bool syndrome_consistent = false;  // recomputed from the estimate, never assumed
  Method method = Method::NtruDecode;
};

// Decrypts the syndrome as an NTRU ciphertext: v from the mod-p reduction of
// f*qs1 mod q, u from the ciphertext identity via h^-1. Exact whenever the
// residual pair lies in the decryption window. Requires keys.h_inv_q.
DecodeOutcome ntru_decode(const std::vector<i64>& qs1, const gkp::GkpCode& code,
                          const ntru::NtruKeyMaterial& keys, const ntru::NtruParams& params);

// Reduced copy of the flipped public basis; reduce once, decode many times.
IntMat reduced_flipped_basis(const gkp::GkpCode& code, bool hkz = true);

// Nearest-plane against the reduced flipped basis with the residual applied
// directly: estimate (u, v) = t - w for t = (qs1, 0). The block-swapped
// reading of the same residual always satisfies the syndrome congruence, so
// this direct reading reports inconsistency whenever rounding left anything
// behind; its check-fail rate tracks the probability of a nonzero residual.
DecodeOutcome babai_decode(const std::vector<i64>& qs1, const gkp::GkpCode& code,
                           const IntMat& reduced_flipped);

// The same nearest-plane residual read through the block swap
// (u, v) = (-y2, y1); exact whenever the true residual is shorter than half
// the minimal Gram-Schmidt norm of the reduced basis.
gkp::ResidualError babai_bdd_estimate(const std::vector<i64>& qs1, const gkp::GkpCode& code,
                                      const IntMat& reduced_flipped);

// Minimum-energy decoder: exact CVP on the flipped basis; among tied minima
// the lexicographically smallest (u, v) wins. Always syndrome-consistent.
DecodeOutcome exact_med(const std::vector<i64>& qs1, const gkp::GkpCode& code);

// Logical label of the minimum-energy residual relative to the canonical
// representative (0, qs1); comparable with mld_decode labels. Among tied
// minima the lexicographically smallest label wins (matching mld_decode's
// tie rule, which exact_med's smallest-vector rule does not induce).
std::vector<i64> med_label(const std::vector<i64>& qs1, const gkp::GkpCode& code);

// CheckFail on an inconsistent outcome; otherwise Success exactly when the
// estimate differs from the truth by a logically trivial lattice vector.
Verdict judge(const DecodeOutcome& outcome, const gkp::ResidualError& truth,
              const gkp::GkpCode& code);

}  // namespace ntrugkp::decode
