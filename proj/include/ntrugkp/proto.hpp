#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ntrugkp/decode.hpp"
#include "ntrugkp/gkp.hpp"
#include "ntrugkp/ntru.hpp"
#include "ntrugkp/ring.hpp"
#include "ntrugkp/rng.hpp"

namespace ntrugkp::proto {

// Alice's long-lived key and code; many message rounds share one session.
struct Session {
  gkp::GkpCode code;
  ntru::NtruKeyMaterial keys;
  ntru::NtruParams params;
  IntMat reduced_flipped;  // for the nearest-plane receive path
};

Session make_session(const ntru::NtruParams& params, i64 lambda, Rng& rng);

// Ternary (m, r) with |(r, m)| strictly inside half the code distance, the
// ball where the minimum-energy receive path is provably exact: weight w is
// uniform on {0..floor((lambda1_sq-1)/4)}, then w distinct positions, then
// signs.
std::pair<ring::Poly, ring::Poly> sample_message_pair(const gkp::GkpCode& code, Rng& rng);

// e0 = (-mirror(r), m) / sqrt(lambda*q).
std::vector<double> bob_encode(const ring::Poly& m, const ring::Poly& r,
                               const gkp::GkpCode& code);

// Adds iid Gaussian displacement of deviation sigma/sqrt(2pi) per coordinate.
std::vector<double> transmit(const std::vector<double>& e0, double sigma, Rng& rng);

enum class Status { Recovered, CheckFail, LogicalCorrupted };
std::string status_name(Status s);

struct ReceiveResult {
  ring::Poly m_hat;
  ring::Poly r_hat;
  std::vector<i64> frame;  // logical frame of the applied correction, mod lambda
  bool consistent = false;
  Status status = Status::Recovered;
  decode::Method used = decode::Method::ExactMed;
};

// Trivial correction, then the chosen decoder on the residual syndrome;
// m from the second block, r from the mirrored negated first block. The
// status is judged against `truth` when given (simulation mode); without
// truth a consistent receive reports Recovered.
ReceiveResult alice_receive(const std::vector<double>& e, const Session& session,
                            const gkp::ResidualError* truth = nullptr,
                            decode::Method method = decode::Method::ExactMed);

// What the channel shows without the secret key: the syndrome is exactly the
// NTRU ciphertext, and the best keyless correction leaves a logical frame
// that still depends on r.
struct EveView {
  ring::Poly c;  // equals encrypt(h, m, r) for an honest noiseless encode
  std::vector<double> residual_after_generic;
  std::vector<i64> phase_labels;  // equals r mod lambda for honest noiseless encodes
};
EveView eavesdropper_view(const std::vector<double>& e, const gkp::GkpCode& code);

}  // namespace ntrugkp::proto
