#pragma once

#include <optional>
#include <string>
#include <utility>

#include "ntrugkp/common.hpp"
#include "ntrugkp/ring.hpp"
#include "ntrugkp/rng.hpp"

namespace ntrugkp::ntru {

// Key distribution families. Ternary keys live over x^n - 1 with the
// f = 1 + p*ftilde, g = p*gtilde shape; Gaussian keys live over x^n + 1
// (n a power of two) with plain discrete-Gaussian f, g of variance q.
enum class KeyFamily { TernaryXnMinus1, GaussianXnPlus1 };

std::string family_name(KeyFamily fam);
std::optional<KeyFamily> family_from_name(const std::string& name);

struct NtruParams {
  ring::RingParams ring;
  i64 q = 8;   // power of two
  i64 p = 3;   // odd prime, coprime to q
  int d = 0;   // ternary weight parameter (ignored by the Gaussian family)
  bool require_h_invertible = false;
  KeyFamily family = KeyFamily::TernaryXnMinus1;
};

// d <= 0 selects the floor(n/3) default weight.
NtruParams ternary_params(int n, i64 q, i64 p, int d = -1, bool require_h_invertible = false);
NtruParams gaussian_params(int n, i64 q);

// Throws InvalidConfig on any violated constraint.
void validate(const NtruParams& params);

inline constexpr int kMaxResample = 1000;

struct MaxResampleExceeded : Error {
  explicit MaxResampleExceeded(const std::string& msg)
      : Error("resample cap exceeded: " + msg) {}
};
struct CompletionInfeasible : Error {
  explicit CompletionInfeasible(const std::string& msg)
      : Error("secret basis completion infeasible: " + msg) {}
};
struct HNotInvertible : Error {
  explicit HNotInvertible(const std::string& msg) : Error("h not invertible: " + msg) {}
};

struct NtruKeyMaterial {
  ring::Poly f;
  ring::Poly g;
  ring::Poly f_inv_q;  // f^-1 mod q, centered
  ring::Poly h;        // g * f^-1 mod q, centered
  std::optional<ring::Poly> h_inv_q;        // present when require_h_invertible
  std::optional<ring::Poly> F;              // completion: f*G - g*F = q
  std::optional<ring::Poly> G;
};

// Samples f (resampled until invertible mod q), then g, then h = g*f^-1.
// With require_h_invertible, g is drawn with weights (d+1, d) and resampled
// until h is a unit mod q. Each loop gives up after kMaxResample tries.
NtruKeyMaterial keygen(const NtruParams& params, Rng& rng);

// c = h*r + m mod q, centered.
ring::Poly encrypt(const ring::Poly& h, const ring::Poly& m, const ring::Poly& r,
                   const NtruParams& params);

// a = f*c mod q centered, then a mod p centered. Correct exactly when
// decryption_valid(m, r) holds for the encrypted pair. Ternary family only.
ring::Poly decrypt(const ring::Poly& c, const NtruKeyMaterial& keys, const NtruParams& params);

// True iff every coefficient of g*r + f*m lies in the centered range mod q,
// i.e. the mod-q wrap in decrypt is vacuous.
bool decryption_valid(const ring::Poly& m, const ring::Poly& r,
                      const NtruKeyMaterial& keys, const NtruParams& params);

// H = [[I, A(h)], [0, qI]] with A the anticirculant map; det q^n, q-symplectic.
IntMat public_basis(const ring::Poly& h, const NtruParams& params);

// H^J = [[qI, 0], [-A(h), I]]; generates {(q*a - A(h)b, b)}.
IntMat flipped_public_basis(const ring::Poly& h, const NtruParams& params);

// Solves f*G - g*F = q over Z[x]/(x^n - 1) by an exact integer column-echelon
// reduction, then size-reduces (F, G) against the rotations of (g, f) with an
// exact rational Babai pass. Fills keys.F, keys.G. Ternary family only.
void complete_secret_basis(NtruKeyMaterial& keys, const NtruParams& params);

// B' = [[C(f)S, C(g)], [S C(F) S, S C(G)]] with S the coefficient-mirror
// permutation; q-symplectic and generates the same lattice as public_basis.
IntMat secret_basis(const NtruKeyMaterial& keys, const NtruParams& params);

struct BddRadius {
  double radius;  // half the minimal Gram-Schmidt norm, the guarantee actually used
  double bound;   // closed-form lower (secret) or heuristic (public) reference value
};
BddRadius bdd_radius_secret(const IntMat& secret, const NtruKeyMaterial& keys,
                            const NtruParams& params);
BddRadius bdd_radius_public(const IntMat& pub, const NtruParams& params, double delta,
                            double lambda1);

void save_key_file(const std::string& path, const NtruKeyMaterial& keys,
                   const NtruParams& params);
std::pair<NtruKeyMaterial, NtruParams> load_key_file(const std::string& path);

}  // namespace ntrugkp::ntru
