#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "ntrugkp/decode.hpp"
#include "ntrugkp/gkp.hpp"
#include "ntrugkp/ntru.hpp"
#include "ntrugkp/rng.hpp"

namespace ntrugkp::sim {

enum class Family { RandomCyclic, NtruTernary, NtruHInvertible, NtruGaussianXnPlus1 };

std::string family_name(Family fam);
std::optional<Family> family_from_name(const std::string& name);

// Probability that any of the 2n rounded coordinates of the trivial
// correction is nonzero at channel parameter sigma:
// 1 - erf(sqrt(pi/q) / (2*sqrt(2)*sigma))^(2n).
double reference_curve(int n, i64 q, double sigma);

// Per-coordinate distribution of the rounded integer residual over
// {-window..window}; requires window >= 6 * sigma/sqrt(2pi) * sqrt(lambda*q).
std::vector<double> residual_pmf(i64 lambda, i64 q, double sigma, int window);

// 2n iid physical coordinates of deviation sigma/sqrt(2pi) each.
std::vector<double> sample_displacement(double sigma, int n, Rng& rng);

// 12 log-spaced points covering [0.05, 0.6].
std::vector<double> default_sigma_grid();

// --threads flag wins, then the NTRUGKP_THREADS environment variable, then 1.
int resolve_threads(int flag_value);

struct SvpConfig {
  Family family = Family::NtruTernary;
  std::vector<std::pair<int, i64>> rows;  // (n, q)
  i64 p = 3;
  int d = -1;  // <= 0 selects floor(n/3)
  int samples = 100;
  uint64_t master_seed = 1;
};

struct SvpRow {
  Family family;
  int n;
  i64 q;
  i64 p;
  int d;
  int sample;
  i64 lambda1_sq;
  uint64_t seed;  // the per-sample derived seed, for exact replay
};

// One exact SVP per sample; per-sample seeds derive from the master seed and
// the row coordinates, so results are independent of the thread count.
std::vector<SvpRow> run_svp_stats(const SvpConfig& cfg, int threads);
void write_svp_csv(std::ostream& out, const SvpConfig& cfg, const std::vector<SvpRow>& rows);

struct McConfig {
  std::vector<double> sigma_grid;
  std::vector<decode::Method> decoders;
  int trials = 100000;
  uint64_t master_seed = 1;
};

struct McRow {
  int n;
  i64 q;
  i64 p;
  i64 lambda;
  double sigma;
  decode::Method decoder;
  i64 trials;
  i64 check_fail;
  i64 logical_err;
  double p_check;
  double p_err;       // conditional on passing the consistency check
  double stderr_err;
  uint64_t seed;      // the master seed of the run
  double p_ref;       // reference_curve at this sigma
};

// All decoders see the same displacement in every trial. Tallies are plain
// counts aggregated per sigma point, so any thread count produces identical
// rows.
std::vector<McRow> run_decoder_mc(const gkp::GkpCode& code, const ntru::NtruKeyMaterial& keys,
                                  const ntru::NtruParams& params, const McConfig& cfg,
                                  int threads);
void write_mc_csv(std::ostream& out, const McConfig& cfg, const gkp::GkpCode& code,
                  const std::vector<McRow>& rows);

struct BestOf {
  ntru::NtruKeyMaterial keys;
  int sample = 0;
  uint64_t seed = 0;  // seed that regenerates the chosen key
  i64 lambda1_sq = 0;
};

// Draws `count` keys and keeps the one whose public lattice has the longest
// shortest vector (first winner on ties).
BestOf best_of_keys(const ntru::NtruParams& params, int count, uint64_t master_seed);

}  // namespace ntrugkp::sim
