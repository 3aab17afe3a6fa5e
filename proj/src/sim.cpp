#include "ntrugkp/sim.hpp"

#include <atomic>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <thread>

#include "ntrugkp/lattice.hpp"

namespace ntrugkp::sim {

namespace {

constexpr uint64_t kTagSvp = 0x5356502d53544154ULL;
constexpr uint64_t kTagMc = 0x4d432d545249414cULL;
constexpr uint64_t kTagBest = 0x424553542d4f4620ULL;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Fixed-size worker pool over an indexed job list; each job writes only its
// own slot, so the output is independent of scheduling.
template <typename Fn>
void run_jobs(int njobs, int threads, Fn&& job) {
  if (threads <= 1 || njobs <= 1) {
    for (int i = 0; i < njobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    while (!failed.load()) {
      int i = next.fetch_add(1);
      if (i >= njobs) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  int count = std::min(threads, njobs);
  std::vector<std::thread> pool;
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

std::string family_name(Family fam) {
  switch (fam) {
    case Family::RandomCyclic: return "RandomCyclic";
    case Family::NtruTernary: return "NtruTernary";
    case Family::NtruHInvertible: return "NtruHInvertible";
    case Family::NtruGaussianXnPlus1: return "NtruGaussianXnPlus1";
  }
  return "?";
}

std::optional<Family> family_from_name(const std::string& name) {
  if (name == "RandomCyclic") return Family::RandomCyclic;
  if (name == "NtruTernary") return Family::NtruTernary;
  if (name == "NtruHInvertible") return Family::NtruHInvertible;
  if (name == "NtruGaussianXnPlus1") return Family::NtruGaussianXnPlus1;
  return std::nullopt;
}

double reference_curve(int n, i64 q, double sigma) {
  double arg = std::sqrt(M_PI / (double)q) / (2.0 * std::sqrt(2.0) * sigma);
  return 1.0 - std::pow(std::erf(arg), 2 * n);
}

std::vector<double> residual_pmf(i64 lambda, i64 q, double sigma, int window) {
  double s = sigma / std::sqrt(2.0 * M_PI) * std::sqrt((double)lambda * q);
  if (window < 6.0 * s) throw InvalidConfig("residual_pmf window below six deviations");
  std::vector<double> pmf(2 * window + 1);
  for (int k = -window; k <= window; ++k) {
    double hi = ((double)k + 0.5) / (s * std::sqrt(2.0));
    double lo = ((double)k - 0.5) / (s * std::sqrt(2.0));
    pmf[k + window] = 0.5 * (std::erf(hi) - std::erf(lo));
  }
  return pmf;
}

std::vector<double> sample_displacement(double sigma, int n, Rng& rng) {
  double sigma_bar = sigma / std::sqrt(2.0 * M_PI);
  std::vector<double> e(2 * n);
  for (double& x : e) x = rng.normal(sigma_bar);
  return e;
}

std::vector<double> default_sigma_grid() {
  const double lo = 0.05, hi = 0.6;
  std::vector<double> grid(12);
  for (int i = 0; i < 12; ++i) grid[i] = lo * std::pow(hi / lo, (double)i / 11.0);
  return grid;
}

int resolve_threads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("NTRUGKP_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

namespace {

IntMat sample_family_basis(Family fam, int n, i64 q, i64 p, int d, Rng& rng) {
  if (fam == Family::RandomCyclic) {
    ntru::NtruParams params;
    params.ring = {n, ring::Quotient::XnMinus1};
    params.q = q;
    params.p = p;
    params.d = std::max(1, d);
    ring::Poly h(n);
    for (i64& c : h) c = ring::centered((i64)rng.bounded((uint64_t)q), q);
    return ntru::public_basis(h, params);
  }
  ntru::NtruParams params;
  switch (fam) {
    case Family::NtruTernary:
      params = ntru::ternary_params(n, q, 3, d, false);
      params.p = p;
      break;
    case Family::NtruHInvertible:
      params = ntru::ternary_params(n, q, 3, d, true);
      params.p = p;
      break;
    case Family::NtruGaussianXnPlus1:
      params = ntru::gaussian_params(n, q);
      break;
    default:
      throw InvalidConfig("unhandled family");
  }
  ntru::validate(params);
  ntru::NtruKeyMaterial keys = ntru::keygen(params, rng);
  return ntru::public_basis(keys.h, params);
}

}  // namespace

std::vector<SvpRow> run_svp_stats(const SvpConfig& cfg, int threads) {
  struct Job {
    int n;
    i64 q;
    int d;
    int sample;
  };
  std::vector<Job> jobs;
  for (const auto& [n, q] : cfg.rows) {
    int d = cfg.d > 0 ? cfg.d : n / 3;
    for (int s = 0; s < cfg.samples; ++s) jobs.push_back({n, q, d, s});
  }
  std::vector<SvpRow> rows(jobs.size());
  run_jobs((int)jobs.size(), threads, [&](int i) {
    const Job& job = jobs[i];
    uint64_t seed = derive_seed(cfg.master_seed,
                                {kTagSvp, (uint64_t)cfg.family, (uint64_t)job.n,
                                 (uint64_t)job.q, (uint64_t)job.sample});
    Rng rng(seed);
    IntMat basis = sample_family_basis(cfg.family, job.n, job.q, cfg.p, job.d, rng);
    lattice::EnumResult svp = lattice::svp_enumerate(basis);
    rows[i] = {cfg.family, job.n, job.q, cfg.p, job.d, job.sample, svp.norm_sq, seed};
  });
  return rows;
}

void write_svp_csv(std::ostream& out, const SvpConfig& cfg, const std::vector<SvpRow>& rows) {
  out << "# svp-stats family=" << family_name(cfg.family) << " samples=" << cfg.samples
      << " p=" << cfg.p << " d=" << (cfg.d > 0 ? std::to_string(cfg.d) : std::string("auto"))
      << " master_seed=" << cfg.master_seed << "\n";
  out << "# ref_gauss = sqrt(n*q/(pi*e)); ref_cor3 = sqrt(0.28*n)\n";
  out << "family,n,q,p,d,sample,lambda1_sq,seed,ref_gauss,ref_cor3\n";
  for (const auto& r : rows) {
    double ref_gauss = std::sqrt((double)r.n * (double)r.q / (M_PI * std::exp(1.0)));
    double ref_cor3 = std::sqrt(0.28 * (double)r.n);
    out << family_name(r.family) << "," << r.n << "," << r.q << "," << r.p << "," << r.d << ","
        << r.sample << "," << r.lambda1_sq << "," << r.seed << "," << fmt_double(ref_gauss)
        << "," << fmt_double(ref_cor3) << "\n";
  }
}

std::vector<McRow> run_decoder_mc(const gkp::GkpCode& code, const ntru::NtruKeyMaterial& keys,
                                  const ntru::NtruParams& params, const McConfig& cfg,
                                  int threads) {
  if (cfg.sigma_grid.empty() || cfg.decoders.empty() || cfg.trials <= 0)
    throw InvalidConfig("decoder MC needs sigmas, decoders and trials");
  for (decode::Method m : cfg.decoders)
    if (m == decode::Method::NtruDecode && !keys.h_inv_q)
      throw ntru::HNotInvertible("decoder MC with the ntru decoder needs h^-1");

  IntMat reduced = decode::reduced_flipped_basis(code, true);
  const int ndec = (int)cfg.decoders.size();
  const int nsig = (int)cfg.sigma_grid.size();

  struct Tally {
    i64 check_fail = 0;
    i64 logical_err = 0;
  };
  std::vector<std::vector<Tally>> tallies(nsig, std::vector<Tally>(ndec));

  run_jobs(nsig, threads, [&](int si) {
    double sigma = cfg.sigma_grid[si];
    for (int trial = 0; trial < cfg.trials; ++trial) {
      uint64_t seed = derive_seed(cfg.master_seed, {kTagMc, (uint64_t)si, (uint64_t)trial});
      Rng rng(seed);
      std::vector<double> e = sample_displacement(sigma, code.n, rng);
      gkp::TrivialCorrection tc = gkp::trivial_syndrome_and_correct(e, code);
      std::vector<i64> qs1 = gkp::residual_syndrome(tc.residual, code);
      for (int di = 0; di < ndec; ++di) {
        decode::DecodeOutcome outcome;
        switch (cfg.decoders[di]) {
          case decode::Method::NtruDecode:
            outcome = decode::ntru_decode(qs1, code, keys, params);
            break;
          case decode::Method::BabaiDecode:
            outcome = decode::babai_decode(qs1, code, reduced);
            break;
          case decode::Method::ExactMed:
            outcome = decode::exact_med(qs1, code);
            break;
        }
        decode::Verdict v = decode::judge(outcome, tc.residual, code);
        if (v == decode::Verdict::CheckFail) ++tallies[si][di].check_fail;
        if (v == decode::Verdict::LogicalError) ++tallies[si][di].logical_err;
      }
    }
  });

  std::vector<McRow> rows;
  for (int si = 0; si < nsig; ++si) {
    for (int di = 0; di < ndec; ++di) {
      const Tally& t = tallies[si][di];
      McRow row;
      row.n = code.n;
      row.q = code.q;
      row.p = params.p;
      row.lambda = code.lambda;
      row.sigma = cfg.sigma_grid[si];
      row.decoder = cfg.decoders[di];
      row.trials = cfg.trials;
      row.check_fail = t.check_fail;
      row.logical_err = t.logical_err;
      row.p_check = (double)t.check_fail / (double)cfg.trials;
      i64 denom = cfg.trials - t.check_fail;
      row.p_err = denom > 0 ? (double)t.logical_err / (double)denom : 0.0;
      row.stderr_err = denom > 0 ? std::sqrt(row.p_err * (1.0 - row.p_err) / (double)denom) : 0.0;
      row.seed = cfg.master_seed;
      row.p_ref = reference_curve(code.n, code.q, cfg.sigma_grid[si]);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_mc_csv(std::ostream& out, const McConfig& cfg, const gkp::GkpCode& code,
                  const std::vector<McRow>& rows) {
  out << "# decoder-mc n=" << code.n << " q=" << code.q << " lambda=" << code.lambda
      << " lambda1_sq=" << code.lambda1_sq << " trials=" << cfg.trials
      << " master_seed=" << cfg.master_seed << "\n";
  out << "# decoders=";
  for (size_t i = 0; i < cfg.decoders.size(); ++i)
    out << (i ? "+" : "") << decode::method_name(cfg.decoders[i]);
  out << " sigma_grid=";
  for (size_t i = 0; i < cfg.sigma_grid.size(); ++i)
    out << (i ? "+" : "") << fmt_double(cfg.sigma_grid[i]);
  out << "\n";
  out << "# p_err is conditional on passing the consistency check; p_ref is the "
         "closed-form nonzero-residual curve\n";
  out << "n,q,p,lambda,sigma,decoder,trials,check_fail,logical_err,p_check,p_err,stderr_err,"
         "seed,p_ref\n";
  for (const auto& r : rows) {
    out << r.n << "," << r.q << "," << r.p << "," << r.lambda << "," << fmt_double(r.sigma)
        << "," << decode::method_name(r.decoder) << "," << r.trials << "," << r.check_fail
        << "," << r.logical_err << "," << fmt_double(r.p_check) << "," << fmt_double(r.p_err)
        << "," << fmt_double(r.stderr_err) << "," << r.seed << "," << fmt_double(r.p_ref)
        << "\n";
  }
}

BestOf best_of_keys(const ntru::NtruParams& params, int count, uint64_t master_seed) {
  if (count < 1) throw InvalidConfig("best_of_keys needs count >= 1");
  BestOf best;
  best.lambda1_sq = -1;
  for (int s = 0; s < count; ++s) {
    uint64_t seed = derive_seed(master_seed, {kTagBest, (uint64_t)s});
    Rng rng(seed);
    ntru::NtruKeyMaterial keys = ntru::keygen(params, rng);
    IntMat basis = ntru::public_basis(keys.h, params);
    i64 l1 = lattice::svp_enumerate(basis).norm_sq;
    if (l1 > best.lambda1_sq) {
      best.keys = std::move(keys);
      best.sample = s;
      best.seed = seed;
      best.lambda1_sq = l1;
    }
  }
  return best;
}

}  // namespace ntrugkp::sim
