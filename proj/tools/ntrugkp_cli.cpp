#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ntrugkp/decode.hpp"
#include "ntrugkp/gkp.hpp"
#include "ntrugkp/lattice.hpp"
#include "ntrugkp/ntru.hpp"
#include "ntrugkp/proto.hpp"
#include "ntrugkp/ring.hpp"
#include "ntrugkp/rng.hpp"
#include "ntrugkp/sim.hpp"

using namespace ntrugkp;

namespace {

constexpr uint64_t kTagProtoSession = 0x50524f544f434f4cULL;

uint64_t resolve_seed(std::optional<uint64_t> given) {
  if (given) return *given;
  std::random_device rd;
  uint64_t seed = ((uint64_t)rd() << 32) ^ rd();
  if (seed == 0) seed = 0x9e3779b97f4a7c15ULL;
  std::cout << "# seed was not given; generated seed=" << seed << "\n";
  return seed;
}

std::vector<double> parse_sigma_grid(const std::string& text) {
  if (text == "default") return sim::default_sigma_grid();
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size() || v <= 0) throw InvalidConfig("bad sigma value: " + tok);
    grid.push_back(v);
  }
  if (grid.empty()) throw InvalidConfig("empty sigma grid");
  return grid;
}

std::vector<decode::Method> parse_decoders(const std::vector<std::string>& names) {
  std::vector<decode::Method> out;
  for (const auto& name : names) {
    auto m = decode::method_from_name(name);
    if (!m) throw InvalidConfig("unknown decoder: " + name + " (use ntru|babai|med)");
    out.push_back(*m);
  }
  if (out.empty()) throw InvalidConfig("no decoders selected");
  return out;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
  if (path.empty()) return std::cout;
  file.open(path);
  if (!file) throw Error("cannot open output file: " + path);
  return file;
}

struct KeygenOpts {
  int n = 7;
  i64 q = 8;
  i64 p = 3;
  int d = -1;
  std::string family = "NtruTernary";
  bool require_h_invertible = false;
  bool skip_completion = false;
  std::optional<uint64_t> seed;
  std::string out;
};

int cmd_keygen(const KeygenOpts& o) {
  ntru::NtruParams params;
  if (o.family == "NtruTernary" || o.family == "NtruHInvertible") {
    params = ntru::ternary_params(o.n, o.q, o.p, o.d,
                                  o.require_h_invertible || o.family == "NtruHInvertible");
  } else if (o.family == "NtruGaussianXnPlus1") {
    params = ntru::gaussian_params(o.n, o.q);
    params.require_h_invertible = o.require_h_invertible;
  } else {
    throw InvalidConfig("unknown key family: " + o.family);
  }
  uint64_t seed = resolve_seed(o.seed);
  std::cout << "# config: keygen n=" << params.ring.n << " q=" << params.q << " p=" << params.p
            << " d=" << params.d << " family=" << ntru::family_name(params.family)
            << " require_h_invertible=" << params.require_h_invertible << " seed=" << seed
            << " out=" << o.out << "\n";

  Rng rng(seed);
  ntru::NtruKeyMaterial keys = ntru::keygen(params, rng);
  if (params.family == ntru::KeyFamily::TernaryXnMinus1 && !o.skip_completion)
    ntru::complete_secret_basis(keys, params);
  ntru::save_key_file(o.out, keys, params);

  i64 fg = lattice::norm_sq(keys.f) + lattice::norm_sq(keys.g);
  std::cout << "planted_norm_sq=" << fg << " (|f|^2 + |g|^2)\n";
  std::cout << "h_invertible=" << (keys.h_inv_q ? "yes" : "no") << "\n";
  if (keys.F && keys.G)
    std::cout << "completion_norm_sq=" << (lattice::norm_sq(*keys.F) + lattice::norm_sq(*keys.G))
              << " (|F|^2 + |G|^2)\n";
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

struct SvpOpts {
  std::string family = "NtruTernary";
  std::vector<int> n_list;
  std::vector<i64> q_list;
  i64 p = 3;
  int d = -1;
  int samples = 100;
  std::optional<uint64_t> seed;
  int threads = 0;
  std::string out;
};

int cmd_svp_stats(const SvpOpts& o) {
  auto fam = sim::family_from_name(o.family);
  if (!fam) throw InvalidConfig("unknown family: " + o.family);
  if (o.n_list.empty()) throw InvalidConfig("svp-stats needs at least one --n");
  std::vector<i64> qs = o.q_list;
  if (qs.empty()) qs.assign(o.n_list.size(), 8);
  if (qs.size() == 1) qs.assign(o.n_list.size(), qs[0]);
  if (qs.size() != o.n_list.size())
    throw InvalidConfig("--q must be given once or once per --n");

  sim::SvpConfig cfg;
  cfg.family = *fam;
  for (size_t i = 0; i < o.n_list.size(); ++i) cfg.rows.push_back({o.n_list[i], qs[i]});
  cfg.p = o.p;
  cfg.d = o.d;
  cfg.samples = o.samples;
  cfg.master_seed = resolve_seed(o.seed);
  int threads = sim::resolve_threads(o.threads);

  std::cout << "# config: svp-stats family=" << o.family << " samples=" << o.samples
            << " p=" << o.p << " d=" << o.d << " seed=" << cfg.master_seed
            << " threads=" << threads << "\n";
  auto rows = sim::run_svp_stats(cfg, threads);
  std::ofstream file;
  sim::write_svp_csv(open_out(file, o.out), cfg, rows);
  return 0;
}

struct SimulateOpts {
  int n = 7;
  i64 q = 8;
  i64 p = 3;
  int d = -1;
  i64 lambda = 2;
  std::vector<std::string> decoders = {"ntru", "babai"};
  std::string sigma_grid = "default";
  int trials = 100000;
  int best_of = 1;
  std::string key_file;
  std::optional<uint64_t> seed;
  int threads = 0;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
  sim::McConfig cfg;
  cfg.sigma_grid = parse_sigma_grid(o.sigma_grid);
  cfg.decoders = parse_decoders(o.decoders);
  cfg.trials = o.trials;
  cfg.master_seed = resolve_seed(o.seed);
  int threads = sim::resolve_threads(o.threads);

  bool needs_hinv = false;
  for (auto m : cfg.decoders) needs_hinv |= (m == decode::Method::NtruDecode);

  ntru::NtruParams params;
  ntru::NtruKeyMaterial keys;
  if (!o.key_file.empty()) {
    std::tie(keys, params) = ntru::load_key_file(o.key_file);
    if (needs_hinv && !keys.h_inv_q)
      throw InvalidConfig("key file has no h_inv but the ntru decoder was requested");
  } else {
    params = ntru::ternary_params(o.n, o.q, o.p, o.d, needs_hinv);
    sim::BestOf best = sim::best_of_keys(params, o.best_of, cfg.master_seed);
    keys = std::move(best.keys);
    std::cout << "# selected key sample=" << best.sample << " of " << o.best_of
              << " lambda1_sq=" << best.lambda1_sq << " key_seed=" << best.seed << "\n";
  }
  gkp::GkpCode code = gkp::code_from_ntru(keys.h, o.lambda, params);

  std::cout << "# config: simulate n=" << params.ring.n << " q=" << params.q
            << " p=" << params.p << " d=" << params.d << " lambda=" << o.lambda
            << " trials=" << o.trials << " seed=" << cfg.master_seed << " threads=" << threads
            << " lambda1_sq=" << code.lambda1_sq << "\n";

  auto rows = sim::run_decoder_mc(code, keys, params, cfg, threads);
  std::ofstream file;
  sim::write_mc_csv(open_out(file, o.out), cfg, code, rows);
  return 0;
}

struct ProtoOpts {
  int n = 11;
  i64 q = 8;
  i64 p = 3;
  int d = -1;
  i64 lambda = 2;
  int sessions = 1000;
  double sigma = 0.0;
  std::string decoder = "med";
  std::optional<uint64_t> seed;
  std::string out;
};

int cmd_protocol_demo(const ProtoOpts& o) {
  auto method = decode::method_from_name(o.decoder);
  if (!method) throw InvalidConfig("unknown decoder: " + o.decoder);
  uint64_t seed = resolve_seed(o.seed);
  ntru::NtruParams params = ntru::ternary_params(o.n, o.q, o.p, o.d, true);

  std::cout << "# config: protocol-demo n=" << params.ring.n << " q=" << params.q
            << " p=" << params.p << " d=" << params.d << " lambda=" << o.lambda
            << " sessions=" << o.sessions << " sigma=" << o.sigma << " decoder=" << o.decoder
            << " seed=" << seed << "\n";

  Rng krng(derive_seed(seed, {kTagProtoSession, 0}));
  proto::Session session = proto::make_session(params, o.lambda, krng);
  std::cout << "# code lambda1_sq=" << session.code.lambda1_sq
            << " message_ball_weight_max=" << (session.code.lambda1_sq - 1) / 4 << "\n";

  std::ofstream file;
  std::ostream* csv = nullptr;
  if (!o.out.empty()) {
    csv = &open_out(file, o.out);
    *csv << "# protocol-demo sessions=" << o.sessions << " sigma=" << o.sigma
         << " decoder=" << o.decoder << " seed=" << seed << "\n";
    *csv << "session,sigma,consistent,status,msg_exact,eve_c_match\n";
  }

  int recovered = 0, check_fail = 0, corrupted = 0, msg_exact = 0, eve_match = 0;
  for (int s = 0; s < o.sessions; ++s) {
    Rng rng(derive_seed(seed, {kTagProtoSession, 1, (uint64_t)s}));
    auto [m, r] = proto::sample_message_pair(session.code, rng);
    std::vector<double> e0 = proto::bob_encode(m, r, session.code);
    std::vector<double> e = o.sigma > 0 ? proto::transmit(e0, o.sigma, rng) : e0;

    gkp::TrivialCorrection tc = gkp::trivial_syndrome_and_correct(e, session.code);
    proto::ReceiveResult rr = proto::alice_receive(e, session, &tc.residual, *method);
    proto::EveView eve = proto::eavesdropper_view(e, session.code);
    ring::Poly c_ref = ntru::encrypt(session.keys.h, m, r, params);

    bool exact = rr.m_hat == m && rr.r_hat == r;
    bool eve_ok = eve.c == c_ref;
    recovered += rr.status == proto::Status::Recovered;
    check_fail += rr.status == proto::Status::CheckFail;
    corrupted += rr.status == proto::Status::LogicalCorrupted;
    msg_exact += exact;
    eve_match += eve_ok;
    if (csv)
      *csv << s << "," << o.sigma << "," << rr.consistent << ","
           << proto::status_name(rr.status) << "," << exact << "," << eve_ok << "\n";
    if (s == 0) {
      std::cout << "# sample session: m=" << ring::poly_to_string(m)
                << " r=" << ring::poly_to_string(r) << " c=" << ring::poly_to_string(eve.c)
                << " status=" << proto::status_name(rr.status) << "\n";
    }
  }
  std::cout << "sessions=" << o.sessions << " recovered=" << recovered
            << " check_fail=" << check_fail << " logical_corrupted=" << corrupted
            << " msg_exact=" << msg_exact << " eve_c_match=" << eve_match << "\n";
  return 0;
}

struct DistanceOpts {
  std::string key_file;
  int n = 7;
  i64 q = 8;
  i64 p = 3;
  int d = -1;
  i64 lambda = 2;
  bool via_theta = false;
  i64 r2max = 64;
  std::optional<uint64_t> seed;
};

int cmd_distance(const DistanceOpts& o) {
  ntru::NtruParams params;
  ntru::NtruKeyMaterial keys;
  if (!o.key_file.empty()) {
    std::tie(keys, params) = ntru::load_key_file(o.key_file);
  } else {
    params = ntru::ternary_params(o.n, o.q, o.p, o.d, false);
    uint64_t seed = resolve_seed(o.seed);
    std::cout << "# config: distance n=" << o.n << " q=" << o.q << " seed=" << seed << "\n";
    Rng rng(seed);
    keys = ntru::keygen(params, rng);
  }
  gkp::GkpCode code = gkp::code_from_ntru(keys.h, o.lambda, params);
  gkp::DistanceInfo info = gkp::distance(code);
  std::cout << "lambda1_sq=" << code.lambda1_sq << "\n";
  std::cout << "distance_sq=" << info.min_norm_sq << "/" << (code.lambda * code.q) << " = "
            << info.delta_sq.get_d() << "\n";
  std::cout << "kissing_pairs=" << info.kissing << "\n";
  std::cout << "witness=";
  for (size_t i = 0; i < info.witness.size(); ++i)
    std::cout << (i ? "," : "") << info.witness[i];
  std::cout << "\n";
  if (o.via_theta) {
    gkp::DistanceInfo via = gkp::distance_from_theta(code, o.r2max);
    std::cout << "theta_distance_sq=" << via.min_norm_sq << "/" << (code.lambda * code.q)
              << " kissing_pairs=" << via.kissing << "\n";
  }
  return 0;
}

struct ThetaOpts {
  std::string key_file;
  int zn = 0;
  i64 lambda = 2;
  i64 scale = 1;
  i64 r2max = 8;
  std::string out;
};

int cmd_theta(const ThetaOpts& o) {
  IntMat basis;
  if (o.zn > 0) {
    basis = identity_mat(o.zn);
  } else if (!o.key_file.empty()) {
    auto [keys, params] = ntru::load_key_file(o.key_file);
    basis = ntru::public_basis(keys.h, params);
  } else {
    throw InvalidConfig("theta needs --key-file or --zn");
  }
  if (o.scale > 1) basis = mat_scale(basis, o.scale);
  auto counts = lattice::theta_series(basis, o.r2max);
  std::ofstream file;
  std::ostream& out = open_out(file, o.out);
  out << "norm_sq,count\n";
  for (i64 m = 0; m <= o.r2max; ++m) {
    auto it = counts.find(m);
    out << m << "," << (it == counts.end() ? 0 : it->second) << "\n";
  }
  return 0;
}

}  // namespace


namespace {

std::string trimmed(const std::string& s) {
  size_t l = s.find_first_not_of(" \t\r");
  if (l == std::string::npos) return "";
  size_t r = s.find_last_not_of(" \t\r");
  std::string t = s.substr(l, r - l + 1);
  if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') ||
                        (t.front() == '\'' && t.back() == '\'')))
    t = t.substr(1, t.size() - 2);
  return t;
}

// Applies key=value lines from --config by appending synthetic flags;
// anything already present on the command line wins.
int inject_config_overrides(std::vector<std::string>& args) {
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size())
      path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0)
      path = args[i].substr(9);
  }
  if (path.empty()) return 0;
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open config file: " << path << "\n";
    return 2;
  }
  std::string line;
  while (std::getline(in, line)) {
    line = trimmed(line);
    if (line.empty() || line[0] == '#' || line[0] == '[' || line[0] == ';') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: config line is not key=value: " << line << "\n";
      return 2;
    }
    std::string key = trimmed(line.substr(0, eq));
    std::string val = trimmed(line.substr(eq + 1));
    if (key.empty()) {
      std::cerr << "error: config line is not key=value: " << line << "\n";
      return 2;
    }
    std::string flag = "--" + key;
    bool present = false;
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) present = true;
    if (!present) args.push_back(flag + "=" + val);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NTRU lattice toolkit: shortest vectors, scaled symplectic codes, decoders"};
  app.require_subcommand(1);
  std::string config_path;

  KeygenOpts kg;
  CLI::App* keygen = app.add_subcommand("keygen", "Generate a key pair and write a key file");
  keygen->add_option("--n", kg.n, "ring degree");
  keygen->add_option("--q", kg.q, "big modulus (power of two)");
  keygen->add_option("--p", kg.p, "small modulus");
  keygen->add_option("--d", kg.d, "ternary weight (default floor(n/3))");
  keygen->add_option("--family", kg.family,
                     "NtruTernary | NtruHInvertible | NtruGaussianXnPlus1");
  keygen->add_flag("--require-h-invertible", kg.require_h_invertible,
                   "resample until h is a unit mod q");
  keygen->add_flag("--skip-completion", kg.skip_completion, "do not solve for (F, G)");
  keygen->add_option("--seed", kg.seed, "RNG seed (generated when omitted)");
  keygen->add_option("--out", kg.out, "key file path")->required();
  keygen->add_option("--config", config_path, "key=value overrides; explicit flags win");

  SvpOpts sv;
  CLI::App* svp = app.add_subcommand("svp-stats", "Shortest-vector statistics per family");
  svp->add_option("--family", sv.family,
                  "RandomCyclic | NtruTernary | NtruHInvertible | NtruGaussianXnPlus1");
  svp->add_option("--n", sv.n_list, "ring degrees")->delimiter(',');
  svp->add_option("--q", sv.q_list, "moduli, one per n or one for all")->delimiter(',');
  svp->add_option("--p", sv.p, "small modulus");
  svp->add_option("--d", sv.d, "ternary weight (default floor(n/3))");
  svp->add_option("--samples", sv.samples, "samples per (n, q) row");
  svp->add_option("--seed", sv.seed, "master seed (generated when omitted)");
  svp->add_option("--threads", sv.threads, "worker threads (default env NTRUGKP_THREADS or 1)");
  svp->add_option("--out", sv.out, "CSV path (stdout when omitted)");
  svp->add_option("--config", config_path, "key=value overrides; explicit flags win");

  SimulateOpts si;
  CLI::App* simc = app.add_subcommand("simulate", "Decoder Monte Carlo over a sigma grid");
  simc->add_option("--n", si.n, "ring degree");
  simc->add_option("--q", si.q, "big modulus");
  simc->add_option("--p", si.p, "small modulus");
  simc->add_option("--d", si.d, "ternary weight (default floor(n/3))");
  simc->add_option("--lambda", si.lambda, "scaling factor");
  simc->add_option("--decoder", si.decoders, "ntru | babai | med")->delimiter(',');
  simc->add_option("--sigma-grid", si.sigma_grid, "comma list or 'default'");
  simc->add_option("--trials", si.trials, "trials per sigma point");
  simc->add_option("--best-of", si.best_of, "pick the best public lattice of N keys");
  simc->add_option("--key-file", si.key_file, "use an existing key file instead");
  simc->add_option("--seed", si.seed, "master seed (generated when omitted)");
  simc->add_option("--threads", si.threads, "worker threads (default env NTRUGKP_THREADS or 1)");
  simc->add_option("--out", si.out, "CSV path (stdout when omitted)");
  simc->add_option("--config", config_path, "key=value overrides; explicit flags win");

  ProtoOpts pr;
  CLI::App* prot = app.add_subcommand("protocol-demo", "Public-key channel sessions");
  prot->add_option("--n", pr.n, "ring degree");
  prot->add_option("--q", pr.q, "big modulus");
  prot->add_option("--p", pr.p, "small modulus");
  prot->add_option("--d", pr.d, "ternary weight (default floor(n/3))");
  prot->add_option("--lambda", pr.lambda, "scaling factor");
  prot->add_option("--sessions", pr.sessions, "message rounds over one key");
  prot->add_option("--sigma", pr.sigma, "channel noise (0 = noiseless)");
  prot->add_option("--decoder", pr.decoder, "ntru | babai | med");
  prot->add_option("--seed", pr.seed, "master seed (generated when omitted)");
  prot->add_option("--out", pr.out, "per-session CSV path");
  prot->add_option("--config", config_path, "key=value overrides; explicit flags win");

  DistanceOpts di;
  CLI::App* dist = app.add_subcommand("distance", "Exact code distance of a key's lattice");
  dist->add_option("--key-file", di.key_file, "key file (generates a key when omitted)");
  dist->add_option("--n", di.n, "ring degree");
  dist->add_option("--q", di.q, "big modulus");
  dist->add_option("--p", di.p, "small modulus");
  dist->add_option("--d", di.d, "ternary weight (default floor(n/3))");
  dist->add_option("--lambda", di.lambda, "scaling factor");
  dist->add_flag("--via-theta", di.via_theta, "also derive from the theta series (2n <= 8)");
  dist->add_option("--r2max", di.r2max, "theta radius");
  dist->add_option("--seed", di.seed, "RNG seed (generated when omitted)");
  dist->add_option("--config", config_path, "key=value overrides; explicit flags win");

  ThetaOpts th;
  CLI::App* theta = app.add_subcommand("theta", "Point counts by squared norm");
  theta->add_option("--key-file", th.key_file, "key file for the public lattice");
  theta->add_option("--zn", th.zn, "use the integer lattice of this dimension instead");
  theta->add_option("--scale", th.scale, "scale the basis by this factor");
  theta->add_option("--r2max", th.r2max, "largest squared norm to count");
  theta->add_option("--out", th.out, "CSV path (stdout when omitted)");
  theta->add_option("--config", config_path, "key=value overrides; explicit flags win");

  std::vector<std::string> args(argv + 1, argv + argc);
  if (int rc = inject_config_overrides(args)) return rc;
  std::reverse(args.begin(), args.end());  // the vector overload pops from the back
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(keygen)) return cmd_keygen(kg);
    if (app.got_subcommand(svp)) return cmd_svp_stats(sv);
    if (app.got_subcommand(simc)) return cmd_simulate(si);
    if (app.got_subcommand(prot)) return cmd_protocol_demo(pr);
    if (app.got_subcommand(dist)) return cmd_distance(di);
    if (app.got_subcommand(theta)) return cmd_theta(th);
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ring::InvalidModulus& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lattice::DimensionTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ntru::MaxResampleExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
