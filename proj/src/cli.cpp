#include "gaugecert/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "gaugecert/certificates.hpp"
#include "gaugecert/cone.hpp"
#include "gaugecert/lp.hpp"
#include "gaugecert/problem_file.hpp"
#include "gaugecert/recovery.hpp"
#include "gaugecert/solvers.hpp"

namespace gaugecert {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0.0;  // drop the sign of -0
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string vec_text(const Vector& v) {
  std::string s = "[";
  for (Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
  return s + "]";
}

void row(std::ostream& out, const std::string& key, const std::string& value) {
  out << std::left << std::setw(22) << key << value << "\n";
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Yes: return exit_code::kYes;
    case Verdict::No: return exit_code::kNo;
    case Verdict::Unknown: return exit_code::kUnknown;
  }
  return exit_code::kUnknown;
}

int status_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return exit_code::kYes;
    case SolveStatus::MaxIter: return exit_code::kMaxIter;
    case SolveStatus::Infeasible: return exit_code::kInfeasible;
  }
  return exit_code::kInternalError;
}

double parse_real(const std::string& s, const char* what) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw UsageError(std::string("malformed ") + what + " \"" + s + "\"");
  return v;
}

std::uint64_t parse_uint(const std::string& s, const char* what) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw UsageError(std::string("malformed ") + what + " \"" + s + "\"");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep))
    if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::vector<double> parse_reals(const std::string& s, const char* what) {
  std::vector<double> v;
  for (const std::string& p : split(s, ',')) v.push_back(parse_real(p, what));
  if (v.empty()) throw UsageError(std::string("empty ") + what + " list");
  return v;
}

// "a-b" (inclusive), or a comma list.
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> v;
  if (const std::size_t dash = s.find('-'); dash != std::string::npos) {
    const std::uint64_t lo = parse_uint(s.substr(0, dash), "seed"), hi = parse_uint(s.substr(dash + 1), "seed");
    if (hi < lo) throw UsageError("empty seed range " + s);
    if (hi - lo >= 1000000) throw UsageError("seed range too long");
    for (std::uint64_t k = lo; k <= hi; ++k) v.push_back(k);
  } else {
    for (const std::string& p : split(s, ',')) v.push_back(parse_uint(p, "seed"));
  }
  if (v.empty()) throw UsageError("empty seed list");
  return v;
}

struct Loaded {
  ProblemFile file;
  Gauge gauge;
  Matrix A;
  std::optional<Vector> x0;
  std::optional<Vector> b0, b;
  std::string id;
};

// A fixed problem, or the generator's instance for `seed`.
Loaded resolve(const ProblemFile& f, std::uint64_t seed) {
  Loaded L;
  L.file = f;
  if (f.generator) {
    InstanceConfig c = *f.generator;
    c.delta = f.delta.value_or(0.0);
    const ProblemInstance inst = gen_instance(c, seed);
    L.gauge = inst.gauge;
    L.A = inst.A;
    L.x0 = inst.x0;
    L.b0 = inst.b0;
    L.b = inst.b;
    L.id = inst.id;
  } else {
    L.gauge = f.gauge;
    L.A = *f.A;
    L.x0 = f.x0;
    L.b0 = f.exact_rhs();
    L.b = f.noisy_rhs();
    L.id = "file";
  }
  return L;
}

Verdict route_verdict(const CertificateReport& r, const std::string& prefix) {
  Verdict v = Verdict::Unknown;
  bool any = false;
  for (const ConditionCheck& c : r.conditions) {
    if (c.id == "assumption.interior" && c.verdict != Verdict::Yes) return Verdict::Unknown;
    if (c.id == "v.certificate" && c.verdict == Verdict::No) return Verdict::No;
    if (c.id.rfind(prefix, 0) != 0) continue;
    if (!c.certified || c.verdict == Verdict::Unknown) return Verdict::Unknown;
    if (c.verdict == Verdict::No) return Verdict::No;
    any = true;
    v = Verdict::Yes;
  }
  return any ? v : Verdict::Unknown;
}

void require_kind(const Gauge& J, GaugeKind k, const std::string& cond) {
  if (J.kind != k)
    throw UsageError("condition " + cond + " needs a " + to_string(k) + " gauge, the file has " + to_string(J.kind));
}

void print_report(std::ostream& out, const CertificateReport& r, const Gauge& J, const std::string& cond,
                  Verdict verdict) {
  auto flag = [](bool c) { return std::string(c ? " (certified)" : " (heuristic)"); };
  row(out, "gauge", to_string(J.kind));
  row(out, "condition", cond);
  row(out, "verdict", to_string(verdict));
  row(out, "sharp", to_string(r.is_sharp));
  row(out, "unique", to_string(r.is_unique));
  row(out, "kappa", r.kappa ? num(*r.kappa) + flag(r.kappa_certified) : "-");
  row(out, "alpha", r.alpha ? num(*r.alpha) + flag(r.alpha_certified) : "-");
  row(out, "kernel", r.kernel_trivial ? "trivial" : "nontrivial");
  row(out, "ri_margin", num(r.ri_margin));
  if (r.lp_value) row(out, "lp_value", num(*r.lp_value));
  if (r.dual_certificate) row(out, "dual_certificate", vec_text(*r.dual_certificate));
  if (!r.conditions.empty()) {
    out << "conditions\n";
    std::size_t w = 0;
    for (const ConditionCheck& c : r.conditions) w = std::max(w, c.id.size());
    for (const ConditionCheck& c : r.conditions)
      out << "  " << std::left << std::setw(static_cast<int>(w) + 2) << c.id << std::setw(9) << to_string(c.verdict)
          << std::setw(11) << (c.certified ? "certified" : "heuristic") << c.detail << "\n";
  }
  for (const std::string& n : r.notes) out << "note: " << n << "\n";
}

int cmd_certify(const Loaded& L, const std::string& cond, bool as_json, const Config& cfg, std::ostream& out) {
  if (!L.x0) throw UsageError("certify needs x0 in the problem file");
  const Gauge& J = L.gauge;
  const Vector& x0 = *L.x0;
  CertificateReport r;
  Verdict verdict = Verdict::Unknown;
  if (cond == "auto" || cond == "v" || cond == "vii") {
    r = cond == "auto" ? check_unique(J, L.A, x0, cfg) : check_sharp(J, L.A, x0, cfg);
    verdict = cond == "auto" ? r.is_sharp : route_verdict(r, cond + ".");
  } else {
    if (cond == "fuchs") {
      require_kind(J, GaugeKind::L1, cond);
      r = fuchs_check(L.A, x0, cfg);
    } else if (cond == "analysis") {
      require_kind(J, GaugeKind::AnalysisL1, cond);
      r = analysis_check(L.A, J.Dt, x0, cfg);
    } else if (cond == "wsl1") {
      require_kind(J, GaugeKind::WSL1, cond);
      r = wsl1_check(L.A, J.w, x0, cfg);
    } else if (cond == "nuclear") {
      require_kind(J, GaugeKind::Nuclear, cond);
      r = nuclear_check(L.A, unvec(x0, J.rows, J.cols), cfg);
    } else if (cond == "nonneg") {
      require_kind(J, GaugeKind::NonnegL1, cond);
      r = nonneg_l1_check(L.A, x0, cfg);
    } else {
      require_kind(J, GaugeKind::SdpTrace, cond);
      r = sdp_trace_check(L.A, J.C, unvec(x0, J.rows, J.cols), cfg);
    }
    verdict = r.is_sharp;
  }
  if (as_json) out << certificate_json(r, J, cond, verdict);
  else print_report(out, r, J, cond, verdict);
  return verdict_code(verdict);
}

int cmd_solve(const Loaded& L, const std::string& problem, std::optional<double> mu, std::optional<double> delta,
              bool as_json, const Config& cfg, std::ostream& out) {
  const Gauge& J = L.gauge;
  SolveResult s;
  std::optional<DualityGap> gap;
  if (problem == "primal" || problem == "dual") {
    if (!L.b0) throw UsageError("solve needs b0, b, or x0 in the problem file");
    const SolveResult p = solve_primal_eq(J, L.A, *L.b0, cfg);
    if (p.status == SolveStatus::Infeasible) {
      s = p;
      if (problem == "dual") s.method = "primal_infeasible";
    } else {
      DualityGap g;
      g.primal_solve = p;
      g.dual_solve = solve_dual(J, L.A, *L.b0, cfg);
      g.primal = p.value;
      g.dual = g.dual_solve.value;
      g.gap = g.primal - g.dual;
      s = problem == "primal" ? g.primal_solve : g.dual_solve;
      gap = g;
    }
  } else {
    if (!L.b) throw UsageError("solve needs b, b0, or x0 in the problem file");
    const std::optional<double> c1 = L.file.c1;
    if (problem == "tikhonov") {
      if (!mu) mu = L.file.mu;
      if (!mu && c1 && L.file.delta) mu = *c1 * *L.file.delta;
      if (!mu || !(*mu > 0)) throw UsageError("tikhonov needs mu > 0 (flag, file mu, or c1 * delta)");
      s = solve_tikhonov(J, L.A, *L.b, *mu, cfg);
    } else {
      if (!delta) delta = L.file.delta;
      if (!delta || !(*delta >= 0)) throw UsageError("mozorov needs delta >= 0 (flag or file)");
      s = solve_mozorov(J, L.A, *L.b, *delta, cfg);
    }
  }
  if (as_json) {
    out << solve_json(s, problem, gap);
  } else {
    row(out, "problem", problem);
    row(out, "status", to_string(s.status));
    row(out, "method", s.method);
    row(out, "value", num(s.value));
    row(out, problem == "dual" ? "y" : "x", vec_text(s.point));
    row(out, "feasibility_residual", num(s.feasibility_residual));
    row(out, "optimality_residual", num(s.optimality_residual));
    row(out, "iterations", std::to_string(s.iterations));
    if (!std::isnan(s.mu)) row(out, "mu", num(s.mu));
    if (gap) {
      row(out, "primal_value", num(gap->primal));
      row(out, "dual_value", num(gap->dual));
      row(out, "duality_gap", num(gap->gap));
    }
  }
  return status_code(s.status);
}

struct RecoverFlags {
  std::string deltas, c1, seeds = "0", noise = "both", csv;
  bool as_json = false;
  std::optional<double> alpha_override;
};

int cmd_recover(const ProblemFile& f, const RecoverFlags& fl, const Config& cfg, std::ostream& out,
                std::ostream& err) {
  const std::vector<double> deltas = fl.deltas.empty()
                                         ? (f.delta ? std::vector<double>{*f.delta} : std::vector<double>{1e-3, 1e-2, 1e-1})
                                         : parse_reals(fl.deltas, "delta");
  for (double d : deltas)
    if (!(d >= 0) || !std::isfinite(d)) throw UsageError("deltas must be finite and >= 0");
  const std::vector<double> c1s = fl.c1.empty() ? std::vector<double>{f.c1.value_or(1.0)} : parse_reals(fl.c1, "c1");
  for (double c : c1s)
    if (!(c > 0) || !std::isfinite(c)) throw UsageError("c1 must be finite and > 0");
  const std::vector<std::uint64_t> seeds = parse_seeds(fl.seeds);
  std::vector<NoiseModel> noises;
  if (fl.noise == "sphere" || fl.noise == "both") noises.push_back(NoiseModel::Sphere);
  if (fl.noise == "adversarial" || fl.noise == "both") noises.push_back(NoiseModel::Adversarial);

  auto certify = [&](const ProblemInstance& inst) {
    SharpnessData s = certify_for_recovery(inst.gauge, inst.A, inst.x0, cfg);
    if (s.applicable && fl.alpha_override) s.alpha = *fl.alpha_override;
    return s;
  };
  RecoveryReport rep;
  if (f.generator) {
    for (std::uint64_t seed : seeds) {
      const ProblemInstance base = gen_instance(*f.generator, seed);
      const RecoveryReport part = sweep_instance(base, certify(base), {seed}, deltas, c1s, noises, cfg);
      for (const RecoveryRow& r : part.rows) append_row(rep, r);
    }
  } else {
    if (!f.x0) throw UsageError("recover needs x0 or a generator in the problem file");
    ProblemInstance base;
    base.id = "file";
    base.gauge = f.gauge;
    base.A = *f.A;
    base.x0 = *f.x0;
    base.b0 = base.A * base.x0;
    base = with_noise(base, 0.0, NoiseModel::Adversarial, 0);
    rep = sweep_instance(base, certify(base), seeds, deltas, c1s, noises, cfg);
  }

  if (!fl.csv.empty()) {
    std::ofstream os(fl.csv, std::ios::binary);
    if (!os) throw UsageError("cannot write " + fl.csv);
    os << recovery_csv(rep);
  }
  if (fl.as_json) {
    out << recovery_json(rep);
  } else {
    row(out, "rows", std::to_string(rep.rows.size()));
    row(out, "applicable", std::to_string(rep.applicable));
    row(out, "passed", std::to_string(rep.passed));
    row(out, "failed", std::to_string(rep.failed));
    row(out, "solver_errors", std::to_string(rep.errors));
    row(out, "pass_rate", num(rep.pass_rate()));
    row(out, "max_violation", num(rep.max_violation));
  }
  const std::size_t na = rep.rows.size() - rep.applicable;
  if (na) {
    std::string why;
    for (const RecoveryRow& r : rep.rows)
      if (!r.applicable) {
        why = r.note;
        break;
      }
    err << "warning: " << na << " of " << rep.rows.size() << " rows skipped, " << why << "\n";
  }
  for (const RecoveryRow& r : rep.rows)
    if (r.applicable && !r.pass)
      err << "violation: " << r.instance_id << " delta " << num(r.delta) << " c1 " << num(r.c1)
          << (r.solver_failed ? " " + r.note : "") << "\n";
  return rep.all_pass() ? exit_code::kYes : exit_code::kNo;
}

int cmd_nsp(const Loaded& L, const std::string& support, bool as_json, const Config& cfg, std::ostream& out) {
  if (L.gauge.kind != GaugeKind::L1) throw UsageError("nsp needs an l1 problem file");
  std::vector<Index> I;
  for (const std::string& p : split(support, ',')) I.push_back(static_cast<Index>(parse_uint(p, "support index")));
  const double c = nsp_constant(L.A, I, cfg);
  if (as_json) {
    out << nsp_json(I, c);
  } else {
    std::string s;
    for (Index i : I) s += (s.empty() ? "" : ",") + std::to_string(i);
    row(out, "support", "{" + s + "}");
    row(out, "nsp_constant", num(c));
    row(out, "below_half", c < 0.5 ? "yes" : "no");
  }
  return exit_code::kYes;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sharpness and uniqueness certificates for gauge-regularised linear inverse problems", "gaugecert"};
  app.require_subcommand(1);
  std::optional<double> cert_tol;
  std::optional<std::size_t> lp_maxiter, probe_restarts;
  app.add_option("--cert-tol", cert_tol, "interior-margin threshold (env CERT_TOL)");
  app.add_option("--lp-maxiter", lp_maxiter, "simplex iteration cap (env LP_MAXITER)");
  app.add_option("--probe-restarts", probe_restarts, "multistart restarts (env PROBE_RESTARTS)");

  std::string file, condition = "auto", problem = "primal", support;
  bool as_json = false;
  std::uint64_t seed = 0;
  std::optional<double> mu, delta;
  RecoverFlags rf;

  CLI::App* certify = app.add_subcommand("certify", "check sharpness and uniqueness of x0");
  certify->add_option("file", file, "problem file")->required();
  certify->add_option("--condition", condition, "auto|v|vii|fuchs|analysis|wsl1|nuclear|nonneg|sdp")
      ->check(CLI::IsMember({"auto", "v", "vii", "fuchs", "analysis", "wsl1", "nuclear", "nonneg", "sdp"}));
  certify->add_flag("--json", as_json, "JSON report");
  certify->add_option("--seed", seed, "instance seed for generator files");

  CLI::App* solve = app.add_subcommand("solve", "solve the primal, dual, Tikhonov or Mozorov problem");
  solve->add_option("file", file, "problem file")->required();
  solve->add_option("--problem", problem, "primal|dual|tikhonov|mozorov")
      ->check(CLI::IsMember({"primal", "dual", "tikhonov", "mozorov"}));
  solve->add_option("--mu", mu, "Tikhonov parameter");
  solve->add_option("--delta", delta, "Mozorov noise level");
  solve->add_flag("--json", as_json, "JSON report");
  solve->add_option("--seed", seed, "instance seed for generator files");

  CLI::App* recover = app.add_subcommand("recover", "check the robust-recovery error bounds under noise");
  recover->add_option("file", file, "problem file")->required();
  recover->add_option("--deltas", rf.deltas, "comma-separated noise levels");
  recover->add_option("--c1", rf.c1, "comma-separated Tikhonov ratios mu / delta");
  recover->add_option("--seeds", rf.seeds, "seed range a-b or comma list");
  recover->add_option("--noise", rf.noise, "sphere|adversarial|both")
      ->check(CLI::IsMember({"sphere", "adversarial", "both"}));
  recover->add_option("--csv", rf.csv, "write per-row CSV here");
  recover->add_flag("--json", rf.as_json, "JSON summary");
  recover->add_option("--override-alpha", rf.alpha_override, "replace the certified alpha (harness self-test)");

  CLI::App* nsp = app.add_subcommand("nsp", "null space property constant of a support");
  nsp->add_option("file", file, "problem file")->required();
  nsp->add_option("--support", support, "comma-separated 0-based indices")->required();
  nsp->add_flag("--json", as_json, "JSON report");
  nsp->add_option("--seed", seed, "instance seed for generator files");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code::kInputError;
  }

  try {
    Config cfg = config_from_env();
    if (cert_tol) cfg.tol.ri_margin = *cert_tol;
    if (lp_maxiter) cfg.lim.lp_max_iter = *lp_maxiter;
    if (probe_restarts) cfg.lim.multistart_restarts = *probe_restarts;
    const ProblemFile f = load_problem(file);
    if (*recover) return cmd_recover(f, rf, cfg, out, err);
    const Loaded L = resolve(f, seed);
    if (*certify) return cmd_certify(L, condition, as_json, cfg, out);
    if (*solve) return cmd_solve(L, problem, mu, delta, as_json, cfg, out);
    return cmd_nsp(L, support, as_json, cfg, out);
  } catch (const FileError& e) {
    err << "error: " << file << ": " << e.what() << "\n";
    return exit_code::kInputError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInputError;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kLimitExceeded;
  } catch (const LpError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kLimitExceeded;
  } catch (const InternalDisagreement& e) {
    err << "internal error: " << e.what() << "\n";
    return exit_code::kInternalError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::kInternalError;
  }
}

}  // namespace gaugecert
