// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>
#include <string>

#include "gaugecert/certificates.hpp"
#include "gaugecert/cone.hpp"
#include "gaugecert/lp.hpp"
#include "gaugecert/recovery.hpp"
#include "gaugecert/solvers.hpp"
#include "test_util.hpp"

using namespace gaugecert;
using testutil::Sampler;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

Matrix row_matrix(std::initializer_list<double> v) {
  Matrix A(1, static_cast<Index>(v.size()));
  Index j = 0;
  for (double x : v) A(0, j++) = x;
  return A;
}

Vector vec_of(std::initializer_list<double> v) {
  Vector x(static_cast<Index>(v.size()));
  Index j = 0;
  for (double a : v) x(j++) = a;
  return x;
}

Config coarse() {
  Config c = default_config();
  c.lim.grid_resolution = 5e-3;
  return c;
}

// ---------------------------------------------------------------------------
// Epigraph LPs written out per gauge, independent of the library's own models.
// Variables: x (n, free) first, then gauge-specific auxiliaries.

struct EpiLp {
  LpProblem lp;
  Index n = 0;
  Vector objective;  // J(x) <= objective . vars at the optimum
};

EpiLp epigraph(const Gauge& J, const Matrix& A, const Vector& b0) {
  const Index n = J.n;
  EpiLp E;
  E.n = n;
  auto abs_block = [&](const Matrix& M, Index nv, Index uoff) {
    // -u <= M x <= u
    for (Index i = 0; i < M.rows(); ++i) {
      Vector r = Vector::Zero(nv);
      r.head(n) = M.row(i).transpose();
      r(uoff + i) = -1;
      E.lp.add_le(r, 0);
      r.head(n) = -M.row(i).transpose();
      E.lp.add_le(r, 0);
    }
  };
  switch (J.kind) {
    case GaugeKind::L1: {
      E.lp = LpProblem(2 * n);
      abs_block(Matrix::Identity(n, n), 2 * n, n);
      E.objective = Vector::Zero(2 * n);
      E.objective.tail(n).setOnes();
      break;
    }
    case GaugeKind::NonnegL1: {
      E.lp = LpProblem(n);
      for (Index i = 0; i < n; ++i) E.lp.nonneg[static_cast<size_t>(i)] = true;
      E.objective = Vector::Ones(n);
      break;
    }
    case GaugeKind::AnalysisL1: {
      const Index p = J.Dt.rows();
      E.lp = LpProblem(n + p);
      abs_block(J.Dt, n + p, n);
      E.objective = Vector::Zero(n + p);
      E.objective.tail(p).setOnes();
      break;
    }
    case GaugeKind::WSL1: {
      // sum_k (w_k - w_{k+1}) topk(|x|), topk(u) = min_t k t + sum_i (u_i - t)_+.
      const Index nv = 2 * n + n + n * n;
      E.lp = LpProblem(nv);
      abs_block(Matrix::Identity(n, n), nv, n);
      E.objective = Vector::Zero(nv);
      for (Index k = 0; k < n; ++k) {
        const double ck = J.w(k) - (k + 1 < n ? J.w(k + 1) : 0.0);
        const Index t = 2 * n + k;
        E.objective(t) = ck * static_cast<double>(k + 1);
        for (Index i = 0; i < n; ++i) {
          const Index z = 3 * n + k * n + i;
          E.lp.nonneg[static_cast<size_t>(z)] = true;
          E.objective(z) = ck;
          Vector r = Vector::Zero(nv);
          r(n + i) = 1;
          r(t) = -1;
          r(z) = -1;
          E.lp.add_le(r, 0);
        }
      }
      break;
    }
    default: throw std::invalid_argument("epigraph oracle covers polyhedral gauges only");
  }
  Matrix Ae = Matrix::Zero(A.rows(), E.lp.num_vars());
  Ae.leftCols(n) = A;
  E.lp.add_eq_rows(Ae, b0);
  return E;
}

// Whether x0 is the unique solution of min J s.t. Ax = Ax0, from the extent of
// the optimal face along every coordinate.
bool lp_unique_minimiser(const Gauge& J, const Matrix& A, const Vector& x0) {
  EpiLp E = epigraph(J, A, A * x0);
  E.lp.c = E.objective;
  const LpResult opt = lp_solve(E.lp);
  if (opt.status != LpStatus::Optimal) throw std::runtime_error("oracle LP failed");
  const double v = opt.value;
  if (eval(J, x0) > v + 1e-9 * (1 + v)) return false;
  LpProblem face = E.lp;
  face.add_le(E.objective, v + 1e-10 * (1 + v));
  for (Index i = 0; i < E.n; ++i) {
    double ext[2];
    for (int s = 0; s < 2; ++s) {
      face.c = Vector::Zero(face.num_vars());
      face.c(i) = s ? -1.0 : 1.0;
      const LpResult r = lp_solve(face);
      if (r.status != LpStatus::Optimal) throw std::runtime_error("oracle face LP failed");
      ext[s] = r.x(i);
    }
    if (std::abs(ext[0] - x0(i)) > 1e-6 || std::abs(ext[1] - x0(i)) > 1e-6) return false;
  }
  return true;
}

// z in A'R^m + dJ(x0), from the face parametrisation.
bool in_shifted_subdiff(const Gauge& J, const Matrix& A, const Vector& x0, const Vector& z) {
  const SubdiffFace F = subdiff_face(J, x0);
  const Index m = A.rows(), p = F.param_map.cols(), n = J.n;
  LpProblem lp(m + p);
  Matrix Eq(n, m + p);
  Eq << A.transpose(), F.param_map;
  lp.add_eq_rows(Eq, z - F.base);
  Vector tot = Vector::Zero(m + p);
  for (Index i = 0; i < p; ++i) {
    Vector r = Vector::Zero(m + p);
    r(m + i) = 1;
    switch (F.domain) {
      case ParamDomain::Box:
        lp.add_le(r, 1.0);
        r(m + i) = -1;
        lp.add_le(r, 1.0);
        break;
      case ParamDomain::UpperOne: lp.add_le(r, 1.0); break;
      case ParamDomain::Simplex:
        lp.nonneg[static_cast<size_t>(m + i)] = true;
        tot(m + i) = 1;
        break;
      default: throw std::invalid_argument("unexpected face domain");
    }
  }
  if (F.domain == ParamDomain::Simplex && p) lp.add_le(tot, 1.0);
  return lp_solve(lp).status == LpStatus::Optimal;
}

// ---------------------------------------------------------------------------
// Shared randomized polyhedral suite.

struct Case {
  Gauge J;
  Matrix A;
  Vector x0;
  CertificateReport sharp, unique;
};

std::vector<Case>& suite() {
  static std::vector<Case> cases = [] {
    std::vector<Case> out;
    Sampler s(2024);
    CheckOptions opt;
    opt.compute_alpha = false;
    for (int t = 0; t < 360; ++t) {
      // 200 l1 cases, then 40 per other polyhedral gauge.
      const int family = t < 200 ? 0 : 1 + (t - 200) / 40;
      const Index n = family == 3 ? s.integer(2, 4) : s.integer(2, 6), m = s.integer(1, n);
      Matrix A = s.normal_mat(m, n);
      if (t % 5 == 0 && n > 1) A.col(0) = A.col(1);
      if (t % 7 == 0) A = A.array().round();  // integer data: ties and degeneracy
      Vector x0 = s.sparse(n, s.integer(1, std::max<Index>(1, m)));
      if (t % 11 == 0) x0 = s.normal_vec(n);  // typically not a minimiser
      Gauge J = Gauge::l1(n);
      if (family == 1) {
        J = Gauge::nonneg_l1(n);
        x0 = x0.cwiseAbs();
      } else if (family == 2) {
        J = Gauge::analysis_l1(s.normal_mat(s.integer(1, n + 1), n));
      } else if (family == 3) {
        Vector w = s.normal_vec(n).cwiseAbs().array() + 0.1;
        std::sort(w.data(), w.data() + n, std::greater<double>());
        if (t % 2) w.tail(n - 1).setConstant(w(1));
        J = Gauge::wsl1(w);
      }
      if (A.cwiseAbs().maxCoeff() == 0) A(0, 0) = 1;
      Case c{J, A, x0, {}, {}};
      c.sharp = check_sharp(J, A, x0, default_config(), opt);
      c.unique = check_unique(J, A, x0, default_config(), opt);
      out.push_back(std::move(c));
    }
    return out;
  }();
  return cases;
}

// ---------------------------------------------------------------------------

Outcome strong_duality() {
  Sampler s(1);
  int solved = 0;
  double worst = 0;
  for (int t = 0; t < 120; ++t) {
    const Index n = s.integer(1, 8), m = s.integer(1, std::min<Index>(4, n));
    const Matrix A = s.normal_mat(m, n);
    const Vector x0 = t % 3 ? s.sparse(n, s.integer(1, n)) : s.normal_vec(n);
    const DualityGap g = duality_gap(Gauge::l1(n), A, A * x0);
    if (g.primal_solve.status != SolveStatus::Optimal || g.dual_solve.status != SolveStatus::Optimal) continue;
    ++solved;
    worst = std::max(worst, std::abs(g.gap));
  }
  return {solved >= 100 && worst <= 1e-6, std::to_string(solved) + " instances, max |gap| " + format_double(worst)};
}

Outcome uniqueness_oracle() {
  int n = 0, agree = 0, unique = 0;
  for (const Case& c : suite()) {
    if (c.J.kind != GaugeKind::L1) continue;
    ++n;
    const bool oracle = lp_unique_minimiser(c.J, c.A, c.x0);
    unique += oracle;
    agree += (c.unique.is_unique == Verdict::Yes) == oracle && c.unique.is_unique != Verdict::Unknown;
  }
  return {n >= 200 && agree == n,
          std::to_string(agree) + "/" + std::to_string(n) + " agree (" + std::to_string(unique) + " unique)"};
}

Outcome worked_instances() {
  const Matrix A1 = row_matrix({2, 1});
  const Vector x1 = vec_of({0.5, 0});
  const CertificateReport r = check_sharp(Gauge::l1(2), A1, x1);
  const CertificateReport f = fuchs_check(A1, x1);
  const CertificateReport e2 = check_unique(Gauge::l1(2), row_matrix({1, 1}), vec_of({1, 0}));
  bool ok = r.is_sharp == Verdict::Yes && r.kappa && std::abs(*r.kappa - 1 / std::sqrt(5.0)) <= 1e-6 &&
            r.kappa_certified && r.alpha && std::abs(*r.alpha - 1 / std::sqrt(2.0)) <= 1e-3 && r.alpha_certified &&
            f.lp_value && std::abs(*f.lp_value - 0.5) <= 1e-8 && e2.is_sharp == Verdict::No &&
            e2.is_unique == Verdict::No;
  std::ostringstream os;
  os << "E1 kappa " << (r.kappa ? format_double(*r.kappa) : "-") << ", alpha "
     << (r.alpha ? format_double(*r.alpha) : "-") << ", Fuchs LP " << (f.lp_value ? format_double(*f.lp_value) : "-")
     << "; E2 sharp " << to_string(e2.is_sharp) << ", unique " << to_string(e2.is_unique);
  return {ok, os.str()};
}

Outcome growth_oracle() {
  Sampler s(4);
  int sharp = 0, bad = 0, balls = 0;
  for (const Case& c : suite()) {
    const CertificateReport& r = c.sharp;
    if (r.is_sharp != Verdict::Yes || r.kernel_trivial || !r.kappa) continue;
    ++sharp;
    const Matrix K = kernel_basis(c.A);
    const double J0 = eval(c.J, c.x0), kappa = *r.kappa;
    for (int i = 0; i < 40; ++i) {
      const Vector h = K * s.unit(K.cols()) * s.uniform(1e-5, 1e-2);
      if (eval(c.J, c.x0 + h) == kInf) continue;  // outside the nonnegative orthant
      if (eval(c.J, c.x0 + h) - J0 < (kappa - 1e-4) * h.norm() - 1e-14) ++bad;
    }
    if (!std::isfinite(kappa)) continue;
    ++balls;
    for (int i = 0; i < 10; ++i)
      if (!in_shifted_subdiff(c.J, c.A, c.x0, (kappa - 1e-6) * (K * s.unit(K.cols())))) ++bad;
    if (in_shifted_subdiff(c.J, c.A, c.x0, (kappa + 1e-3) * *r.kappa_direction)) ++bad;
  }
  return {sharp > 0 && bad == 0, std::to_string(sharp) + " sharp instances (" + std::to_string(balls) +
                                     " ball checks), " + std::to_string(bad) + " violations"};
}

Outcome robust_recovery() {
  SweepSpec spec;
  spec.configs = {InstanceConfig{}};
  for (std::uint64_t k = 0; k < 64; ++k) spec.seeds.push_back(k);
  spec.deltas = {1e-3, 1e-2, 1e-1};
  spec.c1s = {0.1, 1.0};
  spec.noises = {NoiseModel::Sphere, NoiseModel::Adversarial};
  const RecoveryReport rep = sweep(spec);
  const std::size_t per_instance = spec.deltas.size() * spec.c1s.size() * spec.noises.size();
  const std::size_t certified = rep.applicable / per_instance;
  std::size_t moz_ok = 0, tik_ok = 0;
  for (const RecoveryRow& r : rep.rows) {
    if (!r.applicable) continue;
    moz_ok += !r.solver_failed && r.err_mozorov <= r.bound_mozorov + kBoundSlack;
    tik_ok += !r.solver_failed && r.err_tikhonov <= r.bound_tikhonov_y0 + kBoundSlack;
  }
  std::ostringstream os;
  os << certified << " certified instances, " << rep.applicable << " trials, Mozorov " << moz_ok << ", Tikhonov "
     << tik_ok << " within bound, max violation " << format_double(rep.max_violation);
  return {certified >= 50 && moz_ok == rep.applicable && tik_ok == rep.applicable && rep.all_pass(), os.str()};
}

Outcome polyhedral_equivalence() {
  int n = 0, agree = 0;
  for (const Case& c : suite()) {
    ++n;
    const bool oracle = lp_unique_minimiser(c.J, c.A, c.x0);
    const Verdict o = oracle ? Verdict::Yes : Verdict::No;
    agree += c.sharp.is_sharp == c.unique.is_unique && c.sharp.is_sharp == o;
  }
  return {agree == n, std::to_string(agree) + "/" + std::to_string(n) +
                          " instances with sharp = unique = LP oracle (l1, nonneg, analysis, WSL1)"};
}

Outcome reductions() {
  Sampler s(7);
  int analysis = 0, wsl1 = 0, nuclear = 0, nuclear_n = 0;
  for (int t = 0; t < 100; ++t) {
    const Index n = s.integer(2, 6), m = s.integer(1, n);
    Matrix A = s.normal_mat(m, n);
    if (t % 3 == 0) A.col(0) = -A.col(n - 1);
    const Vector x0 = s.sparse(n, s.integer(1, m));
    const CertificateReport f = fuchs_check(A, x0);
    const CertificateReport a = analysis_check(A, Matrix::Identity(n, n), x0);
    analysis += a.is_sharp == f.is_sharp && f.is_sharp != Verdict::Unknown;
  }
  for (int t = 0; t < 50; ++t) {
    const Index n = s.integer(2, 5), m = s.integer(1, n);
    const Matrix A = s.normal_mat(m, n);
    const Vector x0 = s.sparse(n, s.integer(1, m));
    const double c = s.uniform(0.5, 2.0);
    wsl1 += wsl1_check(A, Vector::Constant(n, c), x0).is_sharp == fuchs_check(A, x0).is_sharp;
  }
  const Config cfg = coarse();
  for (int t = 0; t < 8; ++t, ++nuclear_n) {
    const Index k = 3, m = s.integer(1, 2);
    const Matrix A = s.normal_mat(m, k);
    const Vector x0 = s.sparse(k, s.integer(1, m));
    // Phi measures A diag(X) and every off-diagonal entry.
    Matrix Phi = Matrix::Zero(m + k * k - k, k * k);
    for (Index i = 0; i < k; ++i) Phi.block(0, i * k + i, m, 1) = A.col(i);
    Index row = m;
    for (Index i = 0; i < k; ++i)
      for (Index j = 0; j < k; ++j)
        if (i != j) Phi(row++, i * k + j) = 1.0;
    nuclear += nuclear_check(Phi, Matrix(x0.asDiagonal()), cfg).is_sharp == fuchs_check(A, x0).is_sharp;
  }
  std::ostringstream os;
  os << "analysis D=I " << analysis << "/100, WSL1 constant weights " << wsl1 << "/50, nuclear diagonal " << nuclear
     << "/" << nuclear_n;
  return {analysis == 100 && wsl1 == 50 && nuclear == nuclear_n, os.str()};
}

Outcome non_polyhedral_separation() {
  const Config cfg = coarse();
  Matrix phi_sdp = Matrix::Zero(1, 4);
  phi_sdp(0, 0) = 1;
  Matrix X0 = Matrix::Zero(2, 2);
  X0(0, 0) = 1;
  const CertificateReport sdp = sdp_trace_check(phi_sdp, Matrix::Identity(2, 2), X0, cfg);
  Matrix phi_nuc = Matrix::Zero(3, 4);
  phi_nuc(0, 0) = phi_nuc(1, 1) = phi_nuc(2, 2) = 1;
  const CertificateReport nuc = nuclear_check(phi_nuc, X0, cfg);
  const bool ok = sdp.is_unique == Verdict::Yes && sdp.is_sharp == Verdict::No && nuc.is_sharp == Verdict::Yes &&
                  nuc.kappa && nuc.kappa_certified && std::abs(*nuc.kappa - 1) <= 1e-6;
  std::ostringstream os;
  os << "SDP unique " << to_string(sdp.is_unique) << ", sharp " << to_string(sdp.is_sharp) << "; nuclear sharp "
     << to_string(nuc.is_sharp) << ", kernel probe " << (nuc.kappa ? format_double(*nuc.kappa) : "-")
     << (nuc.kappa_certified ? " (certified)" : " (heuristic)");
  return {ok, os.str()};
}

Outcome nsp_uniqueness() {
  Sampler s(9);
  int supports = 0, checks = 0, counter = 0;
  CheckOptions opt;
  opt.compute_alpha = false;
  opt.compute_kappa = false;
  for (int t = 0; t < 120; ++t) {
    const Index n = s.integer(3, 7), m = s.integer(std::max<Index>(1, n - 3), n - 1);
    const Matrix A = s.normal_mat(m, n);
    const Vector pick = s.sparse(n, s.integer(1, std::min<Index>(3, m)));
    std::vector<Index> I;
    for (Index i = 0; i < n; ++i)
      if (pick(i) != 0) I.push_back(i);
    if (nsp_constant(A, I) >= 0.5) continue;
    ++supports;
    for (unsigned mask = 0; mask < (1u << I.size()); ++mask) {
      Vector x0 = Vector::Zero(n);
      for (std::size_t j = 0; j < I.size(); ++j) x0(I[j]) = ((mask >> j) & 1 ? -1.0 : 1.0) * s.uniform(0.2, 2.0);
      ++checks;
      counter += check_unique(Gauge::l1(n), A, x0, default_config(), opt).is_unique != Verdict::Yes;
    }
  }
  return {supports >= 20 && counter == 0, std::to_string(supports) + " supports below 1/2, " + std::to_string(checks) +
                                              " sign patterns, " + std::to_string(counter) + " counterexamples"};
}

Outcome prox_polar_invariants() {
  Sampler s(10);
  double prox_err = 0, polar_err = 0;
  for (int t = 0; t < 12; ++t) {
    const Index n = s.integer(2, 4);
    Vector w = s.normal_vec(n).cwiseAbs().array() + 0.1;
    std::sort(w.data(), w.data() + n, std::greater<double>());
    const Gauge J = Gauge::wsl1(w);
    const Vector x = 2.0 * s.normal_vec(n);
    const double tau = s.uniform(0.1, 1.0);
    const double r = tau * w(0) + 0.1;
    const Vector grid = testutil::grid_minimise(
        [&](const Vector& u) { return 0.5 * (u - x).squaredNorm() + tau * eval(J, u); },
        x.array() - r, x.array() + r, 9, 1e-6);
    prox_err = std::max(prox_err, (prox(J, x, tau) - grid).cwiseAbs().maxCoeff());
    // Polar: the ratio <z, u> / J(u) over a box grid that contains every unit-ball vertex direction.
    const Vector z = s.normal_vec(n);
    double best = 0;
    std::vector<int> c(static_cast<std::size_t>(n), 0);
    for (;;) {
      Vector u(n);
      for (Index i = 0; i < n; ++i) u(i) = -1.0 + 0.5 * c[static_cast<std::size_t>(i)];
      if (u.norm() > 0) best = std::max(best, z.dot(u) / eval(J, u));
      Index i = 0;
      while (i < n && ++c[static_cast<std::size_t>(i)] == 5) c[static_cast<std::size_t>(i++)] = 0;
      if (i == n) break;
    }
    polar_err = std::max(polar_err, std::abs(polar_eval(J, z) - best));
  }

  // Invariants on random samples across all gauges.
  int samples = 0, bad = 0;
  Matrix Dt = s.normal_mat(4, 4);
  const Gauge gauges[] = {Gauge::l1(4),
                          Gauge::nonneg_l1(4),
                          Gauge::analysis_l1(Dt),
                          Gauge::wsl1(vec_of({3, 2, 2, 1})),
                          Gauge::group_l12({{0, 1}, {2, 3}}, 4),
                          Gauge::nuclear(2, 2),
                          Gauge::sdp_trace(Matrix::Identity(2, 2))};
  while (samples < 10000) {
    for (const Gauge& J : gauges) {
      Vector x = s.normal_vec(4);
      if (J.kind == GaugeKind::NonnegL1) x = x.cwiseAbs();
      if (J.kind == GaugeKind::SdpTrace) {
        const Matrix G = unvec(x, 2, 2);
        x = vec(G * G.transpose());
      }
      if (samples % 3 == 0 && J.kind != GaugeKind::SdpTrace) x(samples % 4) = 0;  // faces off the generic stratum
      const Vector z = s.normal_vec(4);
      const double tscale = s.uniform(0.1, 10.0);
      const double Jx = eval(J, x);
      bad += std::abs(eval(J, tscale * x) - tscale * Jx) > 1e-9 * (1 + tscale * Jx);
      const double pz = polar_eval(J, z);
      if (std::isfinite(pz)) bad += z.dot(x) > pz * Jx + 1e-9 * (1 + std::abs(pz * Jx));
      const SubdiffFace F = subdiff_face(J, x);
      bad += std::abs(F.base.dot(x) - Jx) > 1e-8 * (1 + Jx);
      bad += polar_eval(J, F.base) > 1 + 1e-8;
      ++samples;
    }
  }
  std::ostringstream os;
  os << "WSL1 prox error " << format_double(prox_err) << ", polar error " << format_double(polar_err) << "; "
     << samples << " invariant samples, " << bad << " violations";
  return {prox_err <= 1e-3 && polar_err <= 1e-3 && bad == 0, os.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("gaugecert_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = GAUGECERT_CLI, data = GAUGECERT_DATA_DIR;
  auto run = [&](int k) {
    const std::string tag = std::to_string(k);
    const std::string cmds[] = {
        cli + " certify " + data + "/l1_random.json --seed 7 --json > " + (dir / ("cert" + tag)).string(),
        cli + " certify " + data + "/nuclear.json --json > " + (dir / ("nuc" + tag)).string(),
        cli + " recover " + data + "/l1_random.json --seeds 0-3 --c1 0.1,1 --csv " +
            (dir / ("rec" + tag + ".csv")).string() + " --json > " + (dir / ("rec" + tag + ".json")).string(),
        cli + " recover " + data + "/e1.json --seeds 0-2 --csv " + (dir / ("e1" + tag + ".csv")).string() +
            " > /dev/null"};
    int worst = 0;
    for (const std::string& c : cmds) worst = std::max(worst, std::system(c.c_str()) == -1 ? 99 : 0);
    return worst;
  };
  const int a = run(1), b = run(2);
  int same = 0, total = 0;
  for (const char* f : {"cert", "nuc", "rec", "e1"}) {
    for (const char* ext : {"", ".csv", ".json"}) {
      const fs::path p1 = dir / (std::string(f) + "1" + ext), p2 = dir / (std::string(f) + "2" + ext);
      if (!fs::exists(p1)) continue;
      ++total;
      const std::string s1 = slurp(p1);
      same += !s1.empty() && s1 == slurp(p2);
    }
  }
  fs::remove_all(dir);
  return {a == 0 && b == 0 && total == 5 && same == total,
          std::to_string(same) + "/" + std::to_string(total) + " outputs byte-identical across two runs"};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"strong duality", strong_duality},
      {"uniqueness oracle agreement", uniqueness_oracle},
      {"worked instances", worked_instances},
      {"sharpness growth and ball inclusion", growth_oracle},
      {"robust recovery bounds", robust_recovery},
      {"polyhedral sharp iff unique", polyhedral_equivalence},
      {"reductions between checks", reductions},
      {"non-polyhedral separation", non_polyhedral_separation},
      {"null space property implies uniqueness", nsp_uniqueness},
      {"prox, polar and gauge invariants", prox_polar_invariants},
      {"CLI determinism", cli_determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s %2d %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", k - failed, k);
  return failed ? 1 : 0;
}
