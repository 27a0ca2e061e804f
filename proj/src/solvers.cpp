#include "gaugecert/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gaugecert/lp.hpp"
#include "lp_models.hpp"

namespace gaugecert {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
  }
  return "?";
}

namespace {

void check_dims(const Gauge& J, const Matrix& A, const Vector& b) {
  if (A.cols() != J.n) throw std::invalid_argument("operator column count does not match the gauge dimension");
  if (A.rows() != b.size()) throw std::invalid_argument("operator row count does not match the data");
}

LpOptions lp_options(const Config& cfg) {
  LpOptions o;
  o.max_iter = cfg.lim.lp_max_iter;
  o.variable_cap = cfg.lim.lp_variable_cap;
  o.kkt_tol = cfg.tol.lp_kkt;
  return o;
}

Vector unit_row(Index size, Index i, double v) {
  Vector r = Vector::Zero(size);
  r(i) = v;
  return r;
}

SolveResult from_lp(const LpResult& r, const Gauge& J, const Matrix& A, const Vector& b, Index n,
                    const Config& cfg, const char* method) {
  SolveResult out;
  out.method = method;
  out.iterations = r.iterations;
  if (r.status == LpStatus::Infeasible) {
    out.status = SolveStatus::Infeasible;
    return out;
  }
  if (r.status == LpStatus::Unbounded) throw LpError("unexpected unbounded LP");
  out.point = r.x.head(n);
  out.value = eval(J, out.point, cfg.tol);
  out.feasibility_residual = (A * out.point - b).norm();
  out.optimality_residual = r.kkt_residual;
  return out;
}

SolveResult primal_lp(const Gauge& J, const Matrix& A, const Vector& b, const Config& cfg) {
  const Index n = J.n, na = detail::gauge_epigraph_size(J);
  LpProblem lp(n + na);
  lp.c = detail::add_gauge_epigraph(lp, J, 0, n);
  Matrix Ae = Matrix::Zero(A.rows(), n + na);
  Ae.leftCols(n) = A;
  lp.add_eq_rows(Ae, b);
  return from_lp(lp_solve(lp, lp_options(cfg)), J, A, b, n, cfg, "lp");
}

SolveResult dual_lp(const Gauge& J, const Matrix& A, const Vector& b, const Config& cfg) {
  const Index m = A.rows(), n = J.n;
  const LpOptions opt = lp_options(cfg);
  const Matrix At = A.transpose();
  LpResult r;
  switch (J.kind) {
    case GaugeKind::L1: {
      LpProblem lp(m);
      lp.c = -b;
      lp.add_le_rows(At, Vector::Ones(n));
      lp.add_le_rows(-At, Vector::Ones(n));
      r = lp_solve(lp, opt);
      break;
    }
    case GaugeKind::NonnegL1: {
      LpProblem lp(m);
      lp.c = -b;
      lp.add_le_rows(At, Vector::Ones(n));
      r = lp_solve(lp, opt);
      break;
    }
    case GaugeKind::AnalysisL1: {
      // A'y = Dt' u with |u| <= 1.
      const Index p = J.Dt.rows();
      LpProblem lp(m + p);
      lp.c.head(m) = -b;
      Matrix Eq(n, m + p);
      Eq << At, -J.Dt.transpose();
      lp.add_eq_rows(Eq, Vector::Zero(n));
      for (Index i = 0; i < p; ++i) {
        lp.add_le(unit_row(m + p, m + i, 1.0), 1.0);
        lp.add_le(unit_row(m + p, m + i, -1.0), 1.0);
      }
      r = lp_solve(lp, opt);
      break;
    }
    case GaugeKind::WSL1: {
      // v >= |A'y| and T_k(v) <= W_k for each k.
      const Index nv = m + n + n * (1 + n);
      LpProblem lp(nv);
      lp.c.head(m) = -b;
      lp.nonneg.assign(static_cast<size_t>(nv), false);
      for (Index i = 0; i < n; ++i) {
        Vector row = Vector::Zero(nv);
        row.head(m) = At.row(i).transpose();
        row(m + i) = -1.0;
        lp.add_le(row, 0.0);
        row.head(m) = -At.row(i).transpose();
        lp.add_le(row, 0.0);
      }
      double W = 0.0;
      for (Index k = 0; k < n; ++k) {
        W += J.w(k);
        const Index rr = m + n + k * (1 + n), q = rr + 1;
        Vector bound = Vector::Zero(nv);
        bound(rr) = static_cast<double>(k + 1);
        for (Index i = 0; i < n; ++i) {
          lp.nonneg[static_cast<size_t>(q + i)] = true;
          bound(q + i) = 1.0;
          Vector row = Vector::Zero(nv);
          row(m + i) = 1.0;
          row(rr) = -1.0;
          row(q + i) = -1.0;
          lp.add_le(row, 0.0);
        }
        lp.add_le(bound, W);
      }
      r = lp_solve(lp, opt);
      break;
    }
    default: throw std::logic_error("dual LP requested for a non-polyhedral gauge");
  }
  SolveResult out;
  out.method = "lp";
  out.iterations = r.iterations;
  if (r.status != LpStatus::Optimal) throw LpError("dual LP failed although y = 0 is feasible");
  out.point = r.x.head(m);
  out.value = b.dot(out.point);
  out.optimality_residual = r.kkt_residual;
  out.feasibility_residual = std::max(0.0, polar_eval(J, At * out.point, cfg.tol) - 1.0);
  return out;
}

// Douglas-Rachford on J + indicator{A x = b}. Returns the primal point and the
// multiplier recovered from the fixed point.
SolveResult douglas_rachford(const Gauge& J, const Matrix& A, const Vector& b, const Config& cfg) {
  const Matrix Ap = pseudo_inverse(A);
  auto project = [&](const Vector& z) { return Vector(z - Ap * (A * z - b)); };
  const double gamma = 1.0;
  Vector z = Ap * b, x = z, y = z;
  SolveResult out;
  out.method = "douglas_rachford";
  out.status = SolveStatus::MaxIter;
  for (std::size_t it = 0; it < cfg.lim.splitting_max_iter; ++it) {
    x = project(z);
    y = prox(J, 2.0 * x - z, gamma);
    const Vector step = y - x;
    z += step;
    out.iterations = it + 1;
    if (step.norm() <= 1e-10 * (1.0 + x.norm()) && (A * y - b).norm() <= 1e-9 * (1.0 + b.norm())) {
      out.status = SolveStatus::Optimal;
      break;
    }
  }
  const double jx = eval(J, x, cfg.tol);
  out.point = std::isfinite(jx) ? x : y;
  out.value = eval(J, out.point, cfg.tol);
  out.feasibility_residual = (A * out.point - b).norm();
  out.optimality_residual = (y - x).norm();
  if (out.status == SolveStatus::Optimal && out.feasibility_residual > 1e-8 * (1.0 + b.norm()))
    out.status = SolveStatus::MaxIter;
  // (x - z)/gamma lies in dJ(y) and in Im A'.
  const Vector v = (x - z) / gamma;
  out.multiplier = Ap.transpose() * v;
  return out;
}

bool in_range(const Matrix& A, const Vector& b) {
  const Matrix Ap = pseudo_inverse(A);
  return (A * (Ap * b) - b).norm() <= 1e-9 * (1.0 + b.norm());
}

double tikhonov_objective(const Gauge& J, const Matrix& A, const Vector& b, double mu, const Vector& x,
                          const Tolerances& tol) {
  return 0.5 * (A * x - b).squaredNorm() + mu * eval(J, x, tol);
}

// Exact Tikhonov solution on the support found by the iterative solve, for
// gauges whose optimality system is linear once signs are fixed.
std::optional<Vector> polish_support(const Gauge& J, const Matrix& A, const Vector& b, double mu,
                                     const Vector& x) {
  if (J.kind != GaugeKind::L1 && J.kind != GaugeKind::NonnegL1) return std::nullopt;
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  std::vector<Index> S;
  for (Index i = 0; i < x.size(); ++i)
    if (std::abs(x(i)) > 1e-9 * scale) S.push_back(i);
  Vector s(static_cast<Index>(S.size()));
  for (size_t j = 0; j < S.size(); ++j) s(static_cast<Index>(j)) = J.kind == GaugeKind::L1 ? sign0(x(S[j])) : 1.0;
  const Matrix AS = select_columns(A, S);
  Vector xs = Vector::Zero(0);
  if (!S.empty()) {
    if (!full_column_rank(AS, 1e-10)) return std::nullopt;
    const Matrix G = AS.transpose() * AS;
    xs = G.ldlt().solve(AS.transpose() * b - mu * s);
    for (size_t j = 0; j < S.size(); ++j)
      if (xs(static_cast<Index>(j)) * s(static_cast<Index>(j)) <= 0) return std::nullopt;
  }
  Vector out = Vector::Zero(x.size());
  for (size_t j = 0; j < S.size(); ++j) out(S[j]) = xs(static_cast<Index>(j));
  const Vector c = A.transpose() * (b - A * out);
  std::vector<bool> on(static_cast<size_t>(x.size()), false);
  for (Index i : S) on[static_cast<size_t>(i)] = true;
  for (Index i = 0; i < x.size(); ++i) {
    if (on[static_cast<size_t>(i)]) continue;
    const double ci = J.kind == GaugeKind::L1 ? std::abs(c(i)) : c(i);
    if (ci > mu * (1.0 + 1e-9)) return std::nullopt;
  }
  return out;
}

}  // namespace

SolveResult solve_primal_eq(const Gauge& J, const Matrix& A, const Vector& b0, const Config& cfg) {
  check_dims(J, A, b0);
  if (b0.size() == 0 || b0.cwiseAbs().maxCoeff() == 0.0) {
    SolveResult out;
    out.point = Vector::Zero(J.n);
    out.value = 0.0;
    out.method = "zero";
    out.multiplier = Vector::Zero(A.rows());
    return out;
  }
  if (J.polyhedral()) return primal_lp(J, A, b0, cfg);
  if (!in_range(A, b0)) {
    SolveResult out;
    out.status = SolveStatus::Infeasible;
    out.method = "douglas_rachford";
    return out;
  }
  return douglas_rachford(J, A, b0, cfg);
}

SolveResult solve_dual(const Gauge& J, const Matrix& A, const Vector& b0, const Config& cfg) {
  check_dims(J, A, b0);
  if (b0.size() == 0 || b0.cwiseAbs().maxCoeff() == 0.0) {
    SolveResult out;
    out.point = Vector::Zero(A.rows());
    out.value = 0.0;
    out.method = "zero";
    return out;
  }
  if (J.polyhedral()) return dual_lp(J, A, b0, cfg);
  // Non-polyhedral: the multiplier of the primal splitting, scaled into the
  // dual feasible set.
  SolveResult p = solve_primal_eq(J, A, b0, cfg);
  SolveResult out;
  out.method = "douglas_rachford_multiplier";
  out.iterations = p.iterations;
  out.status = p.status;
  if (p.status == SolveStatus::Infeasible || p.multiplier.size() == 0) {
    out.point = Vector::Zero(A.rows());
    out.value = 0.0;
    return out;
  }
  Vector y = p.multiplier;
  const double pol = polar_eval(J, A.transpose() * y, cfg.tol);
  if (!std::isfinite(pol)) {
    y.setZero();
  } else if (pol > 1.0) {
    y /= pol;
  }
  out.point = y;
  out.value = b0.dot(y);
  out.feasibility_residual = 0.0;
  out.optimality_residual = std::abs(p.value - out.value);
  return out;
}

SolveResult solve_tikhonov(const Gauge& J, const Matrix& A, const Vector& b, double mu, const Config& cfg,
                           const Vector* warm) {
  check_dims(J, A, b);
  if (!(mu > 0)) throw std::invalid_argument("Tikhonov parameter must be positive");
  SolveResult out;
  out.method = "fista";
  out.mu = mu;
  const Index n = J.n;
  const double L = std::pow(sigma_max(A), 2);
  // Zero is optimal once J°(A'b) <= mu.
  const double pol = polar_eval(J, A.transpose() * b, cfg.tol);
  if (L == 0.0 || pol <= mu) {
    out.point = Vector::Zero(n);
    out.value = 0.5 * b.squaredNorm();
    out.feasibility_residual = b.norm();
    out.method = "zero_threshold";
    return out;
  }
  const double t = 1.0 / L;
  Vector x = warm && warm->size() == n && std::isfinite(eval(J, *warm, cfg.tol)) ? *warm : Vector(Vector::Zero(n));
  Vector y = x;
  double theta = 1.0;
  double F = tikhonov_objective(J, A, b, mu, x, cfg.tol);
  const std::size_t max_iter = cfg.lim.splitting_max_iter;
  out.status = SolveStatus::MaxIter;
  for (std::size_t it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    const Vector xn = prox(J, y - t * (A.transpose() * (A * y - b)), mu * t);
    const double Fn = tikhonov_objective(J, A, b, mu, xn, cfg.tol);
    if (Fn > F) {
      // Function-value restart.
      if (y == x) break;
      y = x;
      theta = 1.0;
      continue;
    }
    const double thn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const double move = (xn - x).norm();
    y = xn + ((theta - 1.0) / thn) * (xn - x);
    theta = thn;
    const double dec = F - Fn;
    x = xn;
    F = Fn;
    if (dec <= 1e-12 * std::max(1.0, std::abs(F)) && move <= 1e-10 * (1.0 + x.norm())) {
      out.status = SolveStatus::Optimal;
      break;
    }
  }
  if (auto p = polish_support(J, A, b, mu, x)) {
    const double Fp = tikhonov_objective(J, A, b, mu, *p, cfg.tol);
    if (Fp <= F + 1e-12 * std::max(1.0, std::abs(F))) {
      x = *p;
      F = Fp;
      out.method = "fista_support_polish";
    }
  }
  out.point = x;
  out.value = F;
  out.feasibility_residual = (A * x - b).norm();
  // Prox-gradient fixed-point residual.
  const Vector xp = prox(J, x - t * (A.transpose() * (A * x - b)), mu * t);
  out.optimality_residual = (xp - x).norm() / t;
  if (out.optimality_residual <= 1e-6 * (1.0 + b.norm())) out.status = SolveStatus::Optimal;
  return out;
}

SolveResult solve_mozorov(const Gauge& J, const Matrix& A, const Vector& b, double delta, const Config& cfg) {
  check_dims(J, A, b);
  if (!(delta >= 0)) throw std::invalid_argument("noise level must be nonnegative");
  const Index n = J.n;
  SolveResult out;
  out.method = "mozorov_bisection";
  if (b.norm() <= delta) {
    out.point = Vector::Zero(n);
    out.value = 0.0;
    out.feasibility_residual = b.norm();
    out.method = "zero_feasible";
    return out;
  }
  if (delta == 0.0) return solve_primal_eq(J, A, b, cfg);
  const Matrix Ap = pseudo_inverse(A);
  const double dist = (A * (Ap * b) - b).norm();
  if (delta < dist * (1.0 - 1e-12)) {
    out.status = SolveStatus::Infeasible;
    return out;
  }

  double mu_hi = polar_eval(J, A.transpose() * b, cfg.tol);
  Vector x_hi = Vector::Zero(n);
  double r_hi = b.norm();
  std::vector<std::pair<double, double>> path;
  auto residual_at = [&](double mu, Vector& x, SolveResult& tik) {
    tik = solve_tikhonov(J, A, b, mu, cfg, &x);
    x = tik.point;
    const double r = tik.feasibility_residual;
    for (const auto& [m2, r2] : path)
      if ((m2 < mu && r2 > r + 1e-8 * (1.0 + r)) || (m2 > mu && r2 < r - 1e-8 * (1.0 + r)))
        out.residual_monotone = false;
    path.emplace_back(mu, r);
    return r;
  };
  SolveResult tik;
  if (!std::isfinite(mu_hi)) {
    // Zero is never a Tikhonov solution: grow mu until the residual reaches delta.
    mu_hi = 1.0 + (A.transpose() * b).norm();
    Vector x = Vector::Zero(n);
    for (int k = 0; k < 60; ++k) {
      r_hi = residual_at(mu_hi, x, tik);
      x_hi = x;
      if (r_hi >= delta) break;
      mu_hi *= 4.0;
    }
    if (r_hi < delta) {
      // The constraint stays inactive: min J is reached inside the ball.
      out.point = x_hi;
      out.value = eval(J, x_hi, cfg.tol);
      out.feasibility_residual = r_hi;
      out.mu = mu_hi;
      out.iterations = tik.iterations;
      return out;
    }
  }
  double mu_lo = mu_hi * 1e-12;
  Vector x_lo = Vector::Zero(n);
  double r_lo = residual_at(mu_lo, x_lo, tik);
  std::size_t iters = tik.iterations;
  bool tik_ok = tik.status == SolveStatus::Optimal;
  if (r_lo > delta) {
    // delta is below the reachable residual range.
    out.point = x_lo;
    out.value = eval(J, x_lo, cfg.tol);
    out.feasibility_residual = r_lo;
    out.mu = mu_lo;
    out.iterations = iters;
    out.status = r_lo - delta <= 1e-6 ? SolveStatus::Optimal : SolveStatus::MaxIter;
    return out;
  }
  // Bisection in log(mu) keeping r(mu_lo) < delta <= r(mu_hi); stop once the
  // upper residual is within a tight band above delta.
  const double band = 1e-10 * (1.0 + delta);
  Vector x = x_lo;
  for (int it = 0; it < 200 && r_hi - delta > band; ++it) {
    const double mid = std::sqrt(mu_lo * mu_hi);
    if (!(mid > mu_lo && mid < mu_hi)) break;
    const double r = residual_at(mid, x, tik);
    iters += tik.iterations;
    if (r >= delta) {
      mu_hi = mid;
      r_hi = r;
      x_hi = x;
      tik_ok = tik.status == SolveStatus::Optimal;
    } else {
      mu_lo = mid;
      r_lo = r;
    }
  }
  out.point = x_hi;
  out.value = eval(J, x_hi, cfg.tol);
  out.feasibility_residual = r_hi;
  out.optimality_residual = r_hi - delta;
  out.mu = mu_hi;
  out.iterations = iters;
  out.status = (r_hi - delta <= 1e-6 && tik_ok) ? SolveStatus::Optimal : SolveStatus::MaxIter;
  return out;
}

DualityGap duality_gap(const Gauge& J, const Matrix& A, const Vector& b0, const Config& cfg) {
  DualityGap g;
  g.primal_solve = solve_primal_eq(J, A, b0, cfg);
  if (g.primal_solve.status == SolveStatus::Infeasible) throw std::invalid_argument("primal problem is infeasible");
  g.dual_solve = solve_dual(J, A, b0, cfg);
  g.primal = g.primal_solve.value;
  g.dual = g.dual_solve.value;
  g.gap = g.primal - g.dual;
  return g;
}

}  // namespace gaugecert
