#include "gaugecert/cone.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <functional>
#include <set>
#include <string>

#include "gaugecert/convex.hpp"
#include "gaugecert/lp.hpp"

namespace gaugecert {

const char* to_string(ProbeMethod m) {
  switch (m) {
    case ProbeMethod::ExactPL: return "exact_pl";
    case ProbeMethod::AngularGrid: return "angular_grid";
    case ProbeMethod::MultistartSubgradient: return "multistart_subgradient";
    case ProbeMethod::LPLifted: return "lp_lifted";
  }
  return "?";
}

LiftedCone lift_sublevel(const PiecewiseLinear& f) {
  const Index n = f.dim(), na = f.abs_rows.rows(), nb = f.max_rows.rows(), nc = f.cone_rows.rows();
  const Index nu = na + (nb > 0 ? 1 : 0);
  const Index rows = 2 * na + nb + nc + 1;
  LiftedCone C{Matrix::Zero(rows, n), Matrix::Zero(rows, nu)};
  Index r = 0;
  for (Index i = 0; i < na; ++i) {
    C.Gh.row(r) = f.abs_rows.row(i);
    C.Gu(r++, i) = -1.0;
    C.Gh.row(r) = -f.abs_rows.row(i);
    C.Gu(r++, i) = -1.0;
  }
  for (Index j = 0; j < nb; ++j) {
    C.Gh.row(r) = f.max_rows.row(j);
    C.Gu(r++, na) = -1.0;
  }
  for (Index l = 0; l < nc; ++l) C.Gh.row(r++) = f.cone_rows.row(l);
  C.Gh.row(r) = f.g.transpose();
  C.Gu.row(r).setOnes();
  return C;
}

namespace {

// A nonzero t with K t in C, normalised to max|t_i| = 1, if one exists.
std::optional<Vector> cone_member(const LiftedCone& C, const Matrix& K, const Config& cfg) {
  const Index k = K.cols(), nu = C.Gu.cols();
  if (k == 0) return std::nullopt;
  LpOptions opt;
  opt.max_iter = cfg.lim.lp_max_iter;
  opt.variable_cap = cfg.lim.lp_variable_cap;
  LpProblem lp(k + nu);
  Matrix rows(C.Gh.rows(), k + nu);
  rows << C.Gh * K, C.Gu;
  lp.add_le_rows(rows, Vector::Zero(rows.rows()));
  for (Index i = 0; i < k; ++i) {
    Vector r = Vector::Zero(k + nu);
    r(i) = 1.0;
    lp.add_le(r, 1.0);
    r(i) = -1.0;
    lp.add_le(r, 1.0);
  }
  for (Index i = 0; i < k; ++i)
    for (double s : {1.0, -1.0}) {
      lp.c.setZero();
      lp.c(i) = -s;
      const LpResult res = lp_solve(lp, opt);
      if (res.status != LpStatus::Optimal) throw LpError("cone triviality LP failed");
      if (-res.value > 1e-7) return Vector(res.x.head(k));
    }
  return std::nullopt;
}

double row_scale(const PiecewiseLinear& f) {
  double s = f.g.norm();
  for (const Matrix* M : {&f.abs_rows, &f.max_rows, &f.cone_rows})
    for (Index i = 0; i < M->rows(); ++i) s = std::max(s, M->row(i).norm());
  return 1.0 + s;
}

// LP over (t, u, s) minimising the lifted f over the box, plus extra cuts a't <= 1.
struct PlLp {
  LpProblem lp;
  Index k;
  explicit PlLp(const PiecewiseLinear& f) : lp(0), k(f.dim()) {
    const Index na = f.abs_rows.rows(), nb = f.max_rows.rows();
    const Index nu = na + (nb > 0 ? 1 : 0);
    lp = LpProblem(k + nu);
    lp.c.head(k) = f.g;
    lp.c.segment(k, na).setOnes();
    if (nb > 0) lp.c(k + na) = 1.0;
    LiftedCone C = lift_sublevel(f);
    Matrix rows(C.Gh.rows() - 1, k + nu);
    rows << C.Gh.topRows(C.Gh.rows() - 1), C.Gu.topRows(C.Gu.rows() - 1);
    lp.add_le_rows(rows, Vector::Zero(rows.rows()));
    for (Index i = 0; i < k; ++i) {
      Vector r = Vector::Zero(k + nu);
      r(i) = 1.0;
      lp.add_le(r, 1.0);
      r(i) = -1.0;
      lp.add_le(r, 1.0);
    }
  }
  void add_cut(const Vector& a) {
    Vector r = Vector::Zero(lp.num_vars());
    r.head(k) = a;
    lp.add_le(r, 1.0);
  }
};

std::optional<ConeProbeResult> exact_pl_sphere_min(const PiecewiseLinear& fk, const Matrix& K,
                                                   const Config& cfg) {
  const Index k = fk.dim();
  const double scale = row_scale(fk);
  ConeProbeResult res;
  res.method = ProbeMethod::ExactPL;
  LpOptions opt;
  opt.max_iter = cfg.lim.lp_max_iter;
  opt.variable_cap = cfg.lim.lp_variable_cap;

  PlLp master(fk);
  LpResult r = lp_solve(master.lp, opt);
  if (r.status != LpStatus::Optimal) throw LpError("sphere minimisation LP failed");

  if (r.value < -1e-10 * scale) {
    // Negative minimum: equals the minimum over the unit ball, a convex problem.
    // Cutting planes on the ball constraint give matching lower/upper bounds.
    double upper = kInf;
    Vector best;
    for (int it = 0; it < 2000; ++it) {
      const Vector t = r.x.head(k);
      const double nt = t.norm();
      const Vector u = t / nt;
      const double fu = fk(u);
      if (fu < upper) {
        upper = fu;
        best = u;
      }
      if (upper - r.value <= 1e-11 * scale || nt <= 1.0 + 1e-13) {
        res.certified = true;
        break;
      }
      master.add_cut(u);
      r = lp_solve(master.lp, opt);
      if (r.status != LpStatus::Optimal) throw LpError("sphere minimisation LP failed");
    }
    res.value = upper;
    res.minimizer = K * best;
    return res;
  }

  // Nonnegative minimum: attained on a ray of the hyperplane arrangement of f.
  std::vector<Vector> normals;
  auto push = [&](const Vector& v) {
    const double nv = v.norm();
    if (nv <= 1e-12 * scale) return;
    Vector u = v / nv;
    for (Index i = 0; i < u.size(); ++i)
      if (std::abs(u(i)) > 1e-12) {
        if (u(i) < 0) u = -u;
        break;
      }
    for (const Vector& w : normals)
      if ((w - u).cwiseAbs().maxCoeff() <= 1e-11) return;
    normals.push_back(u);
  };
  for (Index i = 0; i < fk.abs_rows.rows(); ++i) push(fk.abs_rows.row(i).transpose());
  for (Index i = 0; i < fk.cone_rows.rows(); ++i) push(fk.cone_rows.row(i).transpose());
  for (Index i = 0; i < fk.max_rows.rows(); ++i)
    for (Index j = i + 1; j < fk.max_rows.rows(); ++j)
      push((fk.max_rows.row(i) - fk.max_rows.row(j)).transpose());

  const Index nh = static_cast<Index>(normals.size());
  Matrix H(nh, k);
  for (Index i = 0; i < nh; ++i) H.row(i) = normals[static_cast<size_t>(i)].transpose();

  double best = kInf;
  Vector arg;
  auto consider = [&](const Vector& d) {
    for (double s : {1.0, -1.0}) {
      const Vector t = s * d;
      const double v = fk(t);
      if (v < best) {
        best = v;
        arg = t;
      }
    }
  };

  if (k == 1) {
    consider(Vector::Ones(1));
  } else if (numerical_rank(H, 1e-10) < k) {
    // f is linear on the common null space and nonnegative there, hence zero.
    const Matrix N = kernel_basis(H, 1e-10);
    consider(N.col(0));
  } else {
    // Count (k-1)-subsets before enumerating.
    double combos = 1.0;
    for (Index i = 0; i < k - 1; ++i) combos = combos * static_cast<double>(nh - i) / static_cast<double>(i + 1);
    if (combos > 2e5)
      return std::nullopt;
    std::vector<Index> pick(static_cast<size_t>(k - 1));
    for (Index i = 0; i < k - 1; ++i) pick[static_cast<size_t>(i)] = i;
    while (true) {
      Matrix S(k - 1, k);
      for (Index i = 0; i < k - 1; ++i) S.row(i) = H.row(pick[static_cast<size_t>(i)]);
      Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
      const Vector& sv = svd.singularValues();
      if (sv(k - 2) > 1e-10 * sv(0)) consider(svd.matrixV().col(k - 1));
      Index i = k - 2;
      while (i >= 0 && pick[static_cast<size_t>(i)] == nh - (k - 1) + i) --i;
      if (i < 0) break;
      ++pick[static_cast<size_t>(i)];
      for (Index j = i + 1; j < k - 1; ++j) pick[static_cast<size_t>(j)] = pick[static_cast<size_t>(j - 1)] + 1;
    }
  }
  res.value = best;
  res.minimizer = arg.size() ? Vector(K * arg) : Vector(K.col(0));
  res.certified = true;
  return res;
}

// Orthonormal basis of the tangent space of the unit sphere at t.
Matrix tangent_frame(const Vector& t) { return kernel_basis(t.transpose(), 1e-12); }

struct SphereEval {
  const ProbeFunction& f;
  const Matrix& K;
  double operator()(const Vector& t) const { return f.eval(K * t); }
};

// Shrinking local grids in the tangent plane around t0.
Vector refine_locally(const SphereEval& g, Vector t0, double radius, double final_radius, double& val) {
  const Index k = t0.size();
  if (k == 1) return t0;
  const int pts = 10;
  while (radius > final_radius) {
    const Matrix T = tangent_frame(t0);
    const Index d = T.cols();
    Vector best = t0;
    double bv = val;
    std::vector<int> c(static_cast<size_t>(d), -pts);
    while (true) {
      Vector off = Vector::Zero(k);
      for (Index i = 0; i < d; ++i) off += T.col(i) * (radius * c[static_cast<size_t>(i)] / pts);
      Vector t = t0 + off;
      t.normalize();
      const double v = g(t);
      if (v < bv) {
        bv = v;
        best = t;
      }
      Index i = 0;
      while (i < d && ++c[static_cast<size_t>(i)] > pts) c[static_cast<size_t>(i++)] = -pts;
      if (i == d) break;
    }
    // Recentre at the same radius while improving; shrink once stalled.
    if (bv < val) {
      t0 = best;
      val = bv;
    } else {
      radius *= 0.5;
    }
  }
  return t0;
}

// Pattern search on the sphere along tangent coordinates plus random tangent
// directions; the random directions keep it from stalling on ridges.
void polish(const SphereEval& g, Vector& t, double& v, double step, std::mt19937_64& gen) {
  auto normal = [&]() {
    const double u1 = 1.0 - static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
  };
  if (t.size() == 1) return;
  const Index budget = 400 * t.size();
  Index evals = 0;
  while (step > 1e-10 && evals < budget) {
    bool improved = false;
    const Matrix T = tangent_frame(t);
    const Index d = T.cols();
    for (Index j = 0; j < 3 * d && !improved; ++j) {
      Vector dir(d);
      if (j < d) {
        dir = Vector::Unit(d, j);
      } else {
        for (Index i = 0; i < d; ++i) dir(i) = normal();
        dir.normalize();
      }
      for (double s : {1.0, -1.0}) {
        Vector tn = t + s * step * (T * dir);
        tn.normalize();
        const double vn = g(tn);
        ++evals;
        if (vn < v) {
          v = vn;
          t = tn;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
  }
}

// A negative minimum over the sphere equals the minimum over the unit ball,
// a convex problem: Kelley cuts on f + L max(0, |t| - 1), which is exact for
// L >= -min f. Replaces (t, v) when it finds a lower sphere value.
void ball_polish(const ProbeFunction& f, const Matrix& K, Vector& t, double& v) {
  if (!(v < 0) || !f.subgrad || K.cols() < 3) return;
  const double L = 2.0 * std::abs(v) + 1.0;
  ConvexOracle F{[&](const Vector& q, Vector& g) {
    const Vector h = K * q;
    const double fv = f.eval(h);
    g = K.transpose() * f.subgrad(h);
    const double nq = q.norm();
    if (nq > 1.0) {
      g += L * q / nq;
      return fv + L * (nq - 1.0);
    }
    return fv;
  }};
  const CuttingPlaneResult r = cutting_plane_minimise(F, K.cols(), 1.0, 1e-11, 200);
  const double nq = r.point.norm();
  if (nq <= 1e-12) return;
  const Vector u = r.point / nq;
  const double fu = f.eval(K * u);
  if (fu < v) {
    v = fu;
    t = u;
  }
}

ConeProbeResult angular_grid(const ProbeFunction& f, const Matrix& K, const Config& cfg) {
  const Index k = K.cols();
  const double res = cfg.lim.grid_resolution;
  SphereEval g{f, K};
  // Keep the best few grid points as refinement seeds.
  const size_t keep = 8;
  std::vector<std::pair<double, Vector>> seeds;
  // Seeds are kept apart so that separate local minima each get refined.
  const double sep = 10.0 * res;
  auto offer = [&](const Vector& t) {
    const double v = g(t);
    if (!std::isfinite(v)) return;
    for (auto& sd : seeds)
      if ((sd.second - t).norm() < sep) {
        if (v < sd.first) {
          sd = {v, t};
          std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        }
        return;
      }
    if (seeds.size() < keep || v < seeds.back().first) {
      seeds.emplace_back(v, t);
      std::sort(seeds.begin(), seeds.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      if (seeds.size() > keep) seeds.pop_back();
    }
  };
  if (k == 1) {
    offer(Vector::Ones(1));
    offer(-Vector::Ones(1));
  } else if (k == 2) {
    const int N = static_cast<int>(std::ceil(2 * M_PI / res));
    for (int i = 0; i < N; ++i) {
      const double th = 2 * M_PI * i / N;
      offer((Vector(2) << std::cos(th), std::sin(th)).finished());
    }
  } else if (k == 3) {
    const int NT = static_cast<int>(std::ceil(M_PI / res));
    for (int i = 0; i <= NT; ++i) {
      const double th = M_PI * i / NT;
      const double st = std::sin(th);
      const int NP = std::max(1, static_cast<int>(std::ceil(2 * M_PI * st / res)));
      for (int j = 0; j < NP; ++j) {
        const double ph = 2 * M_PI * j / NP;
        offer((Vector(3) << st * std::cos(ph), st * std::sin(ph), std::cos(th)).finished());
      }
    }
  } else {
    throw std::invalid_argument("angular grid supports subspace dimension <= 3");
  }
  std::mt19937_64 gen(0x9e3779b97f4a7c15ULL);
  ConeProbeResult out;
  out.method = ProbeMethod::AngularGrid;
  out.certified = true;
  if (seeds.empty()) {
    out.value = kInf;
    out.minimizer = K.col(0);
    return out;
  }
  for (auto& [v, t] : seeds) {
    double val = v;
    Vector r = refine_locally(g, t, 2.0 * res, std::min(cfg.lim.grid_refine, 1e-9), val);
    polish(g, r, val, res, gen);
    ball_polish(f, K, r, val);
    if (val < out.value) {
      out.value = val;
      out.minimizer = K * r;
    }
  }
  return out;
}

ConeProbeResult multistart(const ProbeFunction& f, const Matrix& K, const Config& cfg) {
  const Index k = K.cols();
  SphereEval g{f, K};
  std::mt19937_64 gen(0x5eedULL + static_cast<std::uint64_t>(k));
  auto normal = [&]() {
    const double u1 = 1.0 - static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
  };
  ConeProbeResult out;
  out.method = ProbeMethod::MultistartSubgradient;
  out.certified = false;
  for (std::size_t rs = 0; rs < cfg.lim.multistart_restarts; ++rs) {
    Vector t(k);
    double v = kInf;
    for (int attempt = 0; attempt < 50 && !std::isfinite(v); ++attempt) {
      for (Index i = 0; i < k; ++i) t(i) = normal();
      t.normalize();
      v = g(t);
    }
    if (!std::isfinite(v)) continue;
    if (f.subgrad) {
      for (int it = 0; it < 100; ++it) {
        Vector s = K.transpose() * f.subgrad(K * t);
        s -= s.dot(t) * t;
        if (s.norm() < 1e-14) break;
        Vector tn = t - (0.2 / std::sqrt(it + 1.0)) * s / s.norm();
        tn.normalize();
        const double vn = g(tn);
        if (vn < v) {
          v = vn;
          t = tn;
        }
      }
    }
    polish(g, t, v, 0.1, gen);
    ++out.restarts_used;
    if (v < out.value) {
      out.value = v;
      out.minimizer = K * t;
    }
  }
  if (out.minimizer.size() == 0) out.minimizer = K.col(0);
  return out;
}

}  // namespace

bool cone_trivial(const LiftedCone& C, const Matrix& K, const Config& cfg) {
  return !cone_member(C, K, cfg).has_value();
}

ProbeFunction ProbeFunction::from_pl(const PiecewiseLinear& f) {
  ProbeFunction p;
  p.pl = f;
  p.eval = [f](const Vector& h) { return f(h); };
  p.subgrad = [f](const Vector& h) {
    Vector s = f.g;
    for (Index i = 0; i < f.abs_rows.rows(); ++i)
      s += sign0(f.abs_rows.row(i).dot(h)) * f.abs_rows.row(i).transpose();
    if (f.max_rows.rows()) {
      Index j = 0;
      (f.max_rows * h).maxCoeff(&j);
      s += f.max_rows.row(j).transpose();
    }
    return s;
  };
  return p;
}

ProbeFunction ProbeFunction::dir_deriv_of(const Gauge& J, const Vector& x0, const Config& cfg) {
  ProbeFunction p;
  if (auto pl = dir_deriv_pl(J, x0, cfg)) return from_pl(*pl);
  const Tolerances tol = cfg.tol;
  switch (J.kind) {
    case GaugeKind::Nuclear: {
      const SvdFrame fr = svd_frame(unvec(x0, J.rows, J.cols), tol.rank_rel);
      const Index r = J.rows, c = J.cols;
      p.eval = [fr, r, c](const Vector& h) {
        const Matrix H = unvec(h, r, c);
        const double lin = (fr.U1.transpose() * H * fr.V1).trace();
        const Matrix B = fr.U2.transpose() * H * fr.V2;
        if (B.size() == 0) return lin;
        if (B.size() == 1) return lin + std::abs(B(0, 0));
        Eigen::JacobiSVD<Matrix> svd(B);
        return lin + svd.singularValues().sum();
      };
      p.subgrad = [fr, r, c](const Vector& h) {
        const Matrix H = unvec(h, r, c);
        Matrix G = fr.U1 * fr.V1.transpose();
        const Matrix B = fr.U2.transpose() * H * fr.V2;
        if (B.size()) {
          Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
          G += fr.U2 * svd.matrixU() * svd.matrixV().transpose() * fr.V2.transpose();
        }
        return vec(G);
      };
      return p;
    }
    case GaugeKind::GroupL12: {
      const Gauge Jc = J;
      const Vector xc = x0;
      p.eval = [Jc, xc, tol](const Vector& h) { return dir_deriv(Jc, xc, h, tol); };
      const double scale = x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0;
      p.subgrad = [Jc, xc, tol, scale](const Vector& h) {
        Vector s = Vector::Zero(h.size());
        for (const auto& g : Jc.groups) {
          const Vector xg = select(xc, g), hg = select(h, g);
          const double nx = xg.norm(), nh = hg.norm();
          const Vector sg = nx > tol.support_rel * scale ? Vector(xg / nx)
                            : nh > 0 ? Vector(hg / nh) : Vector(Vector::Zero(hg.size()));
          for (size_t i = 0; i < g.size(); ++i) s(g[i]) = sg(static_cast<Index>(i));
        }
        return s;
      };
      return p;
    }
    case GaugeKind::SdpTrace: {
      const PsdFrame fr = psd_frame(unvec(x0, J.rows, J.cols), tol.rank_rel);
      const Matrix C = J.C;
      const Index n = J.rows;
      const double psd_rel = tol.psd_rel;
      p.eval = [fr, C, n, psd_rel](const Vector& h) {
        const Matrix H = unvec(h, n, n);
        if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + H.cwiseAbs().maxCoeff())) return kInf;
        if (fr.E.cols()) {
          const Matrix B = fr.E.transpose() * sym(H) * fr.E;
          const double lmin = B.size() == 1 ? B(0, 0) : Eigen::SelfAdjointEigenSolver<Matrix>(B).eigenvalues()(0);
          if (lmin < -psd_rel * std::max(1.0, H.cwiseAbs().maxCoeff())) return kInf;
        }
        return (C.array() * H.array()).sum();
      };
      return p;
    }
    default: {
      const Gauge Jc = J;
      const Vector xc = x0;
      p.eval = [Jc, xc, tol](const Vector& h) { return dir_deriv(Jc, xc, h, tol); };
      return p;
    }
  }
}

ConeProbeResult sphere_min(const ProbeFunction& f, const Matrix& K, const Config& cfg) {
  if (K.cols() == 0) throw std::invalid_argument("sphere_min requires a nontrivial subspace");
  if (f.pl) {
    if (auto r = exact_pl_sphere_min(f.pl->restrict(K), K, cfg)) return *r;
  }
  if (K.cols() <= 3) return angular_grid(f, K, cfg);
  return multistart(f, K, cfg);
}

namespace {

// Exact minimum of ||A h||^2 over unit h in a polyhedral cone {f <= 0}: the
// minimiser is an eigenvector of A'A compressed to the span of some face.
std::optional<ConeProbeResult> exact_conic_singular(const Matrix& A, const PiecewiseLinear& f,
                                                    const Config& cfg) {
  const Index n = f.dim();
  const Index na = f.abs_rows.rows(), nb = f.max_rows.rows(), nc = f.cone_rows.rows();
  const double pieces = std::pow(2.0, static_cast<double>(na)) * static_cast<double>(std::max<Index>(nb, 1));
  const Index rows_per_piece = na + (nb > 0 ? nb - 1 : 0) + nc + 1;
  if (pieces > static_cast<double>(cfg.lim.pl_piece_cap) ||
      pieces * std::pow(2.0, static_cast<double>(std::min<Index>(rows_per_piece, n))) > 4e6)
    return std::nullopt;

  const Matrix AtA = A.transpose() * A;
  const LiftedCone lifted = lift_sublevel(f);
  const double mtol = 1e-9 * row_scale(f);
  double best = kInf;
  Vector arg;
  std::set<std::vector<long long>> seen;

  auto visit_subspace = [&](const Matrix& Q) {
    // Canonical key: rounded projector.
    const Matrix P = Q * Q.transpose();
    std::vector<long long> key(static_cast<size_t>(P.size()));
    for (Index i = 0; i < P.size(); ++i) key[static_cast<size_t>(i)] = std::llround(P.data()[i] * 1e8);
    if (!seen.insert(key).second) return;
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q.transpose() * AtA * Q);
    const Vector& lam = es.eigenvalues();
    const double etol = 1e-10 * (1.0 + std::abs(lam(lam.size() - 1)));
    Index i = 0;
    while (i < lam.size()) {
      if (lam(i) >= best) return;
      Index j = i + 1;
      while (j < lam.size() && lam(j) - lam(i) <= etol) ++j;
      const Matrix W = Q * es.eigenvectors().middleCols(i, j - i);
      if (j - i == 1) {
        const Vector u = W.col(0);
        if (f(u) <= mtol) { best = lam(i); arg = u; return; }
        if (f(-u) <= mtol) { best = lam(i); arg = -u; return; }
      } else if (auto t = cone_member(lifted, W, cfg)) {
        best = lam(i);
        arg = W * *t;
        arg.normalize();
        return;
      }
      i = j;
    }
  };

  std::vector<int> sigma(static_cast<size_t>(na), 1);
  const Index nbp = std::max<Index>(nb, 1);
  for (long long mask = 0; mask < (1LL << na); ++mask) {
    for (Index i = 0; i < na; ++i) sigma[static_cast<size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
    for (Index jmax = 0; jmax < nbp; ++jmax) {
      // Rows of this piece; the piece is {M h <= 0} and f is linear (ell) on it.
      std::vector<Vector> rows;
      Vector ell = f.g;
      for (Index i = 0; i < na; ++i) {
        rows.push_back(-sigma[static_cast<size_t>(i)] * f.abs_rows.row(i).transpose());
        ell += sigma[static_cast<size_t>(i)] * f.abs_rows.row(i).transpose();
      }
      if (nb > 0) {
        ell += f.max_rows.row(jmax).transpose();
        for (Index i = 0; i < nb; ++i)
          if (i != jmax) rows.push_back((f.max_rows.row(i) - f.max_rows.row(jmax)).transpose());
      }
      for (Index l = 0; l < nc; ++l) rows.push_back(f.cone_rows.row(l).transpose());
      rows.push_back(ell);
      // Depth-first over independent row subsets of size <= n-1.
      std::vector<Index> chosen;
      std::function<void(size_t, const Matrix&)> dfs = [&](size_t start, const Matrix& Q) {
        visit_subspace(Q);
        if (Q.cols() <= 1) return;
        for (size_t r = start; r < rows.size(); ++r) {
          const Vector proj = Q.transpose() * rows[r];
          if (proj.norm() <= 1e-10 * (1.0 + rows[r].norm())) continue;
          const Matrix Qn = Q * kernel_basis(proj.transpose(), 1e-12);
          dfs(r + 1, Qn);
        }
      };
      dfs(0, Matrix::Identity(n, n));
    }
  }
  ConeProbeResult out;
  out.method = ProbeMethod::ExactPL;
  out.certified = true;
  out.value = std::isfinite(best) ? (A * arg).norm() : kInf;
  out.minimizer = arg;
  return out;
}

}  // namespace

ConeProbeResult min_conic_singular(const Matrix& A, const ProbeFunction& cone, const Config& cfg) {
  const Index n = A.cols();
  if (cone.pl) {
    if (auto r = exact_conic_singular(A, *cone.pl, cfg)) return *r;
  }
  ProbeFunction g;
  const Matrix Ac = A;
  auto member = cone.eval;
  g.eval = [Ac, member](const Vector& h) {
    const double c = member(h);
    if (!(c <= 1e-12 * (1.0 + h.norm()))) return kInf;
    return (Ac * h).norm();
  };
  const Matrix I = Matrix::Identity(n, n);
  ConeProbeResult r = n <= 3 ? angular_grid(g, I, cfg) : multistart(g, I, cfg);
  return r;
}

double nsp_constant(const Matrix& A, const std::vector<Index>& I, const Config& cfg) {
  if (I.size() > cfg.lim.nsp_support_cap)
    throw CapExceeded("support size " + std::to_string(I.size()) + " exceeds NSP enumeration cap " +
                      std::to_string(cfg.lim.nsp_support_cap));
  const Index n = A.cols();
  for (Index i : I)
    if (i < 0 || i >= n) throw std::invalid_argument("support index out of range");
  const Matrix K = kernel_basis(A, cfg.tol.kernel_rel);
  const Index k = K.cols();
  if (k == 0 || I.empty()) return 0.0;
  // Variables (t, u): h = K t, u >= |h|, sum u <= 1; maximise s' h_I.
  LpProblem lp(k + n);
  for (Index i = 0; i < n; ++i) {
    Vector r = Vector::Zero(k + n);
    r.head(k) = K.row(i).transpose();
    r(k + i) = -1.0;
    lp.add_le(r, 0.0);
    r.head(k) = -K.row(i).transpose();
    lp.add_le(r, 0.0);
  }
  Vector tot = Vector::Zero(k + n);
  tot.tail(n).setOnes();
  lp.add_le(tot, 1.0);
  LpOptions opt;
  opt.max_iter = cfg.lim.lp_max_iter;
  double best = 0.0;
  const size_t m = I.size();
  // s and -s give the same value; fix the first sign.
  for (unsigned long mask = 0; mask < (1UL << (m - 1)); ++mask) {
    lp.c.setZero();
    for (size_t j = 0; j < m; ++j) {
      const double s = j == 0 ? 1.0 : ((mask >> (j - 1)) & 1 ? -1.0 : 1.0);
      lp.c.head(k) -= s * K.row(I[j]).transpose();
    }
    const LpResult r = lp_solve(lp, opt);
    if (r.status != LpStatus::Optimal) throw LpError("NSP LP failed");
    best = std::max(best, -r.value);
  }
  return best;
}

}  // namespace gaugecert
