#include "gaugecert/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gaugecert/convex.hpp"
#include "gaugecert/lp.hpp"
#include "lp_models.hpp"

namespace gaugecert {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

namespace {

constexpr double kNearDegenerate = 1e-6;
constexpr double kProbeSign = 1e-9;

std::string fmt(double v) {
  if (v == 0) v = 0.0;
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

LpOptions lp_options(const Config& cfg) {
  LpOptions o;
  o.max_iter = cfg.lim.lp_max_iter;
  o.variable_cap = cfg.lim.lp_variable_cap;
  o.kkt_tol = cfg.tol.lp_kkt;
  return o;
}

void check_shapes(const Gauge& J, const Matrix& A, const Vector& x0) {
  if (A.cols() != J.n) throw std::invalid_argument("measurement operator has the wrong number of columns");
  if (x0.size() != J.n) throw std::invalid_argument("point has the wrong length");
  if (!A.allFinite() || !x0.allFinite()) throw std::invalid_argument("non-finite input");
}

// Adjoint as seen from the gauge's space: symmetrised for matrix-PSD gauges.
Matrix space_adjoint(const Gauge& J, const Matrix& A) {
  Matrix At = A.transpose();
  if (J.kind == GaugeKind::SdpTrace)
    for (Index j = 0; j < At.cols(); ++j) At.col(j) = vec(sym(unvec(At.col(j), J.rows, J.cols)));
  return At;
}

// Orthonormal basis (in full coordinates) of Ker A within the gauge's space.
Matrix space_kernel(const Gauge& J, const Matrix& A, const Config& cfg) {
  const Matrix B = J.space_basis();
  const Matrix N = kernel_basis(A * B, cfg.tol.kernel_rel);
  return B * N;
}

// A injective on the part of the space orthogonal to the tangent of dJ(x0).
bool injective_off_tangent(const Gauge& J, const Matrix& A, const SubdiffFace& F, const Config& cfg) {
  const Matrix B = J.space_basis();
  Matrix C = B;
  if (F.tangent_basis.cols()) C = B * kernel_basis(F.tangent_basis.transpose() * B, cfg.tol.kernel_rel);
  if (C.cols() == 0) return true;
  return full_column_rank(A * C, cfg.tol.kernel_rel);
}

// Polyhedral faces: one LP in (y, w, t) maximising the parameter slack t.
std::optional<DualCertificate> polyhedral_certificate(const Matrix& At, const SubdiffFace& F, const Config& cfg) {
  const Index n = At.rows(), m = At.cols(), p = F.param_map.cols();
  const Index nv = m + p + 1, t = m + p;
  LpProblem lp(nv);
  lp.c(t) = -1.0;
  Matrix Eq(n, nv);
  Eq << At, -F.param_map, Vector::Zero(n);
  lp.add_eq_rows(Eq, F.base);
  auto row = [&]() { return Vector::Zero(nv).eval(); };
  Vector cap = row();
  cap(t) = 1.0;
  lp.add_le(cap, 1.0);
  switch (F.domain) {
    case ParamDomain::Box:
      for (Index i = 0; i < p; ++i) {
        Vector r = row();
        r(m + i) = 1.0;
        r(t) = 1.0;
        lp.add_le(r, 1.0);
        r(m + i) = -1.0;
        lp.add_le(r, 1.0);
      }
      break;
    case ParamDomain::UpperOne:
      for (Index i = 0; i < p; ++i) {
        Vector r = row();
        r(m + i) = 1.0;
        r(t) = 1.0;
        lp.add_le(r, 1.0);
      }
      break;
    case ParamDomain::Simplex: {
      Vector s = row();
      for (Index i = 0; i < p; ++i) {
        Vector r = row();
        r(m + i) = -1.0;
        r(t) = 1.0;
        lp.add_le(r, 0.0);
        s(m + i) = 1.0;
      }
      s(t) = 1.0;
      lp.add_le(s, 1.0);
      break;
    }
    case ParamDomain::Point: break;
    default: throw std::logic_error("not a polyhedral face");
  }
  const LpResult res = lp_solve(lp, lp_options(cfg));
  if (res.status != LpStatus::Optimal) return std::nullopt;
  DualCertificate c;
  c.y = res.x.head(m);
  c.margin = -res.value;
  c.exact = true;
  c.margin_upper_bound = c.margin;
  return c;
}

// phi(w) on the parameter domain with a subgradient; margin = 1 - phi.
double domain_phi(const SubdiffFace& F, const Vector& w, Vector& g) {
  g = Vector::Zero(w.size());
  switch (F.domain) {
    case ParamDomain::Spectral: {
      Eigen::JacobiSVD<Matrix> svd(unvec(w, F.param_rows, F.param_cols), Eigen::ComputeFullU | Eigen::ComputeFullV);
      const double s = svd.singularValues()(0);
      g = vec(svd.matrixU().col(0) * svd.matrixV().col(0).transpose());
      return s;
    }
    case ParamDomain::GroupBall: {
      double worst = -1.0;
      Index pos = 0, at = 0, len = 0;
      for (Index s : F.param_groups) {
        const double v = w.segment(pos, s).norm();
        if (v > worst) worst = v, at = pos, len = s;
        pos += s;
      }
      if (worst > 0) g.segment(at, len) = w.segment(at, len) / worst;
      return std::max(worst, 0.0);
    }
    case ParamDomain::Psd: {
      const Index k = F.param_rows;
      const Matrix S = sym_basis(k);
      Eigen::SelfAdjointEigenSolver<Matrix> es(unvec(S * w, k, k));
      const double lmin = es.eigenvalues()(0);
      if (-lmin < -1.0) return -1.0;
      const Vector v = es.eigenvectors().col(0);
      g = -S.transpose() * vec(v * v.transpose());
      return -lmin;
    }
    default: throw std::logic_error("unsupported parameter domain");
  }
}

std::optional<DualCertificate> convex_certificate(const Gauge& J, const Matrix& A, const Matrix& At,
                                                  const SubdiffFace& F, const Config& cfg) {
  const Index m = At.cols(), p = F.param_map.cols();
  Matrix M(At.rows(), m + p);
  M << At, -F.param_map;
  const Vector sol = pseudo_inverse(M) * F.base;
  if ((M * sol - F.base).norm() > 1e-9 * (1.0 + F.base.norm())) return std::nullopt;
  DualCertificate c;
  if (p == 0) {
    c.y = sol.head(m);
    c.margin = face_margin(J, F, A.transpose() * c.y, cfg);
    c.margin_upper_bound = 1.0;
    return c;
  }
  const Vector wp = sol.tail(p);
  const Matrix N = kernel_basis(M, cfg.tol.kernel_rel);
  const Matrix Q = N.cols() ? range_basis(N.bottomRows(p)) : Matrix(p, 0);
  Vector g;
  double radius = 1.0;
  bool bounded = true;
  if (F.domain == ParamDomain::Spectral) {
    const double d = static_cast<double>(std::min(F.param_rows, F.param_cols));
    radius = std::sqrt(d) * domain_phi(F, wp, g) + wp.norm();
  } else if (F.domain == ParamDomain::GroupBall) {
    const double d = static_cast<double>(F.param_groups.size());
    radius = std::sqrt(d) * domain_phi(F, wp, g) + wp.norm();
  } else {
    radius = 10.0 * (1.0 + wp.norm());
    bounded = false;
  }
  radius = std::max(radius, 1e-6);
  ConvexOracle oracle{[&](const Vector& q, Vector& gq) {
    Vector gw;
    const double v = domain_phi(F, wp + Q * q, gw);
    gq = Q.transpose() * gw;
    return v;
  }};
  const CuttingPlaneResult cp = cutting_plane_minimise(oracle, Q.cols(), radius, 1e-10, 400);
  const Vector wstar = wp + Q * cp.point;
  const Vector target = F.base + F.param_map * wstar;
  c.y = pseudo_inverse(At) * target;
  c.margin = face_margin(J, F, A.transpose() * c.y, cfg);
  if (bounded && cp.lower > -kInf) c.margin_upper_bound = 1.0 - cp.lower;
  return c;
}

struct DescentHit {
  bool found = false;
  Vector h;
  double t = 0.0;
};

// Looks for a kernel direction along which J does not increase.
DescentHit descent_probe(const Gauge& J, const Vector& x0, const Matrix& K, const std::vector<Vector>& extra,
                         const Config& cfg) {
  DescentHit hit;
  const double J0 = eval(J, x0, cfg.tol);
  std::vector<Vector> cands = extra;
  for (Index j = 0; j < K.cols(); ++j) {
    cands.push_back(K.col(j));
    cands.push_back(-K.col(j));
  }
  std::mt19937_64 gen(0xd15c0ULL + static_cast<std::uint64_t>(K.cols()));
  std::normal_distribution<double> nd;
  for (int r = 0; r < 64 && K.cols(); ++r) {
    Vector c(K.cols());
    for (Index i = 0; i < c.size(); ++i) c(i) = nd(gen);
    cands.push_back(K * c.normalized());
  }
  for (const Vector& h : cands) {
    if (h.norm() == 0.0) continue;
    for (double t : {1.0, 0.1, 0.01, 1e-3}) {
      const double v = eval(J, x0 + t * h, cfg.tol);
      if (v <= J0 + 1e-12 * (1.0 + J0)) {
        hit.found = true;
        hit.h = h;
        hit.t = t;
        return hit;
      }
    }
  }
  return hit;
}

// Tangent of dJ*(A'y0) at x0 for an interior certificate y0; Ker A meeting
// it only at 0 is equivalent to uniqueness.
Matrix conjugate_tangent(const Gauge& J, const Vector& x0, const SubdiffFace& F, const Config& cfg) {
  switch (J.kind) {
    case GaugeKind::Nuclear: {
      const SvdFrame f = svd_frame(unvec(x0, J.rows, J.cols), cfg.tol.rank_rel);
      const Index r = f.U1.cols();
      const Matrix S = sym_basis(r);
      Matrix T(J.n, S.cols());
      for (Index j = 0; j < S.cols(); ++j) T.col(j) = vec(f.U1 * unvec(S.col(j), r, r) * f.V1.transpose());
      return T;
    }
    case GaugeKind::SdpTrace: {
      const Matrix& U = F.frame_right;
      const Index r = U.cols();
      const Matrix S = sym_basis(r);
      Matrix T(J.n, S.cols());
      for (Index j = 0; j < S.cols(); ++j) T.col(j) = vec(U * unvec(S.col(j), r, r) * U.transpose());
      return T;
    }
    case GaugeKind::GroupL12: {
      Matrix T = Matrix::Zero(J.n, static_cast<Index>(F.active.size()));
      for (size_t a = 0; a < F.active.size(); ++a)
        for (Index i : J.groups[static_cast<size_t>(F.active[a])]) T(i, static_cast<Index>(a)) = x0(i);
      return T;
    }
    default: throw std::logic_error("conjugate tangent is for non-polyhedral gauges");
  }
}

ConditionCheck make_check(std::string id, Verdict v, bool certified, std::string detail) {
  return ConditionCheck{std::move(id), v, certified, std::move(detail)};
}

}  // namespace

std::optional<DualCertificate> find_dual_certificate(const Gauge& J, const Matrix& A, const Vector& x0,
                                                     const Config& cfg) {
  check_shapes(J, A, x0);
  const SubdiffFace F = subdiff_face(J, x0, cfg);
  const Matrix At = space_adjoint(J, A);
  switch (F.domain) {
    case ParamDomain::Box:
    case ParamDomain::UpperOne:
    case ParamDomain::Simplex: return polyhedral_certificate(At, F, cfg);
    case ParamDomain::Point:
      if (J.polyhedral()) return polyhedral_certificate(At, F, cfg);
      return convex_certificate(J, A, At, F, cfg);
    default: return convex_certificate(J, A, At, F, cfg);
  }
}

InteriorCheck sdp_feasible_interior(const Matrix& Phi, const Matrix& X0, const Config& cfg) {
  const Index k = X0.rows();
  if (X0.cols() != k || Phi.cols() != k * k) throw std::invalid_argument("shape mismatch");
  const Matrix B = sym_basis(k);
  const Matrix N = B * kernel_basis(Phi * B, cfg.tol.kernel_rel);
  const Matrix X = sym(X0);
  auto neg_lmin = [&](const Vector& q, Vector& g) {
    const Matrix M = X + unvec(N * q, k, k);
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    const double l = es.eigenvalues()(0);
    g = Vector::Zero(q.size());
    if (-l < -1.0) return -1.0;
    const Vector v = es.eigenvectors().col(0);
    g = -N.transpose() * vec(v * v.transpose());
    return -l;
  };
  InteriorCheck r;
  const double radius = 10.0 * (1.0 + X.norm());
  const CuttingPlaneResult cp = cutting_plane_minimise(ConvexOracle{neg_lmin}, N.cols(), radius, 1e-10, 400);
  r.best_min_eig = -cp.upper;
  if (r.best_min_eig > cfg.tol.ri_margin) r.verdict = Verdict::Yes;
  else if (N.cols() == 0) r.verdict = Verdict::No;
  return r;
}

CertificateReport check_sharp(const Gauge& J, const Matrix& A, const Vector& x0, const Config& cfg,
                              const CheckOptions& opt) {
  check_shapes(J, A, x0);
  if (eval(J, x0, cfg.tol) == kInf) throw std::invalid_argument("point outside the gauge domain");
  CertificateReport R;
  const Matrix K = space_kernel(J, A, cfg);
  // A trivial kernel makes x0 the only feasible point, so the interior assumption is not needed.
  if (J.kind == GaugeKind::SdpTrace && K.cols()) {
    const InteriorCheck ic = sdp_feasible_interior(A, unvec(x0, J.rows, J.cols), cfg);
    R.conditions.push_back(make_check("assumption.interior", ic.verdict, ic.verdict != Verdict::Unknown,
                                      "best smallest eigenvalue " + fmt(ic.best_min_eig)));
    if (ic.verdict != Verdict::Yes) {
      R.notes.push_back("no positive definite feasible point found; the certificate theory does not apply");
      return R;
    }
  } else {
    R.conditions.push_back(make_check("assumption.interior", Verdict::Yes, true,
                                      J.polyhedral() ? "polyhedral gauge"
                                      : K.cols()     ? "full-domain gauge"
                                                     : "trivial kernel"));
  }

  const SubdiffFace F = subdiff_face(J, x0, cfg);
  const std::optional<DualCertificate> cert = find_dual_certificate(J, A, x0, cfg);
  const double tol = cfg.tol.ri_margin;
  if (!cert || (cert->margin_upper_bound && *cert->margin_upper_bound < 0.0 && cert->margin < 0.0)) {
    R.is_sharp = Verdict::No;
    R.is_unique = Verdict::No;
    R.conditions.push_back(make_check("v.certificate", Verdict::No, true, "no dual certificate: x0 is not a minimiser"));
    R.notes.push_back("x0 does not solve the equality-constrained problem");
    return R;
  }
  R.dual_certificate = cert->y;
  R.ri_margin = cert->margin;

  // Route (v): injectivity off the face tangent plus an interior certificate.
  const bool inj = injective_off_tangent(J, A, F, cfg);
  R.conditions.push_back(make_check("v.injective", inj ? Verdict::Yes : Verdict::No, true,
                                    inj ? "A is injective off the face tangent" : "A has a kernel off the face tangent"));
  Verdict margin_v = Verdict::Unknown;
  bool margin_cert = false;
  if (cert->margin > tol) {
    margin_v = Verdict::Yes;
    margin_cert = true;
  } else if (cert->exact || (cert->margin_upper_bound && *cert->margin_upper_bound <= tol)) {
    margin_v = Verdict::No;
    margin_cert = true;
  }
  std::string mdetail = "margin " + fmt(cert->margin);
  if (cert->margin_upper_bound && !cert->exact) mdetail += ", upper bound " + fmt(*cert->margin_upper_bound);
  R.conditions.push_back(make_check("v.ri_certificate", margin_v, margin_cert, mdetail));
  Verdict v_route = Verdict::Unknown;
  if (!inj) v_route = Verdict::No;
  else if (margin_v == Verdict::Yes) v_route = Verdict::Yes;
  else if (margin_v == Verdict::No) v_route = Verdict::No;

  // Route (vii): the critical cone meets Ker A only at 0.
  Verdict vii = Verdict::Unknown;
  bool vii_cert = false;
  std::string vdetail;
  if (K.cols() == 0) {
    R.kernel_trivial = true;
    R.kappa = kInf;
    R.kappa_certified = true;
    vii = Verdict::Yes;
    vii_cert = true;
    vdetail = "trivial kernel";
  } else {
    const std::optional<PiecewiseLinear> pl = dir_deriv_pl(J, x0, cfg);
    if (pl) {
      vii = cone_trivial(lift_sublevel(*pl), K, cfg) ? Verdict::Yes : Verdict::No;
      vii_cert = true;
      vdetail = "cone LP";
    }
    if (opt.compute_kappa || !pl) {
      const ConeProbeResult pr = sphere_min(ProbeFunction::dir_deriv_of(J, x0, cfg), K, cfg);
      R.kappa = pr.value;
      R.kappa_certified = pr.certified;
      R.kappa_direction = pr.minimizer;
      if (!pl) {
        vdetail = std::string("sphere probe (") + to_string(pr.method) + ") " + fmt(pr.value);
        if (pr.value <= kProbeSign) {
          vii = Verdict::No;
          vii_cert = true;
        } else if (pr.certified) {
          vii = Verdict::Yes;
          vii_cert = true;
        }
      }
    }
  }
  R.conditions.push_back(make_check("vii.cone_trivial", vii, vii_cert, vdetail));

  if (margin_cert && vii_cert && v_route != Verdict::Unknown && vii != v_route) {
    const bool near = std::abs(cert->margin) < kNearDegenerate || (R.kappa && std::abs(*R.kappa) < kNearDegenerate);
    if (!near)
      throw InternalDisagreement("interior-certificate and cone routes disagree (margin " + fmt(cert->margin) +
                                 ", kappa " + (R.kappa ? fmt(*R.kappa) : std::string("n/a")) + ")");
    R.notes.push_back("near-degenerate instance: the two routes disagree within " + fmt(kNearDegenerate));
    R.is_sharp = Verdict::Unknown;
  } else if (v_route == Verdict::No || (vii == Verdict::No && vii_cert)) {
    R.is_sharp = Verdict::No;
  } else if (v_route == Verdict::Yes) {
    R.is_sharp = Verdict::Yes;
  } else if (vii == Verdict::Yes && vii_cert) {
    R.notes.push_back("cone route is certified but no interior certificate was found");
  }

  if (opt.compute_alpha) {
    const ProbeFunction dd = ProbeFunction::dir_deriv_of(J, x0, cfg);
    if (J.kind == GaugeKind::SdpTrace) {
      // Symmetric directions only (J' is +inf elsewhere). The cone has a curved
      // boundary where J' jumps to +inf, so the grid value is not certified.
      const Matrix B = J.space_basis();
      ProbeFunction db;
      db.eval = [dd, B](const Vector& t) { return dd.eval(B * t); };
      R.alpha = min_conic_singular(A * B, db, cfg).value;
      R.alpha_certified = false;
    } else {
      const ConeProbeResult pa = min_conic_singular(A, dd, cfg);
      R.alpha = pa.value;
      R.alpha_certified = pa.certified;
    }
  }
  if (R.is_sharp == Verdict::Yes) R.is_unique = Verdict::Yes;
  else if (J.polyhedral()) R.is_unique = R.is_sharp;
  return R;
}

CertificateReport check_unique(const Gauge& J, const Matrix& A, const Vector& x0, const Config& cfg,
                               const CheckOptions& opt) {
  CertificateReport R = check_sharp(J, A, x0, cfg, opt);
  if (J.polyhedral()) {
    R.conditions.push_back(make_check("unique.polyhedral", R.is_unique, R.is_unique != Verdict::Unknown,
                                      "uniqueness coincides with sharpness for polyhedral gauges"));
    return R;
  }
  if (R.is_unique != Verdict::Unknown) return R;
  if (!R.dual_certificate) return R;  // not a minimiser or assumption failed
  const SubdiffFace F = subdiff_face(J, x0, cfg);
  if (R.ri_margin > cfg.tol.ri_margin) {
    const Matrix T = conjugate_tangent(J, x0, F, cfg);
    const bool ok = T.cols() == 0 || full_column_rank(A * range_basis(T), cfg.tol.kernel_rel);
    R.is_unique = ok ? Verdict::Yes : Verdict::No;
    R.conditions.push_back(make_check("unique.tangent_subspace", R.is_unique, true,
                                      ok ? "kernel meets the solution-face tangent only at 0"
                                         : "kernel direction stays inside the solution face"));
    return R;
  }
  std::vector<Vector> extra;
  if (R.kappa_direction) extra.push_back(*R.kappa_direction);
  const DescentHit hit = descent_probe(J, x0, space_kernel(J, A, cfg), extra, cfg);
  if (hit.found) {
    R.is_unique = Verdict::No;
    R.conditions.push_back(make_check("unique.descent_probe", Verdict::No, true,
                                      "feasible point x0 + " + fmt(hit.t) + " h does not increase J"));
  } else {
    R.conditions.push_back(make_check("unique.descent_probe", Verdict::Unknown, false,
                                      "no non-increasing kernel direction found"));
  }
  return R;
}

CertificateReport check_sharp_qp(const Gauge& J, const Matrix& A, const Vector& b, double mu, const Vector& xhat,
                                 const Config& cfg) {
  if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
  check_shapes(J, A, xhat);
  if (b.size() != A.rows()) throw std::invalid_argument("data has the wrong length");
  const Vector yhat = (b - A * xhat) / mu;
  const SubdiffFace F = subdiff_face(J, xhat, cfg);
  const double m = face_margin(J, F, space_adjoint(J, A) * yhat, cfg);
  if (!(m >= -1e-6))
    throw NotStationary("A'(b - A xhat)/mu is not in the subdifferential at xhat (slack " + fmt(m) + ")");
  CertificateReport R = check_unique(J, A, xhat, cfg);
  R.notes.push_back("stationarity slack of the residual certificate " + fmt(m));
  return R;
}

CertificateReport fuchs_check(const Matrix& A, const Vector& x0, const Config& cfg) {
  const Index n = A.cols();
  if (x0.size() != n) throw std::invalid_argument("point has the wrong length");
  const auto I = support(x0, cfg.tol.support_rel);
  const auto Ic = complement(I, n);
  CertificateReport R;
  const bool inj = I.empty() || full_column_rank(select_columns(A, I), cfg.tol.kernel_rel);
  R.conditions.push_back(make_check("fuchs.injective", inj ? Verdict::Yes : Verdict::No, true,
                                    "support columns " + std::string(inj ? "independent" : "dependent")));
  // min t s.t. A_I'y = sign(x_I), |A_Ic'y| <= t.
  const Index m = A.rows();
  LpProblem lp(m + 1);
  lp.c(m) = 1.0;
  lp.nonneg[static_cast<size_t>(m)] = true;
  for (Index i : I) {
    Vector r = Vector::Zero(m + 1);
    r.head(m) = A.col(i);
    lp.add_eq(r, sign0(x0(i)));
  }
  for (Index i : Ic) {
    Vector r = Vector::Zero(m + 1);
    r.head(m) = A.col(i);
    r(m) = -1.0;
    lp.add_le(r, 0.0);
    r.head(m) = -A.col(i);
    lp.add_le(r, 0.0);
  }
  const LpResult res = lp_solve(lp, lp_options(cfg));
  R.lp_value = res.status == LpStatus::Optimal ? res.value : kInf;
  if (res.status == LpStatus::Optimal) {
    R.dual_certificate = res.x.head(m);
    R.ri_margin = 1.0 - res.value;
  }
  const bool lp_ok = *R.lp_value < 1.0 - cfg.tol.ri_margin;
  R.conditions.push_back(make_check("fuchs.lp", lp_ok ? Verdict::Yes : Verdict::No, true,
                                    "off-support correlation " + fmt(*R.lp_value)));
  R.is_sharp = inj && lp_ok ? Verdict::Yes : Verdict::No;
  R.is_unique = R.is_sharp;
  return R;
}

CertificateReport analysis_check(const Matrix& A, const Matrix& Dt, const Vector& x0, const Config& cfg) {
  const Index n = A.cols(), p = Dt.rows(), m = A.rows();
  if (Dt.cols() != n || x0.size() != n) throw std::invalid_argument("shape mismatch");
  const Vector r = Dt * x0;
  const auto I = support(r, cfg.tol.support_rel);
  const auto Ic = complement(I, p);
  CertificateReport R;
  Matrix stack(m + static_cast<Index>(Ic.size()), n);
  stack << A, select_columns(Dt.transpose(), Ic).transpose();
  const bool inj = full_column_rank(stack, cfg.tol.kernel_rel);
  R.conditions.push_back(make_check("analysis.kernel", inj ? Verdict::Yes : Verdict::No, true,
                                    inj ? "Ker A meets Ker Dt_Ic only at 0" : "Ker A meets Ker Dt_Ic"));
  // min t s.t. A'y = Dt'u, u_I = sign, |u_Ic| <= t. Variables (y, u, t).
  const Index nv = m + p + 1;
  LpProblem lp(nv);
  lp.c(nv - 1) = 1.0;
  lp.nonneg[static_cast<size_t>(nv - 1)] = true;
  Matrix Eq(n, nv);
  Eq << A.transpose(), -Dt.transpose(), Vector::Zero(n);
  lp.add_eq_rows(Eq, Vector::Zero(n));
  for (Index i : I) {
    Vector e = Vector::Zero(nv);
    e(m + i) = 1.0;
    lp.add_eq(e, sign0(r(i)));
  }
  for (Index i : Ic) {
    Vector e = Vector::Zero(nv);
    e(m + i) = 1.0;
    e(nv - 1) = -1.0;
    lp.add_le(e, 0.0);
    e(m + i) = -1.0;
    lp.add_le(e, 0.0);
  }
  const LpResult res = lp_solve(lp, lp_options(cfg));
  R.lp_value = res.status == LpStatus::Optimal ? res.value : kInf;
  if (res.status == LpStatus::Optimal) {
    R.dual_certificate = res.x.head(m);
    R.ri_margin = 1.0 - res.value;
  }
  const bool lp_ok = *R.lp_value < 1.0 - cfg.tol.ri_margin;
  R.conditions.push_back(make_check("analysis.lp", lp_ok ? Verdict::Yes : Verdict::No, true,
                                    "cosupport correlation " + fmt(*R.lp_value)));
  R.is_sharp = inj && lp_ok ? Verdict::Yes : Verdict::No;
  R.is_unique = R.is_sharp;
  return R;
}

CertificateReport wsl1_check(const Matrix& A, const Vector& w, const Vector& x0, const Config& cfg) {
  const Index n = A.cols(), m = A.rows();
  const Gauge J = Gauge::wsl1(w);
  if (J.n != n || x0.size() != n) throw std::invalid_argument("shape mismatch");
  const std::vector<Vector> V = wsl1_vertices(w, x0, cfg.tol.support_rel, cfg.lim.wsl1_vertex_cap);
  CertificateReport R;
  const Index nv = static_cast<Index>(V.size());
  Matrix span(n, m + std::max<Index>(nv - 1, 0));
  span.leftCols(m) = A.transpose();
  for (Index j = 1; j < nv; ++j) span.col(m + j - 1) = V[static_cast<size_t>(j)] - V[0];
  const bool full = numerical_rank(span, cfg.tol.kernel_rel) == n;
  R.conditions.push_back(make_check("wsl1.affine_span", full ? Verdict::Yes : Verdict::No, true,
                                    full ? "Im A' plus the vertex span is everything" : "vertex span is deficient"));
  // max t s.t. A'y = sum l_j v_j, sum l = 1, l_j >= t, t <= 1. Variables (y, l, t).
  const Index nvar = m + nv + 1, t = nvar - 1;
  LpProblem lp(nvar);
  lp.c(t) = -1.0;
  for (Index j = 0; j < nv; ++j) lp.nonneg[static_cast<size_t>(m + j)] = true;
  Matrix Eq = Matrix::Zero(n + 1, nvar);
  Eq.block(0, 0, n, m) = A.transpose();
  for (Index j = 0; j < nv; ++j) {
    Eq.block(0, m + j, n, 1) = -V[static_cast<size_t>(j)];
    Eq(n, m + j) = 1.0;
  }
  Vector rhs = Vector::Zero(n + 1);
  rhs(n) = 1.0;
  lp.add_eq_rows(Eq, rhs);
  for (Index j = 0; j < nv; ++j) {
    Vector e = Vector::Zero(nvar);
    e(t) = 1.0;
    e(m + j) = -1.0;
    lp.add_le(e, 0.0);
  }
  Vector cap = Vector::Zero(nvar);
  cap(t) = 1.0;
  lp.add_le(cap, 1.0);
  const LpResult res = lp_solve(lp, lp_options(cfg));
  if (res.status == LpStatus::Optimal) {
    R.ri_margin = -res.value;
    R.dual_certificate = res.x.head(m);
  }
  R.lp_value = res.status == LpStatus::Optimal ? 1.0 - R.ri_margin : kInf;
  const bool lp_ok = R.ri_margin > cfg.tol.ri_margin;
  R.conditions.push_back(make_check("wsl1.lp", lp_ok ? Verdict::Yes : Verdict::No, true,
                                    "smallest vertex weight " + fmt(R.ri_margin)));
  R.is_sharp = full && lp_ok ? Verdict::Yes : Verdict::No;
  R.is_unique = R.is_sharp;
  return R;
}

CertificateReport nonneg_l1_check(const Matrix& A, const Vector& x0, const Config& cfg) {
  const Index n = A.cols();
  if (x0.size() != n) throw std::invalid_argument("point has the wrong length");
  if ((x0.array() < -cfg.tol.nonneg_abs).any()) throw std::invalid_argument("point must be nonnegative");
  const Gauge J = Gauge::nonneg_l1(n);
  CertificateReport R;
  const Matrix K = space_kernel(J, A, cfg);
  if (K.cols() == 0) {
    R.kernel_trivial = true;
    R.kappa = kInf;
    R.kappa_certified = true;
    R.is_sharp = Verdict::Yes;
  } else {
    const PiecewiseLinear f = *dir_deriv_pl(J, x0, cfg);
    const bool trivial = cone_trivial(lift_sublevel(f), K, cfg);
    R.is_sharp = trivial ? Verdict::Yes : Verdict::No;
    const ConeProbeResult pr = sphere_min(ProbeFunction::from_pl(f), K, cfg);
    R.kappa = pr.value;
    R.kappa_certified = pr.certified;
    R.kappa_direction = pr.minimizer;
  }
  R.conditions.push_back(make_check("nonneg.cone", R.is_sharp, true,
                                    "{h : h_Ic >= 0, sum h <= 0} against Ker A"));
  R.is_unique = R.is_sharp;
  return R;
}

CertificateReport nuclear_check(const Matrix& Phi, const Matrix& X0, const Config& cfg) {
  const Gauge J = Gauge::nuclear(X0.rows(), X0.cols());
  const Vector x0 = vec(X0);
  CertificateReport R = check_unique(J, Phi, x0, cfg);
  // Sufficient condition: the top-r spectral mass of every kernel direction is
  // strictly below its tail mass.
  const Matrix K = space_kernel(J, Phi, cfg);
  const Index r = svd_frame(X0, cfg.tol.rank_rel).U1.cols();
  if (K.cols()) {
    ProbeFunction g;
    g.eval = [&](const Vector& h) {
      Eigen::JacobiSVD<Matrix> svd(unvec(h, X0.rows(), X0.cols()));
      const Vector s = svd.singularValues();
      return s.tail(s.size() - r).sum() - s.head(r).sum();
    };
    const ConeProbeResult pr = sphere_min(g, K, cfg);
    const Verdict v = pr.value > kProbeSign ? Verdict::Yes : Verdict::No;
    R.conditions.push_back(make_check("nuclear.kernel_spectrum", v, pr.certified || v == Verdict::No,
                                      "sufficient spectral condition: min tail minus head singular mass " + fmt(pr.value)));
  } else {
    R.conditions.push_back(make_check("nuclear.kernel_spectrum", Verdict::Yes, true, "trivial kernel"));
  }
  return R;
}

CertificateReport sdp_trace_check(const Matrix& Phi, const Matrix& C, const Matrix& X0, const Config& cfg) {
  const Gauge J = Gauge::sdp_trace(C);
  const Vector x0 = vec(X0);
  CertificateReport R = check_unique(J, Phi, x0, cfg);
  // Kernel probe: no unit symmetric H with E'HE psd and <C, H> <= 0.
  const Matrix K = space_kernel(J, Phi, cfg);
  if (K.cols()) {
    const ConeProbeResult pr = sphere_min(ProbeFunction::dir_deriv_of(J, x0, cfg), K, cfg);
    const Verdict v = pr.value > kProbeSign ? Verdict::Yes : Verdict::No;
    R.conditions.push_back(make_check("sdp.kernel_probe", v, pr.certified || v == Verdict::No,
                                      "min <C, H> over admissible kernel directions " + fmt(pr.value)));
  } else {
    R.conditions.push_back(make_check("sdp.kernel_probe", Verdict::Yes, true, "trivial kernel"));
  }
  return R;
}

LipschitzProbe upper_lipschitz_probe(const Gauge& J, const Matrix& A, const Vector& x0, const Vector& y0,
                                     const std::vector<std::pair<Vector, Vector>>& grid, const Config& cfg) {
  if (!J.polyhedral()) throw std::invalid_argument("the Lipschitz probe needs a polyhedral gauge");
  check_shapes(J, A, x0);
  if (y0.size() != A.rows()) throw std::invalid_argument("certificate has the wrong length");
  CheckOptions opt;
  opt.compute_alpha = false;
  opt.compute_kappa = false;
  if (check_sharp(J, A, x0, cfg, opt).is_sharp != Verdict::Yes)
    throw PreconditionFailed("x0 is not a sharp minimiser");
  const Index n = J.n, m = A.rows();
  const Index naux = detail::gauge_epigraph_size(J);
  const Index nv = n + naux + n;  // x, gauge auxiliaries, |x - x0| bounds
  const Vector b0 = A * x0;
  LipschitzProbe out;
  for (const auto& [v, w] : grid) {
    if (v.size() != n || w.size() != m) throw std::invalid_argument("perturbation has the wrong length");
    LipschitzSample s;
    s.v = v;
    s.w = w;
    const Vector z = A.transpose() * y0 + v;
    LpProblem lp(nv);
    const Vector cost = detail::add_gauge_epigraph(lp, J, 0, n);
    // J(x) <= z'x forces x into dJ*(z) when J°(z) <= 1.
    Vector row = cost;
    row.head(n) -= z;
    lp.add_le(row, 0.0);
    Matrix Eq = Matrix::Zero(m, nv);
    Eq.leftCols(n) = A;
    lp.add_eq_rows(Eq, b0 + w);
    for (Index i = 0; i < n; ++i) {
      Vector e = Vector::Zero(nv);
      e(i) = 1.0;
      e(n + naux + i) = -1.0;
      lp.add_le(e, x0(i));
      e(i) = -1.0;
      lp.add_le(e, -x0(i));
      lp.c(n + naux + i) = 1.0;
    }
    if (polar_eval(J, z, cfg.tol) <= 1.0 + 1e-12) {
      const LpResult res = lp_solve(lp, lp_options(cfg));
      if (res.status == LpStatus::Optimal) {
        s.solved = true;
        s.displacement = (res.x.head(n) - x0).norm();
        const double scale = v.norm() + w.norm();
        s.ratio = scale > 0 ? s.displacement / scale : 0.0;
        out.max_ratio = std::max(out.max_ratio, s.ratio);
      }
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

}  // namespace gaugecert
