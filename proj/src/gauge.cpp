#include "gaugecert/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaugecert/lp.hpp"

namespace gaugecert {

const char* to_string(GaugeKind k) {
  switch (k) {
    case GaugeKind::L1: return "l1";
    case GaugeKind::AnalysisL1: return "analysis_l1";
    case GaugeKind::WSL1: return "wsl1";
    case GaugeKind::GroupL12: return "group_l12";
    case GaugeKind::Nuclear: return "nuclear";
    case GaugeKind::NonnegL1: return "nonneg_l1";
    case GaugeKind::SdpTrace: return "sdp_trace";
  }
  return "?";
}

std::optional<GaugeKind> gauge_kind_from_string(const std::string& s) {
  for (GaugeKind k : {GaugeKind::L1, GaugeKind::AnalysisL1, GaugeKind::WSL1, GaugeKind::GroupL12,
                      GaugeKind::Nuclear, GaugeKind::NonnegL1, GaugeKind::SdpTrace})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

Gauge Gauge::l1(Index n) {
  Gauge J;
  J.kind = GaugeKind::L1;
  J.n = n;
  return J;
}

Gauge Gauge::analysis_l1(const Matrix& Dt) {
  if (Dt.rows() == 0 || Dt.cols() == 0) throw std::invalid_argument("analysis operator is empty");
  Gauge J;
  J.kind = GaugeKind::AnalysisL1;
  J.n = Dt.cols();
  J.Dt = Dt;
  return J;
}

Gauge Gauge::wsl1(const Vector& w) {
  for (Index i = 0; i < w.size(); ++i) {
    if (!(w(i) >= 0.0)) throw std::invalid_argument("WSL1 weights must be nonnegative");
    if (i > 0 && w(i) > w(i - 1)) throw std::invalid_argument("WSL1 weights must be nonincreasing");
  }
  Gauge J;
  J.kind = GaugeKind::WSL1;
  J.n = w.size();
  J.w = w;
  return J;
}

Gauge Gauge::group_l12(const std::vector<std::vector<Index>>& groups, Index n) {
  std::vector<int> seen(static_cast<size_t>(n), 0);
  for (const auto& g : groups) {
    if (g.empty()) throw std::invalid_argument("empty group");
    for (Index i : g) {
      if (i < 0 || i >= n) throw std::invalid_argument("group index out of range");
      if (seen[static_cast<size_t>(i)]++) throw std::invalid_argument("groups overlap");
    }
  }
  for (int s : seen)
    if (!s) throw std::invalid_argument("groups do not cover every coordinate");
  Gauge J;
  J.kind = GaugeKind::GroupL12;
  J.n = n;
  J.groups = groups;
  return J;
}

Gauge Gauge::nuclear(Index rows, Index cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("nuclear shape must be positive");
  Gauge J;
  J.kind = GaugeKind::Nuclear;
  J.rows = rows;
  J.cols = cols;
  J.n = rows * cols;
  return J;
}

Gauge Gauge::nonneg_l1(Index n) {
  Gauge J;
  J.kind = GaugeKind::NonnegL1;
  J.n = n;
  return J;
}

Gauge Gauge::sdp_trace(const Matrix& C) {
  if (C.rows() != C.cols() || C.rows() == 0) throw std::invalid_argument("C must be square");
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + C.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("C must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(C);
  if (es.eigenvalues().minCoeff() < -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()))
    throw std::invalid_argument("C must be positive semidefinite");
  Gauge J;
  J.kind = GaugeKind::SdpTrace;
  J.rows = J.cols = C.rows();
  J.n = C.size();
  J.C = C;
  return J;
}

bool Gauge::polyhedral() const {
  switch (kind) {
    case GaugeKind::L1:
    case GaugeKind::AnalysisL1:
    case GaugeKind::WSL1:
    case GaugeKind::NonnegL1: return true;
    default: return false;
  }
}

Matrix Gauge::space_basis() const {
  if (kind == GaugeKind::SdpTrace) return sym_basis(rows);
  return Matrix::Identity(n, n);
}

Matrix sym(const Matrix& X) { return 0.5 * (X + X.transpose()); }

namespace {

void check_shape(const Gauge& J, const Vector& x) {
  if (x.size() != J.n)
    throw std::invalid_argument("shape mismatch: gauge expects " + std::to_string(J.n) +
                                " entries, got " + std::to_string(x.size()));
}

double max_or_zero(const Vector& v) { return v.size() ? v.maxCoeff() : 0.0; }

// Sum of absolute values sorted decreasingly, weighted by w.
double sorted_weighted(const Vector& w, Vector a) {
  std::sort(a.data(), a.data() + a.size(), std::greater<double>());
  return w.dot(a);
}

double nuclear_norm(const Matrix& X) {
  Eigen::JacobiSVD<Matrix> svd(X);
  return svd.singularValues().sum();
}

Eigen::SelfAdjointEigenSolver<Matrix> eig(const Matrix& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(S);
  if (es.info() != Eigen::Success) throw GaugeError("eigendecomposition did not converge");
  return es;
}

bool is_symmetric(const Matrix& X) {
  return (X - X.transpose()).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + X.cwiseAbs().maxCoeff());
}

bool is_psd(const Matrix& X, double rel) {
  auto es = eig(sym(X));
  const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  return es.eigenvalues().minCoeff() >= -rel * lmax;
}

// Pool-adjacent-violators for a nonincreasing fit, then clip at zero.
Vector isotonic_nonincreasing_clip(const Vector& v) {
  const Index n = v.size();
  std::vector<double> sum;
  std::vector<Index> len;
  for (Index i = 0; i < n; ++i) {
    sum.push_back(v(i));
    len.push_back(1);
    while (sum.size() > 1) {
      const size_t k = sum.size() - 1;
      if (sum[k - 1] / static_cast<double>(len[k - 1]) > sum[k] / static_cast<double>(len[k])) break;
      sum[k - 1] += sum[k];
      len[k - 1] += len[k];
      sum.pop_back();
      len.pop_back();
    }
  }
  Vector out(n);
  Index pos = 0;
  for (size_t b = 0; b < sum.size(); ++b) {
    const double avg = std::max(sum[b] / static_cast<double>(len[b]), 0.0);
    for (Index j = 0; j < len[b]; ++j) out(pos++) = avg;
  }
  return out;
}

Vector prox_wsl1(const Vector& w, const Vector& x, double tau) {
  const Index n = x.size();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  Vector v(n);
  for (Index k = 0; k < n; ++k) v(k) = std::abs(x(order[static_cast<size_t>(k)])) - tau * w(k);
  const Vector fit = isotonic_nonincreasing_clip(v);
  Vector out(n);
  for (Index k = 0; k < n; ++k) {
    const Index i = order[static_cast<size_t>(k)];
    out(i) = sign0(x(i)) * fit(k);
  }
  return out;
}

// prox of tau*||Dt z||_1: z = x - Dt'u with u the box-constrained dual minimiser.
Vector prox_analysis(const Matrix& Dt, const Vector& x, double tau) {
  const double L = std::pow(sigma_max(Dt), 2);
  if (L == 0.0) return x;
  const Index p = Dt.rows();
  Vector u = Vector::Zero(p), u_prev = u, v = u;
  double t = 1.0;
  for (int it = 0; it < 100000; ++it) {
    const Vector grad = -Dt * (x - Dt.transpose() * v);
    u = (v - grad / L).cwiseMax(-tau).cwiseMin(tau);
    const double move = (u - u_prev).norm();
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    v = u + ((t - 1.0) / tn) * (u - u_prev);
    // Restart momentum when it points uphill.
    if ((u - u_prev).dot(grad) > 0) { v = u; t = 1.0; } else { t = tn; }
    u_prev = u;
    if (it > 0 && move <= 1e-15 * (1.0 + u.norm())) break;
  }
  return x - Dt.transpose() * u;
}

}  // namespace

double eval(const Gauge& J, const Vector& x, const Tolerances& tol) {
  check_shape(J, x);
  switch (J.kind) {
    case GaugeKind::L1: return x.lpNorm<1>();
    case GaugeKind::AnalysisL1: return (J.Dt * x).lpNorm<1>();
    case GaugeKind::WSL1: return sorted_weighted(J.w, x.cwiseAbs());
    case GaugeKind::GroupL12: {
      double s = 0.0;
      for (const auto& g : J.groups) s += select(x, g).norm();
      return s;
    }
    case GaugeKind::Nuclear: return nuclear_norm(unvec(x, J.rows, J.cols));
    case GaugeKind::NonnegL1:
      if (x.size() && x.minCoeff() < -tol.nonneg_abs) return kInf;
      return std::max(x.sum(), 0.0);
    case GaugeKind::SdpTrace: {
      const Matrix X = unvec(x, J.rows, J.cols);
      if (!is_symmetric(X) || !is_psd(X, tol.psd_rel)) return kInf;
      return std::max((J.C.array() * X.array()).sum(), 0.0);
    }
  }
  return kInf;
}

Vector prox(const Gauge& J, const Vector& x, double tau) {
  check_shape(J, x);
  if (!(tau > 0.0)) throw std::invalid_argument("prox requires tau > 0");
  switch (J.kind) {
    case GaugeKind::L1:
      return x.unaryExpr([tau](double v) { return sign0(v) * std::max(std::abs(v) - tau, 0.0); });
    case GaugeKind::AnalysisL1: return prox_analysis(J.Dt, x, tau);
    case GaugeKind::WSL1: return prox_wsl1(J.w, x, tau);
    case GaugeKind::GroupL12: {
      Vector out = x;
      for (const auto& g : J.groups) {
        const double nrm = select(x, g).norm();
        const double scale = nrm > tau ? 1.0 - tau / nrm : 0.0;
        for (Index i : g) out(i) = scale * x(i);
      }
      return out;
    }
    case GaugeKind::Nuclear: {
      Eigen::JacobiSVD<Matrix> svd(unvec(x, J.rows, J.cols), Eigen::ComputeThinU | Eigen::ComputeThinV);
      Vector s = (svd.singularValues().array() - tau).cwiseMax(0.0);
      return vec(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
    }
    case GaugeKind::NonnegL1: return (x.array() - tau).cwiseMax(0.0);
    case GaugeKind::SdpTrace: {
      const Matrix Y = sym(unvec(x, J.rows, J.cols)) - tau * J.C;
      auto es = eig(Y);
      const Vector l = es.eigenvalues().cwiseMax(0.0);
      return vec(es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose());
    }
  }
  return x;
}

SvdFrame svd_frame(const Matrix& X, double rank_rel) {
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Index r = 0;
  if (s.size() && s(0) > 0)
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > rank_rel * s(0)) ++r;
  SvdFrame f;
  f.U1 = svd.matrixU().leftCols(r);
  f.U2 = svd.matrixU().rightCols(X.rows() - r);
  f.V1 = svd.matrixV().leftCols(r);
  f.V2 = svd.matrixV().rightCols(X.cols() - r);
  f.s = s.head(r);
  return f;
}

PsdFrame psd_frame(const Matrix& X, double rank_rel) {
  auto es = eig(sym(X));
  const Vector& l = es.eigenvalues();
  const double lmax = l.cwiseAbs().maxCoeff();
  std::vector<Index> range, ker;
  for (Index i = 0; i < l.size(); ++i) (l(i) > rank_rel * lmax && lmax > 0 ? range : ker).push_back(i);
  PsdFrame f;
  f.U = select_columns(es.eigenvectors(), range);
  f.E = select_columns(es.eigenvectors(), ker);
  return f;
}

double dir_deriv(const Gauge& J, const Vector& x0, const Vector& h, const Tolerances& tol) {
  check_shape(J, x0);
  check_shape(J, h);
  switch (J.kind) {
    case GaugeKind::L1:
    case GaugeKind::AnalysisL1: {
      const Vector r = J.kind == GaugeKind::L1 ? x0 : Vector(J.Dt * x0);
      const Vector d = J.kind == GaugeKind::L1 ? h : Vector(J.Dt * h);
      const auto I = support(r, tol.support_rel);
      std::vector<bool> on(static_cast<size_t>(r.size()), false);
      for (Index i : I) on[static_cast<size_t>(i)] = true;
      double s = 0.0;
      for (Index i = 0; i < r.size(); ++i)
        s += on[static_cast<size_t>(i)] ? sign0(r(i)) * d(i) : std::abs(d(i));
      return s;
    }
    case GaugeKind::WSL1: {
      // Tie groups of |x0| occupy consecutive sorted positions and weights.
      const Index n = x0.size();
      std::vector<Index> order(static_cast<size_t>(n));
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return std::abs(x0(a)) > std::abs(x0(b)); });
      const double scale = x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0;
      const double tie = tol.support_rel * scale;
      double total = 0.0;
      Index k = 0;
      while (k < n) {
        const double level = std::abs(x0(order[static_cast<size_t>(k)]));
        const bool zero = level <= tie;
        Index e = k;
        while (e < n && (zero ? std::abs(x0(order[static_cast<size_t>(e)])) <= tie
                              : std::abs(std::abs(x0(order[static_cast<size_t>(e)])) - level) <= tie))
          ++e;
        Vector vals(e - k);
        for (Index j = k; j < e; ++j) {
          const Index i = order[static_cast<size_t>(j)];
          vals(j - k) = zero ? std::abs(h(i)) : sign0(x0(i)) * h(i);
        }
        total += sorted_weighted(J.w.segment(k, e - k), vals);
        k = e;
      }
      return total;
    }
    case GaugeKind::GroupL12: {
      double s = 0.0;
      const double scale = x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0;
      for (const auto& g : J.groups) {
        const Vector xg = select(x0, g), hg = select(h, g);
        const double nx = xg.norm();
        s += nx > tol.support_rel * scale ? xg.dot(hg) / nx : hg.norm();
      }
      return s;
    }
    case GaugeKind::Nuclear: {
      const SvdFrame f = svd_frame(unvec(x0, J.rows, J.cols), tol.rank_rel);
      const Matrix H = unvec(h, J.rows, J.cols);
      const double lin = (f.U1.transpose() * H * f.V1).trace();
      const Matrix B = f.U2.transpose() * H * f.V2;
      return lin + (B.size() ? nuclear_norm(B) : 0.0);
    }
    case GaugeKind::NonnegL1: {
      if (eval(J, x0, tol) == kInf) throw std::invalid_argument("x0 outside the gauge domain");
      const auto I = support(x0, tol.support_rel);
      const auto Ic = complement(I, x0.size());
      const double hs = h.size() ? h.cwiseAbs().maxCoeff() : 0.0;
      for (Index i : Ic)
        if (h(i) < -tol.nonneg_abs * std::max(1.0, hs)) return kInf;
      return h.sum();
    }
    case GaugeKind::SdpTrace: {
      const Matrix X0 = unvec(x0, J.rows, J.cols);
      const Matrix H = unvec(h, J.rows, J.cols);
      if (!is_symmetric(H)) return kInf;
      const PsdFrame f = psd_frame(X0, tol.rank_rel);
      if (f.E.cols() > 0) {
        const Matrix B = f.E.transpose() * sym(H) * f.E;
        const double hs = std::max(1.0, H.cwiseAbs().maxCoeff());
        if (eig(B).eigenvalues().minCoeff() < -tol.psd_rel * hs) return kInf;
      }
      return (J.C.array() * H.array()).sum();
    }
  }
  return kInf;
}

namespace {

double polar_sdp(const Matrix& C, const Matrix& Zin) {
  const Matrix Z = sym(Zin);
  auto ec = eig(C);
  const Vector& c = ec.eigenvalues();
  const double cmax = c.cwiseAbs().maxCoeff();
  std::vector<Index> R, N;
  for (Index i = 0; i < c.size(); ++i) (c(i) > 1e-12 * cmax && cmax > 0 ? R : N).push_back(i);
  const Matrix QR = select_columns(ec.eigenvectors(), R);
  const Matrix QN = select_columns(ec.eigenvectors(), N);
  Matrix S = QR.transpose() * Z * QR;
  const double zs = 1.0 + Z.cwiseAbs().maxCoeff();
  if (!N.empty()) {
    const Matrix ZNN = QN.transpose() * Z * QN;
    const Matrix ZRN = QR.transpose() * Z * QN;
    auto en = eig(ZNN);
    if (en.eigenvalues().maxCoeff() > 1e-12 * zs) return kInf;
    // Directions of Ker C on which Z vanishes must not couple to the range.
    std::vector<Index> flat, neg;
    for (Index i = 0; i < en.eigenvalues().size(); ++i)
      (en.eigenvalues()(i) >= -1e-12 * zs ? flat : neg).push_back(i);
    const Matrix Vf = select_columns(en.eigenvectors(), flat);
    if (Vf.cols() && (ZRN * Vf).cwiseAbs().maxCoeff() > 1e-12 * zs) return kInf;
    const Matrix Vn = select_columns(en.eigenvectors(), neg);
    if (Vn.cols()) {
      Vector inv(Vn.cols());
      for (Index j = 0; j < Vn.cols(); ++j) inv(j) = 1.0 / en.eigenvalues()(neg[static_cast<size_t>(j)]);
      S -= ZRN * Vn * inv.asDiagonal() * Vn.transpose() * ZRN.transpose();
    }
  }
  if (R.empty()) return 0.0;
  Vector is(R.size());
  for (size_t j = 0; j < R.size(); ++j) is(static_cast<Index>(j)) = 1.0 / std::sqrt(c(R[j]));
  const Matrix M = is.asDiagonal() * S * is.asDiagonal();
  return std::max(0.0, eig(M).eigenvalues().maxCoeff());
}

}  // namespace

double polar_eval(const Gauge& J, const Vector& z, const Tolerances& tol) {
  check_shape(J, z);
  (void)tol;
  switch (J.kind) {
    case GaugeKind::L1: return z.size() ? z.cwiseAbs().maxCoeff() : 0.0;
    case GaugeKind::AnalysisL1: {
      const Index p = J.Dt.rows();
      LpProblem lp(p + 1);
      lp.c(p) = 1.0;
      Matrix Eq(J.n, p + 1);
      Eq << J.Dt.transpose(), Vector::Zero(J.n);
      lp.add_eq_rows(Eq, z);
      Matrix Le(2 * p, p + 1);
      Le << Matrix::Identity(p, p), -Vector::Ones(p), -Matrix::Identity(p, p), -Vector::Ones(p);
      lp.add_le_rows(Le, Vector::Zero(2 * p));
      const LpResult r = lp_solve(lp);
      return r.status == LpStatus::Optimal ? std::max(r.value, 0.0) : kInf;
    }
    case GaugeKind::WSL1: {
      Vector a = z.cwiseAbs();
      std::sort(a.data(), a.data() + a.size(), std::greater<double>());
      double best = 0.0, num = 0.0, den = 0.0;
      for (Index k = 0; k < a.size(); ++k) {
        num += a(k);
        den += J.w(k);
        if (den > 0) best = std::max(best, num / den);
        else if (num > 0) return kInf;
      }
      return best;
    }
    case GaugeKind::GroupL12: {
      double m = 0.0;
      for (const auto& g : J.groups) m = std::max(m, select(z, g).norm());
      return m;
    }
    case GaugeKind::Nuclear: return sigma_max(unvec(z, J.rows, J.cols));
    case GaugeKind::NonnegL1: return std::max(0.0, max_or_zero(z));
    case GaugeKind::SdpTrace: return polar_sdp(J.C, unvec(z, J.rows, J.cols));
  }
  return kInf;
}

// ---------------------------------------------------------------------------

std::vector<Vector> wsl1_vertices(const Vector& w, const Vector& x, double support_rel,
                                  std::size_t cap) {
  const Index n = x.size();
  std::vector<Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  const double scale = n ? x.cwiseAbs().maxCoeff() : 0.0;
  const double tie = support_rel * scale;

  struct Group {
    std::vector<Index> idx;
    std::vector<double> weights;  // sorted ascending for next_permutation
    bool zero;
  };
  std::vector<Group> groups;
  double count = 1.0;
  Index k = 0;
  while (k < n) {
    const double level = std::abs(x(order[static_cast<size_t>(k)]));
    const bool zero = level <= tie;
    Group g{{}, {}, zero};
    while (k < n) {
      const double v = std::abs(x(order[static_cast<size_t>(k)]));
      if (zero ? v > tie : std::abs(v - level) > tie) break;
      g.idx.push_back(order[static_cast<size_t>(k)]);
      g.weights.push_back(w(k));
      ++k;
    }
    std::sort(g.weights.begin(), g.weights.end());
    // Distinct permutations of the weight multiset.
    double perms = 1.0;
    {
      double f = 1.0;
      for (size_t i = 1; i <= g.weights.size(); ++i) f *= static_cast<double>(i);
      perms = f;
      size_t run = 1;
      for (size_t i = 1; i <= g.weights.size(); ++i) {
        if (i < g.weights.size() && g.weights[i] == g.weights[i - 1]) { ++run; continue; }
        for (size_t j = 2; j <= run; ++j) perms /= static_cast<double>(j);
        run = 1;
      }
    }
    count *= perms;
    if (zero)
      for (double wv : g.weights)
        if (wv > 0) count *= 2.0;
    if (count > static_cast<double>(cap))
      throw GaugeError("WSL1 vertex enumeration exceeds cap of " + std::to_string(cap));
    groups.push_back(std::move(g));
  }

  // Per-group partial assignments, combined by Cartesian product.
  std::vector<std::vector<Vector>> parts;
  for (const Group& g : groups) {
    std::vector<Vector> opts;
    std::vector<double> perm = g.weights;
    do {
      if (!g.zero) {
        Vector v = Vector::Zero(n);
        for (size_t j = 0; j < g.idx.size(); ++j) v(g.idx[j]) = sign0(x(g.idx[j])) * perm[j];
        opts.push_back(v);
      } else {
        std::vector<size_t> free;
        for (size_t j = 0; j < perm.size(); ++j)
          if (perm[j] > 0) free.push_back(j);
        const size_t combos = size_t{1} << free.size();
        for (size_t mask = 0; mask < combos; ++mask) {
          Vector v = Vector::Zero(n);
          for (size_t j = 0; j < g.idx.size(); ++j) v(g.idx[j]) = perm[j];
          for (size_t b = 0; b < free.size(); ++b)
            if (mask & (size_t{1} << b)) v(g.idx[free[b]]) = -perm[free[b]];
          opts.push_back(v);
        }
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    parts.push_back(std::move(opts));
  }
  std::vector<Vector> out{Vector::Zero(n)};
  for (const auto& opts : parts) {
    std::vector<Vector> next;
    next.reserve(out.size() * opts.size());
    for (const Vector& a : out)
      for (const Vector& b : opts) next.push_back(a + b);
    out = std::move(next);
  }
  return out;
}

SubdiffFace subdiff_face(const Gauge& J, const Vector& x0, const Config& cfg) {
  check_shape(J, x0);
  if (eval(J, x0, cfg.tol) == kInf) throw std::invalid_argument("x0 outside the gauge domain");
  const Tolerances& tol = cfg.tol;
  SubdiffFace F;
  const Index n = J.n;
  switch (J.kind) {
    case GaugeKind::L1:
    case GaugeKind::NonnegL1: {
      F.active = support(x0, tol.support_rel);
      const auto Ic = complement(F.active, n);
      F.base = Vector::Zero(n);
      for (Index i : F.active) F.base(i) = J.kind == GaugeKind::L1 ? sign0(x0(i)) : 1.0;
      F.param_map = select_columns(Matrix::Identity(n, n), Ic);
      F.domain = J.kind == GaugeKind::L1 ? ParamDomain::Box : ParamDomain::UpperOne;
      F.tangent_basis = F.param_map;
      break;
    }
    case GaugeKind::AnalysisL1: {
      const Vector r = J.Dt * x0;
      F.active = support(r, tol.support_rel);
      const auto Ic = complement(F.active, r.size());
      Vector u0 = Vector::Zero(r.size());
      for (Index i : F.active) u0(i) = sign0(r(i));
      F.base = J.Dt.transpose() * u0;
      F.pattern = u0;
      F.param_map = select_columns(J.Dt.transpose(), Ic);
      F.domain = ParamDomain::Box;
      F.tangent_basis = range_basis(F.param_map);
      F.ri_gap_flag = !full_column_rank(F.param_map);
      break;
    }
    case GaugeKind::WSL1: {
      F.vertices = wsl1_vertices(J.w, x0, tol.support_rel, cfg.lim.wsl1_vertex_cap);
      F.base = F.vertices.front();
      F.param_map = Matrix(n, static_cast<Index>(F.vertices.size()) - 1);
      for (size_t j = 1; j < F.vertices.size(); ++j)
        F.param_map.col(static_cast<Index>(j) - 1) = F.vertices[j] - F.base;
      F.domain = ParamDomain::Simplex;
      F.tangent_basis = range_basis(F.param_map);
      break;
    }
    case GaugeKind::GroupL12: {
      F.base = Vector::Zero(n);
      const double scale = x0.size() ? x0.cwiseAbs().maxCoeff() : 0.0;
      std::vector<Index> free;
      for (size_t gi = 0; gi < J.groups.size(); ++gi) {
        const auto& g = J.groups[gi];
        const Vector xg = select(x0, g);
        const double nx = xg.norm();
        if (nx > tol.support_rel * scale) {
          F.active.push_back(static_cast<Index>(gi));
          for (size_t j = 0; j < g.size(); ++j) F.base(g[j]) = xg(static_cast<Index>(j)) / nx;
        } else {
          F.param_groups.push_back(static_cast<Index>(g.size()));
          free.insert(free.end(), g.begin(), g.end());
        }
      }
      F.param_map = select_columns(Matrix::Identity(n, n), free);
      F.domain = ParamDomain::GroupBall;
      F.tangent_basis = F.param_map;
      break;
    }
    case GaugeKind::Nuclear: {
      const SvdFrame f = svd_frame(unvec(x0, J.rows, J.cols), tol.rank_rel);
      F.base = vec(f.U1 * f.V1.transpose());
      F.frame_left = f.U2;
      F.frame_right = f.V2;
      F.param_rows = f.U2.cols();
      F.param_cols = f.V2.cols();
      F.param_map = Matrix(n, F.param_rows * F.param_cols);
      for (Index a = 0; a < F.param_rows; ++a)
        for (Index b = 0; b < F.param_cols; ++b)
          F.param_map.col(a * F.param_cols + b) = vec(f.U2.col(a) * f.V2.col(b).transpose());
      F.domain = ParamDomain::Spectral;
      F.tangent_basis = F.param_map;
      break;
    }
    case GaugeKind::SdpTrace: {
      const PsdFrame f = psd_frame(unvec(x0, J.rows, J.cols), tol.rank_rel);
      F.base = vec(J.C);
      F.frame_left = f.E;
      F.frame_right = f.U;
      const Index k = f.E.cols();
      F.param_rows = F.param_cols = k;
      const Matrix S = sym_basis(k);
      F.param_map = Matrix(n, S.cols());
      for (Index j = 0; j < S.cols(); ++j)
        F.param_map.col(j) = -vec(f.E * unvec(S.col(j), k, k) * f.E.transpose());
      F.domain = ParamDomain::Psd;
      F.tangent_basis = range_basis(F.param_map);
      break;
    }
  }
  if (F.param_map.cols() == 0) F.domain = ParamDomain::Point;
  return F;
}

Vector face_point(const SubdiffFace& F, const Vector& w) {
  if (w.size() != F.param_map.cols()) throw std::invalid_argument("parameter length mismatch");
  return F.base + F.param_map * w;
}

Vector project_param(const SubdiffFace& F, const Vector& w) {
  switch (F.domain) {
    case ParamDomain::Point: return Vector::Zero(0);
    case ParamDomain::Box: return w.cwiseMax(-1.0).cwiseMin(1.0);
    case ParamDomain::UpperOne: return w.cwiseMin(1.0);
    case ParamDomain::GroupBall: {
      Vector out = w;
      Index pos = 0;
      for (Index s : F.param_groups) {
        const double nrm = out.segment(pos, s).norm();
        if (nrm > 1.0) out.segment(pos, s) /= nrm;
        pos += s;
      }
      return out;
    }
    case ParamDomain::Spectral: {
      Eigen::JacobiSVD<Matrix> svd(unvec(w, F.param_rows, F.param_cols),
                                   Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vector s = svd.singularValues().cwiseMin(1.0);
      return vec(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose());
    }
    case ParamDomain::Psd: {
      const Index k = F.param_rows;
      const Matrix S = sym_basis(k);
      auto es = eig(unvec(S * w, k, k));
      const Vector l = es.eigenvalues().cwiseMax(0.0);
      return S.transpose() * vec(es.eigenvectors() * l.asDiagonal() * es.eigenvectors().transpose());
    }
    case ParamDomain::Simplex: {
      // Euclidean projection onto {w >= 0, sum w <= 1}.
      Vector p = w.cwiseMax(0.0);
      if (p.sum() <= 1.0) return p;
      Vector s = w;
      std::sort(s.data(), s.data() + s.size(), std::greater<double>());
      double cum = 0.0, theta = 0.0;
      for (Index i = 0; i < s.size(); ++i) {
        cum += s(i);
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (s(i) - t > 0) theta = t;
      }
      return (w.array() - theta).cwiseMax(0.0);
    }
  }
  return w;
}

double face_margin(const Gauge& J, const SubdiffFace& F, const Vector& z, const Config& cfg) {
  check_shape(J, z);
  const double aff_tol = 1e-8 * (1.0 + z.cwiseAbs().maxCoeff());
  const Index n = J.n;
  switch (J.kind) {
    case GaugeKind::L1:
    case GaugeKind::NonnegL1:
    case GaugeKind::GroupL12: {
      std::vector<bool> fixed(static_cast<size_t>(n), true);
      for (Index j = 0; j < F.param_map.cols(); ++j)
        for (Index i = 0; i < n; ++i)
          if (F.param_map(i, j) != 0.0) fixed[static_cast<size_t>(i)] = false;
      for (Index i = 0; i < n; ++i)
        if (fixed[static_cast<size_t>(i)] && std::abs(z(i) - F.base(i)) > aff_tol) return -kInf;
      double worst = 0.0;
      if (J.kind == GaugeKind::GroupL12) {
        const Vector coords = F.param_map.transpose() * z;
        Index pos = 0;
        for (Index s : F.param_groups) {
          worst = std::max(worst, coords.segment(pos, s).norm());
          pos += s;
        }
        return 1.0 - worst;
      }
      const Vector coords = F.param_map.transpose() * z;
      if (J.kind == GaugeKind::L1) return 1.0 - (coords.size() ? coords.cwiseAbs().maxCoeff() : 0.0);
      return std::min(1.0, 1.0 - (coords.size() ? coords.maxCoeff() : 0.0));
    }
    case GaugeKind::AnalysisL1: {
      // u-space margin: 1 - min ||u_Ic||_inf over Dt'u = z with u_I fixed to the sign pattern.
      const Index p = J.Dt.rows();
      LpProblem lp(p + 1);
      lp.c(p) = 1.0;
      lp.nonneg[static_cast<size_t>(p)] = true;
      Matrix Eq(n, p + 1);
      Eq << J.Dt.transpose(), Vector::Zero(n);
      lp.add_eq_rows(Eq, z);
      std::vector<bool> on(static_cast<size_t>(p), false);
      for (Index i : F.active) {
        on[static_cast<size_t>(i)] = true;
        Vector row = Vector::Zero(p + 1);
        row(i) = 1.0;
        lp.add_eq(row, F.pattern(i));
      }
      for (Index i = 0; i < p; ++i) {
        if (on[static_cast<size_t>(i)]) continue;
        Vector row = Vector::Zero(p + 1);
        row(i) = 1.0;
        row(p) = -1.0;
        lp.add_le(row, 0.0);
        row(i) = -1.0;
        lp.add_le(row, 0.0);
      }
      const LpResult res = lp_solve(lp);
      return res.status == LpStatus::Optimal ? 1.0 - res.value : -kInf;
    }
    case GaugeKind::WSL1: {
      const Index V = static_cast<Index>(F.vertices.size());
      LpProblem lp(V + 1);
      lp.c(V) = -1.0;
      for (Index j = 0; j < V; ++j) lp.nonneg[static_cast<size_t>(j)] = true;
      Matrix Eq = Matrix::Zero(n + 1, V + 1);
      for (Index j = 0; j < V; ++j) {
        Eq.block(0, j, n, 1) = F.vertices[static_cast<size_t>(j)];
        Eq(n, j) = 1.0;
      }
      Vector rhs(n + 1);
      rhs << z, 1.0;
      lp.add_eq_rows(Eq, rhs);
      for (Index j = 0; j < V; ++j) {
        Vector row = Vector::Zero(V + 1);
        row(V) = 1.0;
        row(j) = -1.0;
        lp.add_le(row, 0.0);
      }
      Vector cap = Vector::Zero(V + 1);
      cap(V) = 1.0;
      lp.add_le(cap, 1.0);
      const LpResult res = lp_solve(lp);
      return res.status == LpStatus::Optimal ? -res.value : -kInf;
    }
    case GaugeKind::Nuclear: {
      const Vector resid = z - F.base - F.param_map * (F.param_map.transpose() * (z - F.base));
      if (resid.cwiseAbs().maxCoeff() > aff_tol) return -kInf;
      const Matrix W = unvec(F.param_map.transpose() * z, F.param_rows, F.param_cols);
      return 1.0 - (W.size() ? sigma_max(W) : 0.0);
    }
    case GaugeKind::SdpTrace: {
      const Matrix S = J.C - sym(unvec(z, J.rows, J.cols));
      const Matrix& E = F.frame_left;
      const Matrix& U = F.frame_right;
      if (U.cols() && (S * U).cwiseAbs().maxCoeff() > aff_tol) return -kInf;
      if (E.cols() == 0) return 1.0;
      const Matrix M = E.transpose() * S * E;
      return std::min(1.0, eig(M).eigenvalues().minCoeff());
    }
  }
  (void)cfg;
  return -kInf;
}

// ---------------------------------------------------------------------------

double PiecewiseLinear::operator()(const Vector& h) const {
  if (cone_rows.rows() && (cone_rows * h).maxCoeff() > 1e-12 * (1.0 + h.norm())) return kInf;
  double v = g.dot(h);
  if (abs_rows.rows()) v += (abs_rows * h).lpNorm<1>();
  if (max_rows.rows()) v += (max_rows * h).maxCoeff();
  return v;
}

PiecewiseLinear PiecewiseLinear::restrict(const Matrix& K) const {
  PiecewiseLinear r;
  r.g = K.transpose() * g;
  r.abs_rows = abs_rows * K;
  r.max_rows = max_rows * K;
  r.cone_rows = cone_rows * K;
  return r;
}

std::optional<PiecewiseLinear> dir_deriv_pl(const Gauge& J, const Vector& x0, const Config& cfg) {
  const Index n = J.n;
  PiecewiseLinear f;
  f.g = Vector::Zero(n);
  f.abs_rows = Matrix(0, n);
  f.max_rows = Matrix(0, n);
  f.cone_rows = Matrix(0, n);
  switch (J.kind) {
    case GaugeKind::L1: {
      const auto I = support(x0, cfg.tol.support_rel);
      for (Index i : I) f.g(i) = sign0(x0(i));
      f.abs_rows = select_columns(Matrix::Identity(n, n), complement(I, n)).transpose();
      return f;
    }
    case GaugeKind::AnalysisL1: {
      const Vector r = J.Dt * x0;
      const auto I = support(r, cfg.tol.support_rel);
      for (Index i : I) f.g += sign0(r(i)) * J.Dt.row(i).transpose();
      const auto Ic = complement(I, r.size());
      f.abs_rows = Matrix(static_cast<Index>(Ic.size()), n);
      for (size_t j = 0; j < Ic.size(); ++j) f.abs_rows.row(static_cast<Index>(j)) = J.Dt.row(Ic[j]);
      return f;
    }
    case GaugeKind::NonnegL1: {
      const auto Ic = complement(support(x0, cfg.tol.support_rel), n);
      f.g.setOnes();
      f.cone_rows = -select_columns(Matrix::Identity(n, n), Ic).transpose();
      return f;
    }
    case GaugeKind::WSL1: {
      const auto V = wsl1_vertices(J.w, x0, cfg.tol.support_rel, cfg.lim.wsl1_vertex_cap);
      f.max_rows = Matrix(static_cast<Index>(V.size()), n);
      for (size_t j = 0; j < V.size(); ++j) f.max_rows.row(static_cast<Index>(j)) = V[j].transpose();
      return f;
    }
    default: return std::nullopt;
  }
}

}  // namespace gaugecert
