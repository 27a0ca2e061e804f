#include "lp_models.hpp"

#include <stdexcept>

namespace gaugecert::detail {

namespace {

struct WsTerms {
  std::vector<Index> ks;
  std::vector<double> coef;
};

// J(x) = sum_k (w_k - w_{k+1}) T_k(|x|) with w_{n+1} = 0; zero coefficients dropped.
WsTerms ws_terms(const Vector& w) {
  WsTerms t;
  const Index n = w.size();
  for (Index k = 0; k < n; ++k) {
    const double c = w(k) - (k + 1 < n ? w(k + 1) : 0.0);
    if (c > 0) {
      t.ks.push_back(k + 1);
      t.coef.push_back(c);
    }
  }
  return t;
}

void abs_rows(LpProblem& lp, const Matrix& M, Index x_off, Index u_off) {
  const Index nv = lp.num_vars();
  for (Index i = 0; i < M.rows(); ++i) {
    Vector r = Vector::Zero(nv);
    r.segment(x_off, M.cols()) = M.row(i).transpose();
    r(u_off + i) = -1.0;
    lp.add_le(r, 0.0);
    r.segment(x_off, M.cols()) = -M.row(i).transpose();
    lp.add_le(r, 0.0);
  }
}

}  // namespace

Index gauge_epigraph_size(const Gauge& J) {
  switch (J.kind) {
    case GaugeKind::L1: return J.n;
    case GaugeKind::AnalysisL1: return J.Dt.rows();
    case GaugeKind::NonnegL1: return 0;
    case GaugeKind::WSL1: return J.n + static_cast<Index>(ws_terms(J.w).ks.size()) * (1 + J.n);
    default: throw std::logic_error("no LP model for a non-polyhedral gauge");
  }
}

Vector add_gauge_epigraph(LpProblem& lp, const Gauge& J, Index x_off, Index aux_off) {
  const Index n = J.n, nv = lp.num_vars();
  Vector c = Vector::Zero(nv);
  switch (J.kind) {
    case GaugeKind::L1:
      abs_rows(lp, Matrix::Identity(n, n), x_off, aux_off);
      c.segment(aux_off, n).setOnes();
      break;
    case GaugeKind::AnalysisL1:
      abs_rows(lp, J.Dt, x_off, aux_off);
      c.segment(aux_off, J.Dt.rows()).setOnes();
      break;
    case GaugeKind::NonnegL1:
      for (Index i = 0; i < n; ++i) lp.nonneg[static_cast<size_t>(x_off + i)] = true;
      c.segment(x_off, n).setOnes();
      break;
    case GaugeKind::WSL1: {
      // u >= |x|; T_k(u) = min_r k r + sum_i q_i with q_i >= u_i - r, q >= 0.
      abs_rows(lp, Matrix::Identity(n, n), x_off, aux_off);
      const WsTerms t = ws_terms(J.w);
      for (size_t a = 0; a < t.ks.size(); ++a) {
        const Index r = aux_off + n + static_cast<Index>(a) * (1 + n), q = r + 1;
        c(r) = t.coef[a] * static_cast<double>(t.ks[a]);
        for (Index i = 0; i < n; ++i) {
          c(q + i) = t.coef[a];
          lp.nonneg[static_cast<size_t>(q + i)] = true;
          Vector row = Vector::Zero(nv);
          row(aux_off + i) = 1.0;
          row(r) = -1.0;
          row(q + i) = -1.0;
          lp.add_le(row, 0.0);
        }
      }
      break;
    }
    default: throw std::logic_error("no LP model for a non-polyhedral gauge");
  }
  return c;
}

}  // namespace gaugecert::detail
