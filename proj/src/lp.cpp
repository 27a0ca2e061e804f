#include "gaugecert/lp.hpp"

#include <algorithm>
#include <cmath>

namespace gaugecert {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

LpProblem::LpProblem(Index n)
    : c(Vector::Zero(n)), E(0, n), f(0), G(0, n), g(0), nonneg(static_cast<size_t>(n), false) {}

void LpProblem::add_eq(const Vector& row, double rhs) {
  E.conservativeResize(E.rows() + 1, num_vars());
  E.row(E.rows() - 1) = row.transpose();
  f.conservativeResize(f.size() + 1);
  f(f.size() - 1) = rhs;
}

void LpProblem::add_le(const Vector& row, double rhs) {
  G.conservativeResize(G.rows() + 1, num_vars());
  G.row(G.rows() - 1) = row.transpose();
  g.conservativeResize(g.size() + 1);
  g(g.size() - 1) = rhs;
}

void LpProblem::add_eq_rows(const Matrix& rows, const Vector& rhs) {
  const Index r0 = E.rows();
  E.conservativeResize(r0 + rows.rows(), num_vars());
  E.bottomRows(rows.rows()) = rows;
  f.conservativeResize(r0 + rows.rows());
  f.tail(rows.rows()) = rhs;
}

void LpProblem::add_le_rows(const Matrix& rows, const Vector& rhs) {
  const Index r0 = G.rows();
  G.conservativeResize(r0 + rows.rows(), num_vars());
  G.bottomRows(rows.rows()) = rows;
  g.conservativeResize(r0 + rows.rows());
  g.tail(rows.rows()) = rhs;
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr std::size_t kDegenerateRunForBland = 50;

class Tableau {
 public:
  // start[i] >= 0 names a unit column of A usable as the initial basic
  // variable of row i; otherwise the row's artificial starts basic.
  Tableau(const Matrix& A, const Vector& b, const std::vector<Index>& start) : M_(A.rows()), N_(A.cols()) {
    T_ = Matrix::Zero(M_ + 1, N_ + M_ + 1);
    T_.topLeftCorner(M_, N_) = A;
    T_.block(0, N_, M_, M_).setIdentity();
    T_.col(rhs()).head(M_) = b;
    basis_.resize(static_cast<size_t>(M_));
    for (Index i = 0; i < M_; ++i) {
      const Index s = start[static_cast<size_t>(i)];
      basis_[static_cast<size_t>(i)] = s >= 0 ? s : N_ + i;
    }
  }

  Index rhs() const { return N_ + M_; }
  Index rows() const { return M_; }
  Index cols() const { return N_; }
  double& at(Index i, Index j) { return T_(i, j); }
  double at(Index i, Index j) const { return T_(i, j); }
  Index basic(Index i) const { return basis_[static_cast<size_t>(i)]; }

  // Objective row for cost vector over all N_+M_ columns.
  void set_objective(const Vector& cost) {
    Vector d = cost;
    double z = 0.0;
    for (Index i = 0; i < M_; ++i) {
      const double cb = cost(basic(i));
      if (cb == 0.0) continue;
      d -= cb * T_.row(i).head(N_ + M_).transpose();
      z += cb * T_(i, rhs());
    }
    T_.row(M_).head(N_ + M_) = d.transpose();
    T_(M_, rhs()) = -z;
  }

  void pivot(Index r, Index col) {
    T_.row(r) /= T_(r, col);
    for (Index i = 0; i <= M_; ++i) {
      if (i == r) continue;
      const double f = T_(i, col);
      if (f != 0.0) T_.row(i) -= f * T_.row(r);
    }
    basis_[static_cast<size_t>(r)] = col;
  }

  // Runs simplex over columns [0, limit). Returns false when unbounded.
  bool run(Index limit, std::size_t& iters, std::size_t max_iter, bool& bland) {
    std::size_t degenerate = 0;
    const double cscale = 1.0 + T_.row(M_).head(limit).cwiseAbs().maxCoeff();
    const double dtol = 1e-11 * cscale;
    // Columns whose only positive entries are below the pivot tolerance are
    // skipped until the next pivot.
    std::vector<bool> blocked(static_cast<size_t>(limit), false);
    while (true) {
      Index enter = -1;
      double best = -dtol;
      for (Index j = 0; j < limit; ++j) {
        if (blocked[static_cast<size_t>(j)]) continue;
        const double d = T_(M_, j);
        if (d < -dtol) {
          if (bland) { enter = j; break; }
          if (d < best) { best = d; enter = j; }
        }
      }
      if (enter < 0) return true;
      if (++iters > max_iter) throw LpError("simplex iteration guard exhausted");
      Index leave = -1;
      double ratio = kInf;
      for (Index i = 0; i < M_; ++i) {
        const double a = T_(i, enter);
        if (a <= kPivotTol) continue;
        const double r = std::max(T_(i, rhs()), 0.0) / a;
        if (leave < 0 || r < ratio - 1e-12) {
          ratio = r;
          leave = i;
        } else if (r <= ratio + 1e-12) {
          const bool better = bland ? basic(i) < basic(leave) : a > T_(leave, enter);
          if (better) { ratio = std::min(ratio, r); leave = i; }
        }
      }
      if (leave < 0) {
        bool tiny = false;
        for (Index i = 0; i < M_ && !tiny; ++i) tiny = T_(i, enter) > 1e-13;
        if (!tiny) return false;
        blocked[static_cast<size_t>(enter)] = true;
        continue;
      }
      std::fill(blocked.begin(), blocked.end(), false);
      if (ratio < 1e-12) {
        if (++degenerate > kDegenerateRunForBland) bland = true;
      } else {
        degenerate = 0;
      }
      pivot(leave, enter);
    }
  }

 private:
  Index M_, N_;
  Matrix T_;
  std::vector<Index> basis_;
};

}  // namespace

LpResult lp_solve(const LpProblem& prob, const LpOptions& opt) {
  const Index n = prob.num_vars();
  if (static_cast<std::size_t>(n) > opt.variable_cap)
    throw LpError("LP exceeds variable cap (" + std::to_string(opt.variable_cap) + ")");
  if (prob.E.cols() != n || prob.G.cols() != n || prob.f.size() != prob.E.rows() ||
      prob.g.size() != prob.G.rows() || prob.nonneg.size() != static_cast<size_t>(n))
    throw std::invalid_argument("LP data shape mismatch");

  // Standard form: columns for x (split when free), then slacks of G rows.
  std::vector<Index> pos(static_cast<size_t>(n)), neg(static_cast<size_t>(n), -1);
  Index cols = 0;
  for (Index j = 0; j < n; ++j) {
    pos[static_cast<size_t>(j)] = cols++;
    if (!prob.nonneg[static_cast<size_t>(j)]) neg[static_cast<size_t>(j)] = cols++;
  }
  const Index slack0 = cols;
  const Index mE = prob.E.rows(), mG = prob.G.rows();
  cols += mG;
  const Index M = mE + mG;

  Matrix A = Matrix::Zero(M, cols);
  Vector b(M);
  Vector cost = Vector::Zero(cols);
  for (Index j = 0; j < n; ++j) {
    const Index p = pos[static_cast<size_t>(j)], q = neg[static_cast<size_t>(j)];
    A.block(0, p, mE, 1) = prob.E.col(j);
    A.block(mE, p, mG, 1) = prob.G.col(j);
    cost(p) = prob.c(j);
    if (q >= 0) {
      A.block(0, q, mE, 1) = -prob.E.col(j);
      A.block(mE, q, mG, 1) = -prob.G.col(j);
      cost(q) = -prob.c(j);
    }
  }
  for (Index i = 0; i < mG; ++i) A(mE + i, slack0 + i) = 1.0;
  b.head(mE) = prob.f;
  b.tail(mG) = prob.g;
  Vector row_sign = Vector::Ones(M);
  for (Index i = 0; i < M; ++i)
    if (b(i) < 0) {
      A.row(i) *= -1.0;
      b(i) = -b(i);
      row_sign(i) = -1.0;
    }

  std::vector<Index> start(static_cast<size_t>(M), -1);
  for (Index i = 0; i < mG; ++i)
    if (row_sign(mE + i) > 0) start[static_cast<size_t>(mE + i)] = slack0 + i;

  LpResult res;
  Tableau T(A, b, start);
  const Index total = cols + M;

  Vector phase1 = Vector::Zero(total);
  phase1.tail(M).setOnes();
  T.set_objective(phase1);
  T.run(total, res.iterations, opt.max_iter, res.bland_engaged);
  const double infeas = -T.at(M, T.rhs());
  const double bscale = 1.0 + (M > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  if (infeas > 1e-9 * bscale) {
    res.status = LpStatus::Infeasible;
    return res;
  }
  // Drive remaining artificials out of the basis where a real pivot exists.
  for (Index i = 0; i < M; ++i) {
    if (T.basic(i) < cols) continue;
    Index best = -1;
    double mag = kPivotTol;
    for (Index j = 0; j < cols; ++j)
      if (std::abs(T.at(i, j)) > mag) { mag = std::abs(T.at(i, j)); best = j; }
    if (best >= 0) T.pivot(i, best);
  }

  Vector phase2 = Vector::Zero(total);
  phase2.head(cols) = cost;
  T.set_objective(phase2);
  if (!T.run(cols, res.iterations, opt.max_iter, res.bland_engaged)) {
    res.status = LpStatus::Unbounded;
    return res;
  }

  Vector xs = Vector::Zero(cols);
  for (Index i = 0; i < M; ++i)
    if (T.basic(i) < cols) xs(T.basic(i)) = std::max(T.at(i, T.rhs()), 0.0);
  res.x = Vector::Zero(n);
  for (Index j = 0; j < n; ++j) {
    res.x(j) = xs(pos[static_cast<size_t>(j)]);
    if (neg[static_cast<size_t>(j)] >= 0) res.x(j) -= xs(neg[static_cast<size_t>(j)]);
  }
  res.value = prob.c.dot(res.x);
  res.status = LpStatus::Optimal;

  // Duals from the artificial columns: y_i = -d_{art_i}, undo row negation.
  Vector y(M);
  for (Index i = 0; i < M; ++i) y(i) = -T.at(M, cols + i) * row_sign(i);
  // Residuals against the original data.
  double primal = 0.0;
  if (mE > 0) primal = std::max(primal, (prob.E * res.x - prob.f).cwiseAbs().maxCoeff());
  if (mG > 0) primal = std::max(primal, (prob.G * res.x - prob.g).maxCoeff());
  for (Index j = 0; j < n; ++j)
    if (prob.nonneg[static_cast<size_t>(j)]) primal = std::max(primal, -res.x(j));
  // Reduced costs d = c - E'y_E - G'y_G on x; slack reduced costs are -y_G.
  Vector d = prob.c;
  if (mE > 0) d -= prob.E.transpose() * y.head(mE);
  if (mG > 0) d -= prob.G.transpose() * y.tail(mG);
  double dual = 0.0, comp = 0.0;
  for (Index j = 0; j < n; ++j) {
    if (prob.nonneg[static_cast<size_t>(j)]) {
      dual = std::max(dual, -d(j));
      comp = std::max(comp, std::abs(d(j) * res.x(j)));
    } else {
      dual = std::max(dual, std::abs(d(j)));
    }
  }
  for (Index i = 0; i < mG; ++i) {
    const double yi = y(mE + i);
    dual = std::max(dual, yi);  // need y_G <= 0
    comp = std::max(comp, std::abs(yi * (prob.g(i) - prob.G.row(i).dot(res.x))));
  }
  const double scale = 1.0 + prob.c.cwiseAbs().maxCoeff() + (M > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
  res.kkt_residual = std::max({primal, dual, comp}) / scale;
  return res;
}

}  // namespace gaugecert
