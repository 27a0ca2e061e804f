#include "gaugecert/convex.hpp"

#include <cmath>

#include "gaugecert/lp.hpp"

namespace gaugecert {

CuttingPlaneResult cutting_plane_minimise(const ConvexOracle& f, Index dim, double radius,
                                          double gap_tol, std::size_t max_iter) {
  CuttingPlaneResult res;
  Vector q = Vector::Zero(dim);
  Vector g(dim);
  if (dim == 0) {
    res.point = q;
    res.upper = res.lower = f.eval(q, g);
    res.converged = true;
    return res;
  }
  // Master LP in (q, theta): min theta, theta >= f_k + g_k'(q - q_k), |q| <= radius.
  LpProblem lp(dim + 1);
  lp.c(dim) = 1.0;
  for (Index i = 0; i < dim; ++i) {
    Vector r = Vector::Zero(dim + 1);
    r(i) = 1.0;
    lp.add_le(r, radius);
    r(i) = -1.0;
    lp.add_le(r, radius);
  }
  for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
    const double v = f.eval(q, g);
    if (v < res.upper) {
      res.upper = v;
      res.point = q;
    }
    Vector cut(dim + 1);
    cut << g, -1.0;
    lp.add_le(cut, g.dot(q) - v);
    const LpResult r = lp_solve(lp);
    if (r.status != LpStatus::Optimal) break;
    res.lower = std::max(res.lower, r.value);
    if (res.upper - res.lower <= gap_tol * (1.0 + std::abs(res.upper))) {
      res.converged = true;
      break;
    }
    q = r.x.head(dim);
  }
  return res;
}

}  // namespace gaugecert
