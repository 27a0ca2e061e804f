// Small nonsmooth convex minimisation by Kelley cutting planes over a box.
#pragma once

#include <functional>

#include "gaugecert/linalg.hpp"

namespace gaugecert {

struct ConvexOracle {
  // Returns f(q) and writes a subgradient into g.
  std::function<double(const Vector& q, Vector& g)> eval;
};

struct CuttingPlaneResult {
  Vector point;
  double upper = kInf;   // best value found
  double lower = -kInf;  // LP lower bound over the box
  std::size_t iterations = 0;
  bool converged = false;
};

// Minimises f over {|q_i| <= radius}. Stops when upper - lower <= gap_tol.
CuttingPlaneResult cutting_plane_minimise(const ConvexOracle& f, Index dim, double radius,
                                          double gap_tol = 1e-9, std::size_t max_iter = 400);

}  // namespace gaugecert
