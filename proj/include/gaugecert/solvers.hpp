// Solvers for the equality-constrained problem, its dual, and the Tikhonov
// and Mozorov (noise-constrained) regularisations.
#pragma once

#include <limits>
#include <optional>
#include <string>

#include "gaugecert/config.hpp"
#include "gaugecert/gauge.hpp"
#include "gaugecert/linalg.hpp"

namespace gaugecert {

enum class SolveStatus { Optimal, MaxIter, Infeasible };
const char* to_string(SolveStatus s);

struct SolveResult {
  Vector point;
  double value = kInf;
  double feasibility_residual = 0.0;
  double optimality_residual = 0.0;
  std::size_t iterations = 0;
  SolveStatus status = SolveStatus::Optimal;
  std::string method;
  // Dual multiplier y with A'y in dJ(point), when the method produces one.
  Vector multiplier;
  // Mozorov: the Tikhonov parameter found by bisection, and whether the
  // residual was monotone in mu along every evaluated pair.
  double mu = std::numeric_limits<double>::quiet_NaN();
  bool residual_monotone = true;
};

// min J(x) s.t. A x = b0.
SolveResult solve_primal_eq(const Gauge& J, const Matrix& A, const Vector& b0,
                            const Config& cfg = default_config());

// max <y, b0> s.t. J°(A'y) <= 1.
SolveResult solve_dual(const Gauge& J, const Matrix& A, const Vector& b0, const Config& cfg = default_config());

// min 1/2 ||A x - b||^2 + mu J(x). warm is an optional starting point.
SolveResult solve_tikhonov(const Gauge& J, const Matrix& A, const Vector& b, double mu,
                           const Config& cfg = default_config(), const Vector* warm = nullptr);

// min J(x) s.t. ||A x - b|| <= delta.
SolveResult solve_mozorov(const Gauge& J, const Matrix& A, const Vector& b, double delta,
                          const Config& cfg = default_config());

struct DualityGap {
  double primal = kInf;
  double dual = -kInf;
  double gap = kInf;
  SolveResult primal_solve;
  SolveResult dual_solve;
};

DualityGap duality_gap(const Gauge& J, const Matrix& A, const Vector& b0, const Config& cfg = default_config());

}  // namespace gaugecert
