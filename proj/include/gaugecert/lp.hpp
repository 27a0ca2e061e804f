// Dense two-phase simplex for small linear programs.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gaugecert/linalg.hpp"

namespace gaugecert {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

// minimize c'x  subject to  E x = f,  G x <= g,  x_j >= 0 for j flagged in nonneg.
// Variables not flagged are free.
struct LpProblem {
  Vector c;
  Matrix E;
  Vector f;
  Matrix G;
  Vector g;
  std::vector<bool> nonneg;

  explicit LpProblem(Index n = 0);
  Index num_vars() const { return c.size(); }
  // Append a single row; the row vector must have num_vars() entries.
  void add_eq(const Vector& row, double rhs);
  void add_le(const Vector& row, double rhs);
  void add_eq_rows(const Matrix& rows, const Vector& rhs);
  void add_le_rows(const Matrix& rows, const Vector& rhs);
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  Vector x;
  double value = 0.0;
  // max of primal infeasibility, dual infeasibility and complementarity.
  double kkt_residual = 0.0;
  std::size_t iterations = 0;
  bool bland_engaged = false;
};

struct LpOptions {
  std::size_t max_iter = 50000;
  std::size_t variable_cap = 2000;
  double kkt_tol = 1e-8;
};

class LpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws LpError when the iteration guard is exhausted or the size cap is exceeded.
LpResult lp_solve(const LpProblem& prob, const LpOptions& opt = {});

}  // namespace gaugecert
