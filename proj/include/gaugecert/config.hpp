// Numerical tolerances and enumeration caps shared by every module.
#pragma once

#include <cstddef>

namespace gaugecert {

struct Tolerances {
  // Support detection: |x_i| > support_rel * ||x||_inf.
  double support_rel = 1e-10;
  // Singular values below rank_rel * sigma_max count as zero (rank of x0).
  double rank_rel = 1e-8;
  // Rank tolerance used for kernels of measurement operators.
  double kernel_rel = 1e-10;
  // Nonnegativity and PSD acceptance for conic domains.
  double nonneg_abs = 1e-10;
  double psd_rel = 1e-8;
  // A certificate is in the relative interior when its margin exceeds this.
  double ri_margin = 1e-8;
  // An open inequality "< 1" is read as "<= 1 - strict_one".
  double strict_one = 1e-6;
  // LP optimality (KKT residual) tolerance.
  double lp_kkt = 1e-8;
};

struct Limits {
  std::size_t wsl1_vertex_cap = 4096;
  std::size_t pl_piece_cap = 4096;
  std::size_t lp_variable_cap = 2000;
  std::size_t lp_max_iter = 50000;
  std::size_t nsp_support_cap = 14;
  std::size_t multistart_restarts = 200;
  std::size_t splitting_max_iter = 100000;
  double grid_resolution = 1e-3;
  double grid_refine = 1e-6;
};

struct Config {
  Tolerances tol;
  Limits lim;
};

// Process-wide defaults. Environment variables CERT_TOL (ri margin),
// LP_MAXITER and PROBE_RESTARTS override the corresponding fields.
const Config& default_config();
Config config_from_env();

}  // namespace gaugecert
