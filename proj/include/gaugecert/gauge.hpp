// Gauge regularizers: values, proximal maps, directional derivatives,
// polar gauges and subdifferential face models.
//
// Points are Eigen vectors. Matrix-valued gauges (Nuclear, SdpTrace) act on
// row-major vectorisations, so a measurement operator is always a dense matrix.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugecert/config.hpp"
#include "gaugecert/linalg.hpp"

namespace gaugecert {

enum class GaugeKind { L1, AnalysisL1, WSL1, GroupL12, Nuclear, NonnegL1, SdpTrace };

const char* to_string(GaugeKind k);
std::optional<GaugeKind> gauge_kind_from_string(const std::string& s);

struct Gauge {
  GaugeKind kind = GaugeKind::L1;
  Index n = 0;       // length of the (vectorised) argument
  Matrix Dt;         // AnalysisL1: p x n analysis operator, J(x) = ||Dt x||_1
  Vector w;          // WSL1: nonincreasing nonnegative weights
  std::vector<std::vector<Index>> groups;  // GroupL12: partition of {0..n-1}
  Index rows = 0;    // Nuclear / SdpTrace matrix shape
  Index cols = 0;
  Matrix C;          // SdpTrace: symmetric PSD cost

  static Gauge l1(Index n);
  static Gauge analysis_l1(const Matrix& Dt);
  static Gauge wsl1(const Vector& w);
  static Gauge group_l12(const std::vector<std::vector<Index>>& groups, Index n);
  static Gauge nuclear(Index rows, Index cols);
  static Gauge nonneg_l1(Index n);
  static Gauge sdp_trace(const Matrix& C);

  bool polyhedral() const;
  // True when dom J is the whole space.
  bool full_domain() const { return kind != GaugeKind::NonnegL1 && kind != GaugeKind::SdpTrace; }
  // Orthonormal basis of the linear space J lives on; symmetric matrices for SdpTrace.
  Matrix space_basis() const;
};

class GaugeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double eval(const Gauge& J, const Vector& x, const Tolerances& tol = {});
Vector prox(const Gauge& J, const Vector& x, double tau);
// One-sided directional derivative J'(x0; h); +inf when h leaves the tangent cone.
double dir_deriv(const Gauge& J, const Vector& x0, const Vector& h, const Tolerances& tol = {});
// Polar gauge J°(z); +inf when z is outside the polar cone's domain.
double polar_eval(const Gauge& J, const Vector& z, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Subdifferential faces.

enum class ParamDomain {
  Box,        // ||w||_inf <= 1
  Spectral,   // w = vec(W), sigma_1(W) <= 1, W of shape param_rows x param_cols
  Simplex,    // w >= 0, sum w <= 1 (weights on vertices 1.. relative to vertex 0)
  GroupBall,  // ||w_g||_2 <= 1 per block of sizes param_groups
  UpperOne,   // w_i <= 1
  Psd,        // w = coordinates of a symmetric matrix in sym_basis, matrix PSD
  Point,      // no freedom
};

struct SubdiffFace {
  Vector base;              // z0 in dJ(x0)
  Matrix param_map;         // z = base + param_map * w
  ParamDomain domain = ParamDomain::Point;
  Index param_rows = 0, param_cols = 0;
  std::vector<Index> param_groups;
  Matrix tangent_basis;     // orthonormal basis of aff dJ(x0) - z0
  std::vector<Vector> vertices;  // WSL1 only
  // Cached structure used by the margin function.
  std::vector<Index> active;     // support / nonzero groups
  Vector pattern;                // AnalysisL1: sign pattern u0 with base = Dt' u0
  Matrix frame_left, frame_right;  // Nuclear U2, V2; SdpTrace E (left) and U (right)
  // True when ri dJ(x0) may be strictly larger than the image of the parameter
  // interior (AnalysisL1 with a column-rank-deficient analysis operator).
  bool ri_gap_flag = false;
};

SubdiffFace subdiff_face(const Gauge& J, const Vector& x0, const Config& cfg = default_config());
Vector face_point(const SubdiffFace& F, const Vector& w);
// Projects a parameter vector onto the face's parameter domain.
Vector project_param(const SubdiffFace& F, const Vector& w);
// Interior slack of z inside dJ(x0): positive iff z is in the relative interior.
// Points off the affine hull return -inf.
double face_margin(const Gauge& J, const SubdiffFace& F, const Vector& z,
                   const Config& cfg = default_config());

// Signed-permutation vertices of the WSL1 subdifferential at x.
std::vector<Vector> wsl1_vertices(const Vector& w, const Vector& x, double support_rel,
                                  std::size_t cap);

// ---------------------------------------------------------------------------
// Piecewise-linear directional derivatives of polyhedral gauges:
//   f(h) = g'h + sum_i |a_i'h| + max_j b_j'h + indicator{ c_l'h <= 0 }.
struct PiecewiseLinear {
  Vector g;
  Matrix abs_rows;
  Matrix max_rows;
  Matrix cone_rows;
  Index dim() const { return g.size(); }
  double operator()(const Vector& h) const;
  // Composition h = K t.
  PiecewiseLinear restrict(const Matrix& K) const;
};

std::optional<PiecewiseLinear> dir_deriv_pl(const Gauge& J, const Vector& x0,
                                            const Config& cfg = default_config());

// Singular frame of a matrix point: X = U1 diag(s) V1', with U2, V2 completing bases.
struct SvdFrame {
  Matrix U1, V1, U2, V2;
  Vector s;
};
SvdFrame svd_frame(const Matrix& X, double rank_rel);

// Eigen frame of a PSD point: range basis U and kernel basis E.
struct PsdFrame {
  Matrix U, E;
};
PsdFrame psd_frame(const Matrix& X, double rank_rel);

Matrix sym(const Matrix& X);

}  // namespace gaugecert
