// Cone conditions: kernel bases, exact polyhedral cone-triviality tests,
// sphere minimisation of positively homogeneous functions, minimum conic
// singular values and null-space-property constants.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "gaugecert/config.hpp"
#include "gaugecert/gauge.hpp"
#include "gaugecert/linalg.hpp"

namespace gaugecert {

// {h : exists u with Gh h + Gu u <= 0}.
struct LiftedCone {
  Matrix Gh;
  Matrix Gu;
};

// Epigraph lift of {h : f(h) <= 0}.
LiftedCone lift_sublevel(const PiecewiseLinear& f);

// True iff C ∩ span(K) = {0}; 2k LPs over the box |t| <= 1.
bool cone_trivial(const LiftedCone& C, const Matrix& K, const Config& cfg = default_config());

enum class ProbeMethod { ExactPL, AngularGrid, MultistartSubgradient, LPLifted };
const char* to_string(ProbeMethod m);

struct ConeProbeResult {
  double value = kInf;
  Vector minimizer;
  ProbeMethod method = ProbeMethod::ExactPL;
  bool certified = false;
  std::size_t restarts_used = 0;
};

// A convex positively homogeneous function on R^n. pl is set when f is
// piecewise linear with an explicit representation; subgrad is optional.
struct ProbeFunction {
  std::function<double(const Vector&)> eval;
  std::function<Vector(const Vector&)> subgrad;
  std::optional<PiecewiseLinear> pl;

  static ProbeFunction from_pl(const PiecewiseLinear& f);
  static ProbeFunction dir_deriv_of(const Gauge& J, const Vector& x0, const Config& cfg = default_config());
};

// Minimum of f over the unit sphere of span(K), K orthonormal with k >= 1 columns.
ConeProbeResult sphere_min(const ProbeFunction& f, const Matrix& K, const Config& cfg = default_config());

// inf ||A h|| / ||h|| over the cone {h : cone(h) <= 0}. Returns +inf when the cone is {0}.
ConeProbeResult min_conic_singular(const Matrix& A, const ProbeFunction& cone,
                                   const Config& cfg = default_config());

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// max over h in Ker A \ {0} of ||h_I||_1 / ||h||_1 (0 for a trivial kernel).
double nsp_constant(const Matrix& A, const std::vector<Index>& I, const Config& cfg = default_config());

}  // namespace gaugecert
