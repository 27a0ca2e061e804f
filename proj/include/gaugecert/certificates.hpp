// Uniqueness and sharpness certificates for gauge-regularised linear inverse
// problems, with specialised checks per regulariser.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugecert/cone.hpp"
#include "gaugecert/config.hpp"
#include "gaugecert/gauge.hpp"
#include "gaugecert/linalg.hpp"

namespace gaugecert {

enum class Verdict { Yes, No, Unknown };
const char* to_string(Verdict v);

struct ConditionCheck {
  std::string id;
  Verdict verdict = Verdict::Unknown;
  bool certified = false;
  std::string detail;
};

struct CertificateReport {
  Verdict is_sharp = Verdict::Unknown;
  Verdict is_unique = Verdict::Unknown;
  // Sharpness constant: min of dJ(x0) over unit kernel directions (+inf for a trivial kernel).
  std::optional<double> kappa;
  bool kappa_certified = false;
  std::optional<Vector> kappa_direction;
  // Minimum conic singular value of A on the critical cone.
  std::optional<double> alpha;
  bool alpha_certified = false;
  bool kernel_trivial = false;
  std::optional<Vector> dual_certificate;
  double ri_margin = -kInf;
  // Specialised checks: the certificate LP optimum (1 - margin form).
  std::optional<double> lp_value;
  std::vector<ConditionCheck> conditions;
  std::vector<std::string> notes;
};

// Two certified routes to the same verdict disagreed away from the numerical boundary.
class InternalDisagreement : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DualCertificate {
  Vector y;
  double margin = -kInf;  // interior slack of A'y in dJ(x0)
  bool exact = false;     // LP path; otherwise a verified witness from a convex search
  // Upper bound on the best achievable margin when the search proves one;
  // a bound <= the interior threshold certifies that no interior certificate exists.
  std::optional<double> margin_upper_bound;
};

// max margin s.t. A'y in dJ(x0). Empty when no y puts A'y in the affine hull of dJ(x0).
std::optional<DualCertificate> find_dual_certificate(const Gauge& J, const Matrix& A, const Vector& x0,
                                                     const Config& cfg = default_config());

struct CheckOptions {
  bool compute_kappa = true;
  bool compute_alpha = true;
};

CertificateReport check_sharp(const Gauge& J, const Matrix& A, const Vector& x0,
                              const Config& cfg = default_config(), const CheckOptions& opt = {});
CertificateReport check_unique(const Gauge& J, const Matrix& A, const Vector& x0,
                               const Config& cfg = default_config(), const CheckOptions& opt = {});

class NotStationary : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Uniqueness (and sharpness) for the Tikhonov problem at a computed solution xhat.
CertificateReport check_sharp_qp(const Gauge& J, const Matrix& A, const Vector& b, double mu, const Vector& xhat,
                                 const Config& cfg = default_config());

// Dt is the analysis operator (rows are the analysis atoms): J(x) = ||Dt x||_1.
CertificateReport analysis_check(const Matrix& A, const Matrix& Dt, const Vector& x0,
                                 const Config& cfg = default_config());
CertificateReport fuchs_check(const Matrix& A, const Vector& x0, const Config& cfg = default_config());
CertificateReport wsl1_check(const Matrix& A, const Vector& w, const Vector& x0,
                             const Config& cfg = default_config());
// Phi acts on the row-major vectorisation of X0.
CertificateReport nuclear_check(const Matrix& Phi, const Matrix& X0, const Config& cfg = default_config());
CertificateReport nonneg_l1_check(const Matrix& A, const Vector& x0, const Config& cfg = default_config());
CertificateReport sdp_trace_check(const Matrix& Phi, const Matrix& C, const Matrix& X0,
                                  const Config& cfg = default_config());

// Whether {X : Phi(X) = Phi(X0)} contains a positive definite matrix, by
// maximising the smallest eigenvalue over the feasible affine family.
struct InteriorCheck {
  Verdict verdict = Verdict::Unknown;
  double best_min_eig = -kInf;
};
InteriorCheck sdp_feasible_interior(const Matrix& Phi, const Matrix& X0, const Config& cfg = default_config());

struct LipschitzSample {
  Vector v, w;
  bool solved = false;
  double displacement = 0.0;
  double ratio = 0.0;
};
struct LipschitzProbe {
  std::vector<LipschitzSample> samples;
  double max_ratio = 0.0;
};

class PreconditionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// For each (v, w), a point of {x : x in dJ*(A'y0 + v), A x - A x0 = w} nearest
// to x0 in l1, and the ratio ||x - x0|| / (||v|| + ||w||). Polyhedral gauges;
// requires a sharp x0.
LipschitzProbe upper_lipschitz_probe(const Gauge& J, const Matrix& A, const Vector& x0, const Vector& y0,
                                     const std::vector<std::pair<Vector, Vector>>& grid,
                                     const Config& cfg = default_config());

}  // namespace gaugecert
