// Random instance generation and empirical checks of the linear-rate
// robust-recovery bounds for noise-constrained and Tikhonov recovery.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gaugecert/config.hpp"
#include "gaugecert/gauge.hpp"
#include "gaugecert/linalg.hpp"

namespace gaugecert {

enum class NoiseModel { Sphere, Adversarial };
const char* to_string(NoiseModel m);

struct InstanceConfig {
  GaugeKind kind = GaugeKind::L1;
  Index m = 4;
  Index n = 8;           // vector length; side length k for SdpTrace (n = k*k)
  Index sparsity = 1;    // nonzeros, active groups, or cosupport-free jumps
  Index rank = 1;        // Nuclear / SdpTrace
  Index rows = 0, cols = 0;  // Nuclear shape; rows * cols = n when set
  Index group_size = 2;
  double delta = 0.0;
  NoiseModel noise = NoiseModel::Sphere;
};

struct ProblemInstance {
  std::string id;
  Gauge gauge;
  Matrix A;
  Vector x0, b0, omega, b;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

// Portable generator: mt19937_64 bits, Box-Muller normals.
class InstanceRng {
 public:
  explicit InstanceRng(std::uint64_t seed) : gen_(seed) {}
  double uniform();
  double normal();
  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

ProblemInstance gen_instance(const InstanceConfig& cfg, std::uint64_t seed);
// Same instance with fresh noise of level delta: sphere noise draws from noise_seed.
ProblemInstance with_noise(const ProblemInstance& inst, double delta, NoiseModel model, std::uint64_t noise_seed);

// Euclidean Lipschitz constant of the gauge (on its domain).
double gauge_lipschitz(const Gauge& J);

struct SharpnessData {
  bool applicable = false;
  std::string note;
  double kappa = 0.0, alpha = 0.0;
  Vector y0;
};
SharpnessData certify_for_recovery(const Gauge& J, const Matrix& A, const Vector& x0,
                                   const Config& cfg = default_config());

struct RecoveryRow {
  std::string instance_id;
  GaugeKind kind = GaugeKind::L1;
  Index m = 0, n = 0;
  NoiseModel noise = NoiseModel::Sphere;
  double delta = 0.0, mu = 0.0, c1 = 0.0;
  bool applicable = false;
  std::string note;
  double err_mozorov = 0.0, bound_mozorov = kInf, bound_mozorov_lip = kInf;
  double err_tikhonov = 0.0, bound_tikhonov_y0 = kInf, bound_tikhonov_lip = kInf;
  double L = 0.0, kappa = 0.0, alpha = 0.0, pinv_norm = 0.0, y0_norm = 0.0;
  bool solver_failed = false;
  bool pass = true;
};

struct RecoveryReport {
  std::vector<RecoveryRow> rows;
  std::size_t applicable = 0, passed = 0, failed = 0, errors = 0;
  double max_violation = 0.0;  // max over rows of error - bound (0 when all hold)
  double pass_rate() const { return applicable ? static_cast<double>(passed) / static_cast<double>(applicable) : 1.0; }
  bool all_pass() const { return failed == 0 && errors == 0; }
};

inline constexpr double kBoundSlack = 1e-5;

// One row at the instance's own noise level with mu = c1 * delta.
RecoveryRow recovery_row(const ProblemInstance& inst, const SharpnessData& sharp, double c1,
                         const Config& cfg = default_config());
RecoveryReport run_recovery(const ProblemInstance& inst, double c1, const Config& cfg = default_config());

struct SweepSpec {
  std::vector<InstanceConfig> configs;
  std::vector<std::uint64_t> seeds;
  std::vector<double> deltas;
  std::vector<double> c1s = {1.0};
  std::vector<NoiseModel> noises = {NoiseModel::Sphere};
};

// Rows ordered by (config, seed, noise, delta, c1).
RecoveryReport sweep(const SweepSpec& spec, const Config& cfg = default_config());

// Noise sweep on one fixed instance: seeds drive the sphere noise, and the
// seed-independent adversarial rows are emitted once per delta.
RecoveryReport sweep_instance(const ProblemInstance& base, const SharpnessData& sharp,
                              const std::vector<std::uint64_t>& seeds, const std::vector<double>& deltas,
                              const std::vector<double>& c1s, const std::vector<NoiseModel>& noises,
                              const Config& cfg = default_config());

void append_row(RecoveryReport& rep, const RecoveryRow& row);

// Fixed CSV header and shortest round-trip number formatting.
std::string recovery_csv(const RecoveryReport& rep);
std::string format_double(double v);

}  // namespace gaugecert
