#include "gaugecert/recovery.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "gaugecert/certificates.hpp"
#include "gaugecert/solvers.hpp"

namespace gaugecert {

const char* to_string(NoiseModel m) { return m == NoiseModel::Sphere ? "sphere" : "adversarial"; }

double InstanceRng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double InstanceRng::normal() {
  const double u1 = 1.0 - uniform(), u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

namespace {

Matrix normal_matrix(InstanceRng& rng, Index r, Index c) {
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = rng.normal();
  return M;
}

// k distinct indices from {0..n-1}, in increasing order.
std::vector<Index> choose(InstanceRng& rng, Index n, Index k) {
  std::vector<Index> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(rng.bits() % static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
  }
  idx.resize(static_cast<size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

double unit_scale(InstanceRng& rng) { return 0.5 + rng.uniform(); }

Matrix first_difference(Index n) {
  Matrix D = Matrix::Zero(std::max<Index>(n - 1, 0), n);
  for (Index i = 0; i + 1 < n; ++i) {
    D(i, i) = -1.0;
    D(i, i + 1) = 1.0;
  }
  return D;
}

std::pair<Index, Index> matrix_shape(const InstanceConfig& c) {
  if (c.rows > 0 && c.cols > 0) {
    if (c.rows * c.cols != c.n) throw std::invalid_argument("rows * cols must equal n");
    return {c.rows, c.cols};
  }
  Index r = static_cast<Index>(std::sqrt(static_cast<double>(c.n)));
  while (r > 1 && c.n % r) --r;
  return {r, c.n / r};
}

std::string make_id(const InstanceConfig& c, std::uint64_t seed) {
  std::ostringstream os;
  os << to_string(c.kind) << "-m" << c.m << "-n" << c.n << "-s"
     << (c.kind == GaugeKind::Nuclear || c.kind == GaugeKind::SdpTrace ? c.rank : c.sparsity) << "-seed" << seed;
  return os.str();
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

ProblemInstance gen_instance(const InstanceConfig& c, std::uint64_t seed) {
  if (c.m < 1 || c.n < 1) throw std::invalid_argument("instance dimensions must be positive");
  if (c.sparsity < 0 || c.rank < 0 || !(c.delta >= 0)) throw std::invalid_argument("invalid instance parameters");
  InstanceRng rng(seed);
  ProblemInstance inst;
  inst.id = make_id(c, seed);
  inst.seed = seed;
  Index dim = c.n;
  switch (c.kind) {
    case GaugeKind::L1:
    case GaugeKind::NonnegL1:
    case GaugeKind::WSL1: {
      if (c.sparsity > c.n) throw std::invalid_argument("sparsity exceeds n");
      inst.x0 = Vector::Zero(c.n);
      for (Index i : choose(rng, c.n, c.sparsity)) {
        const double sgn = c.kind == GaugeKind::NonnegL1 || rng.uniform() < 0.5 ? 1.0 : -1.0;
        inst.x0(i) = sgn * unit_scale(rng);
      }
      if (c.kind == GaugeKind::L1) inst.gauge = Gauge::l1(c.n);
      else if (c.kind == GaugeKind::NonnegL1) inst.gauge = Gauge::nonneg_l1(c.n);
      else {
        Vector w(c.n);
        for (Index i = 0; i < c.n; ++i) w(i) = c.n > 1 ? 2.0 - static_cast<double>(i) / static_cast<double>(c.n - 1) : 1.0;
        inst.gauge = Gauge::wsl1(w);
      }
      break;
    }
    case GaugeKind::GroupL12: {
      if (c.group_size < 1) throw std::invalid_argument("group size must be positive");
      std::vector<std::vector<Index>> groups;
      for (Index i = 0; i < c.n; i += c.group_size) {
        std::vector<Index> g;
        for (Index j = i; j < std::min(c.n, i + c.group_size); ++j) g.push_back(j);
        groups.push_back(g);
      }
      const Index ng = static_cast<Index>(groups.size());
      if (c.sparsity > ng) throw std::invalid_argument("sparsity exceeds the number of groups");
      inst.x0 = Vector::Zero(c.n);
      for (Index gi : choose(rng, ng, c.sparsity))
        for (Index j : groups[static_cast<size_t>(gi)]) inst.x0(j) = rng.normal();
      inst.gauge = Gauge::group_l12(groups, c.n);
      break;
    }
    case GaugeKind::AnalysisL1: {
      // Piecewise-constant signal with `sparsity` jumps under the first-difference operator.
      if (c.sparsity > c.n - 1) throw std::invalid_argument("too many jumps for n");
      inst.x0 = Vector::Zero(c.n);
      if (c.sparsity > 0) {
        double level = rng.normal();
        const std::vector<Index> jumps = choose(rng, c.n - 1, c.sparsity);
        size_t next = 0;
        for (Index i = 0; i < c.n; ++i) {
          if (next < jumps.size() && i == jumps[next] + 1) {
            level += (rng.uniform() < 0.5 ? -1.0 : 1.0) * unit_scale(rng);
            ++next;
          }
          inst.x0(i) = level;
        }
      }
      inst.gauge = Gauge::analysis_l1(first_difference(c.n));
      break;
    }
    case GaugeKind::Nuclear: {
      const auto [r, q] = matrix_shape(c);
      if (c.rank > std::min(r, q)) throw std::invalid_argument("rank exceeds the matrix shape");
      const Matrix X = normal_matrix(rng, r, c.rank) * normal_matrix(rng, c.rank, q);
      inst.x0 = vec(X);
      inst.gauge = Gauge::nuclear(r, q);
      break;
    }
    case GaugeKind::SdpTrace: {
      const Index k = c.n;
      if (c.rank > k) throw std::invalid_argument("rank exceeds the matrix side");
      const Matrix G = normal_matrix(rng, k, c.rank);
      inst.x0 = vec(G * G.transpose());
      inst.gauge = Gauge::sdp_trace(Matrix::Identity(k, k));
      dim = k * k;
      break;
    }
  }
  inst.A = normal_matrix(rng, c.m, dim);
  inst.b0 = inst.A * inst.x0;
  return with_noise(inst, c.delta, c.noise, mix(seed, 0));
}

ProblemInstance with_noise(const ProblemInstance& base, double delta, NoiseModel model, std::uint64_t noise_seed) {
  if (!(delta >= 0)) throw std::invalid_argument("noise level must be nonnegative");
  ProblemInstance inst = base;
  inst.delta = delta;
  const Index m = inst.A.rows();
  Vector dir = Vector::Zero(m);
  if (model == NoiseModel::Adversarial && inst.b0.norm() > 0) {
    dir = inst.b0.normalized();
  } else if (model == NoiseModel::Adversarial) {
    dir(0) = 1.0;
  } else {
    InstanceRng rng(noise_seed);
    while (dir.norm() == 0.0)
      for (Index i = 0; i < m; ++i) dir(i) = rng.normal();
    dir.normalize();
  }
  inst.omega = delta * dir;
  inst.b = inst.b0 + inst.omega;
  return inst;
}

double gauge_lipschitz(const Gauge& J) {
  switch (J.kind) {
    case GaugeKind::L1:
    case GaugeKind::NonnegL1: return std::sqrt(static_cast<double>(J.n));
    case GaugeKind::WSL1: return J.w.norm();
    case GaugeKind::GroupL12: return std::sqrt(static_cast<double>(J.groups.size()));
    case GaugeKind::AnalysisL1: return std::sqrt(static_cast<double>(J.Dt.rows())) * sigma_max(J.Dt);
    case GaugeKind::Nuclear: return std::sqrt(static_cast<double>(std::min(J.rows, J.cols)));
    case GaugeKind::SdpTrace: return J.C.norm();
  }
  return kInf;
}

SharpnessData certify_for_recovery(const Gauge& J, const Matrix& A, const Vector& x0, const Config& cfg) {
  SharpnessData s;
  const CertificateReport r = check_sharp(J, A, x0, cfg);
  if (r.is_sharp != Verdict::Yes) {
    s.note = std::string("bounds not applicable: sharpness ") + to_string(r.is_sharp);
    return s;
  }
  if (!r.kappa_certified || !r.alpha_certified || !r.kappa || !r.alpha) {
    s.note = "bounds not applicable: kappa or alpha not certified";
    return s;
  }
  s.applicable = true;
  s.kappa = *r.kappa;
  s.alpha = *r.alpha;
  s.y0 = *r.dual_certificate;
  return s;
}

RecoveryRow recovery_row(const ProblemInstance& inst, const SharpnessData& sharp, double c1, const Config& cfg) {
  if (!(c1 > 0)) throw std::invalid_argument("c1 must be positive");
  RecoveryRow row;
  row.instance_id = inst.id;
  row.kind = inst.gauge.kind;
  row.m = inst.A.rows();
  row.n = inst.gauge.n;
  row.delta = inst.delta;
  row.c1 = c1;
  row.mu = c1 * inst.delta;
  row.applicable = sharp.applicable;
  row.note = sharp.note;
  if (!sharp.applicable) return row;

  const Gauge& J = inst.gauge;
  const double d = inst.delta;
  row.L = gauge_lipschitz(J);
  row.kappa = sharp.kappa;
  row.alpha = sharp.alpha;
  Eigen::JacobiSVD<Matrix> svd(inst.A);
  const Vector sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  double smin = 0.0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * smax) smin = sv(i);
  row.pinv_norm = smin > 0 ? 1.0 / smin : 0.0;
  row.y0_norm = sharp.y0.norm();

  row.bound_mozorov = 2.0 * d / row.alpha;
  row.bound_tikhonov_y0 = 2.0 * (1.0 + 2.0 * c1 * row.y0_norm) * d / row.alpha;
  if (std::isfinite(row.kappa)) {
    row.bound_mozorov_lip = 2.0 * (row.L + row.kappa) * row.pinv_norm / row.kappa * d;
    const double inner = 1.0 / c1 + (row.kappa + row.L) * row.pinv_norm;
    row.bound_tikhonov_lip = c1 / (2.0 * row.kappa) * inner * inner * d;
  } else {
    row.bound_mozorov_lip = 2.0 * row.pinv_norm * d;
    row.bound_tikhonov_lip = d > 0 ? kInf : 0.0;
  }

  const SolveResult moz = solve_mozorov(J, inst.A, inst.b, d, cfg);
  if (moz.status != SolveStatus::Optimal) {
    row.pass = false;
    row.solver_failed = true;
    row.note = std::string("mozorov solve: ") + to_string(moz.status);
    return row;
  }
  row.err_mozorov = (moz.point - inst.x0).norm();
  if (d > 0) {
    const SolveResult tik = solve_tikhonov(J, inst.A, inst.b, row.mu, cfg);
    if (tik.status != SolveStatus::Optimal) {
      row.pass = false;
      row.solver_failed = true;
      row.note = std::string("tikhonov solve: ") + to_string(tik.status);
      return row;
    }
    row.err_tikhonov = (tik.point - inst.x0).norm();
  } else {
    // mu = 0: the Tikhonov solutions converge to the equality-constrained one.
    row.err_tikhonov = row.err_mozorov;
  }
  row.pass = row.err_mozorov <= row.bound_mozorov + kBoundSlack &&
             row.err_mozorov <= row.bound_mozorov_lip + kBoundSlack &&
             row.err_tikhonov <= row.bound_tikhonov_y0 + kBoundSlack &&
             row.err_tikhonov <= row.bound_tikhonov_lip + kBoundSlack;
  return row;
}

void append_row(RecoveryReport& rep, const RecoveryRow& row) {
  rep.rows.push_back(row);
  if (!row.applicable) return;
  ++rep.applicable;
  if (row.solver_failed) {
    ++rep.errors;
    return;
  }
  if (row.pass) ++rep.passed;
  else ++rep.failed;
  for (const auto& [e, b] : {std::pair{row.err_mozorov, row.bound_mozorov},
                             std::pair{row.err_mozorov, row.bound_mozorov_lip},
                             std::pair{row.err_tikhonov, row.bound_tikhonov_y0},
                             std::pair{row.err_tikhonov, row.bound_tikhonov_lip}})
    if (std::isfinite(b)) rep.max_violation = std::max(rep.max_violation, e - b);
}

RecoveryReport run_recovery(const ProblemInstance& inst, double c1, const Config& cfg) {
  RecoveryReport rep;
  append_row(rep, recovery_row(inst, certify_for_recovery(inst.gauge, inst.A, inst.x0, cfg), c1, cfg));
  return rep;
}

RecoveryReport sweep(const SweepSpec& spec, const Config& cfg) {
  if (spec.configs.empty() || spec.seeds.empty() || spec.deltas.empty() || spec.c1s.empty() || spec.noises.empty())
    throw std::invalid_argument("sweep grid must be nonempty");
  RecoveryReport rep;
  for (const InstanceConfig& c : spec.configs) {
    for (std::uint64_t seed : spec.seeds) {
      InstanceConfig clean = c;
      clean.delta = 0.0;
      const ProblemInstance base = gen_instance(clean, seed);
      const SharpnessData sharp = certify_for_recovery(base.gauge, base.A, base.x0, cfg);
      for (size_t ni = 0; ni < spec.noises.size(); ++ni) {
        for (size_t di = 0; di < spec.deltas.size(); ++di) {
          ProblemInstance inst = with_noise(base, spec.deltas[di], spec.noises[ni], mix(seed, di + 1));
          inst.id = base.id + "-" + to_string(spec.noises[ni]);
          for (double c1 : spec.c1s) append_row(rep, recovery_row(inst, sharp, c1, cfg));
        }
      }
    }
  }
  return rep;
}

RecoveryReport sweep_instance(const ProblemInstance& base, const SharpnessData& sharp,
                              const std::vector<std::uint64_t>& seeds, const std::vector<double>& deltas,
                              const std::vector<double>& c1s, const std::vector<NoiseModel>& noises,
                              const Config& cfg) {
  if (seeds.empty() || deltas.empty() || c1s.empty() || noises.empty())
    throw std::invalid_argument("sweep grid must be nonempty");
  RecoveryReport rep;
  for (NoiseModel nm : noises) {
    const std::size_t nseeds = nm == NoiseModel::Adversarial ? 1 : seeds.size();
    for (std::size_t si = 0; si < nseeds; ++si) {
      for (std::size_t di = 0; di < deltas.size(); ++di) {
        ProblemInstance inst = with_noise(base, deltas[di], nm, mix(seeds[si], di + 1));
        inst.id = base.id + "-" + to_string(nm) + (nm == NoiseModel::Sphere ? "-s" + std::to_string(seeds[si]) : "");
        inst.seed = seeds[si];
        for (double c1 : c1s) append_row(rep, recovery_row(inst, sharp, c1, cfg));
      }
    }
  }
  return rep;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string recovery_csv(const RecoveryReport& rep) {
  std::ostringstream os;
  os << "instance_id,gauge,m,n,delta,mu,err_mozorov,bound_mozorov,err_tikhonov,bound_tikhonov_y0,"
        "bound_tikhonov_lip,kappa,alpha,pass\n";
  for (const RecoveryRow& r : rep.rows) {
    os << r.instance_id << ',' << to_string(r.kind) << ',' << r.m << ',' << r.n << ',' << format_double(r.delta) << ','
       << format_double(r.mu) << ',';
    if (r.applicable) {
      os << format_double(r.err_mozorov) << ',' << format_double(r.bound_mozorov) << ','
         << format_double(r.err_tikhonov) << ',' << format_double(r.bound_tikhonov_y0) << ','
         << format_double(r.bound_tikhonov_lip) << ',' << format_double(r.kappa) << ',' << format_double(r.alpha)
         << ',' << (r.pass ? "1" : "0");
    } else {
      os << ",,,,,,,na";
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace gaugecert
