#include <gtest/gtest.h>

#include <cmath>

#include "gaugecert/gauge.hpp"
#include "gaugecert/lp.hpp"
#include "test_util.hpp"

using namespace gaugecert;
using testutil::Sampler;

namespace {

Vector V(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Definitional polar of WSL1: gauge of conv(signed permutations of w), by LP
// over all 2^n n! signed permutations.
double wsl1_polar_by_lp(const Vector& w, const Vector& z) {
  const Index n = w.size();
  std::vector<Index> perm(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
  std::vector<Vector> pts;
  do {
    for (int mask = 0; mask < (1 << n); ++mask) {
      Vector v(n);
      for (Index i = 0; i < n; ++i) v(i) = ((mask >> i) & 1 ? -1.0 : 1.0) * w(perm[static_cast<size_t>(i)]);
      pts.push_back(v);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  const Index P = static_cast<Index>(pts.size());
  LpProblem lp(P);
  lp.c.setOnes();
  lp.nonneg.assign(static_cast<size_t>(P), true);
  Matrix E(n, P);
  for (Index j = 0; j < P; ++j) E.col(j) = pts[static_cast<size_t>(j)];
  lp.add_eq_rows(E, z);
  const LpResult r = lp_solve(lp);
  return r.status == LpStatus::Optimal ? r.value : kInf;
}

std::vector<Gauge> sample_gauges() {
  Sampler s(11);
  std::vector<Gauge> out;
  out.push_back(Gauge::l1(4));
  out.push_back(Gauge::analysis_l1(s.normal_mat(5, 4)));
  out.push_back(Gauge::wsl1(V({3.0, 2.0, 2.0, 0.5})));
  out.push_back(Gauge::group_l12({{0, 1}, {2}, {3}}, 4));
  out.push_back(Gauge::nuclear(2, 3));
  out.push_back(Gauge::nonneg_l1(4));
  Matrix C = s.normal_mat(3, 3);
  out.push_back(Gauge::sdp_trace(C * C.transpose() + 0.1 * Matrix::Identity(3, 3)));
  return out;
}

// A random point in the domain of J.
Vector sample_point(const Gauge& J, Sampler& s) {
  switch (J.kind) {
    case GaugeKind::NonnegL1: return s.normal_vec(J.n).cwiseAbs();
    case GaugeKind::SdpTrace: {
      const Matrix B = s.normal_mat(J.rows, J.rows);
      return vec(B * B.transpose());
    }
    default: return s.normal_vec(J.n);
  }
}

}  // namespace

// ---------------------------------------------------------------- eval

TEST(GaugeEval, WorkedValues) {
  EXPECT_DOUBLE_EQ(eval(Gauge::l1(2), V({3, -4})), 7.0);
  EXPECT_DOUBLE_EQ(eval(Gauge::wsl1(V({2, 1})), V({1, 1})), 3.0);
  EXPECT_EQ(eval(Gauge::nonneg_l1(2), V({1, -0.5})), kInf);
  EXPECT_EQ(eval(Gauge::sdp_trace(Matrix::Identity(2, 2)), V({0, 1, 1, 0})), kInf);
  EXPECT_DOUBLE_EQ(eval(Gauge::nuclear(2, 2), V({2, 0, 0, -1})), 3.0);
  EXPECT_DOUBLE_EQ(eval(Gauge::group_l12({{0, 1}}, 2), V({3, 4})), 5.0);
}

TEST(GaugeEval, ShapeMismatchThrows) {
  EXPECT_THROW(eval(Gauge::l1(3), V({1, 2})), std::invalid_argument);
}

TEST(GaugeEval, ConstructorsRejectBadParameters) {
  EXPECT_THROW(Gauge::wsl1(V({1, 2})), std::invalid_argument);
  EXPECT_THROW(Gauge::wsl1(V({1, -1})), std::invalid_argument);
  EXPECT_THROW(Gauge::group_l12({{0}, {0, 1}}, 2), std::invalid_argument);
  EXPECT_THROW(Gauge::group_l12({{0}}, 2), std::invalid_argument);
  EXPECT_THROW(Gauge::sdp_trace((Matrix(2, 2) << 1, 2, 0, 1).finished()), std::invalid_argument);
  EXPECT_THROW(Gauge::sdp_trace((Matrix(2, 2) << -1, 0, 0, 1).finished()), std::invalid_argument);
}

TEST(GaugeEval, DiagonalNuclearEqualsL1) {
  Sampler s(3);
  for (int t = 0; t < 200; ++t) {
    const Vector d = s.normal_vec(3).cwiseAbs();
    Matrix X = d.asDiagonal();
    EXPECT_NEAR(eval(Gauge::nuclear(3, 3), vec(X)), eval(Gauge::l1(3), d), 1e-13);
  }
}

// ---------------------------------------------------------------- prox

TEST(GaugeProx, ScalarSoftThreshold) {
  EXPECT_DOUBLE_EQ(prox(Gauge::l1(1), V({2}), 1.0)(0), 1.0);
  EXPECT_THROW(prox(Gauge::l1(1), V({2}), 0.0), std::invalid_argument);
}

TEST(GaugeProx, NuclearMatchesDiagonalGrid) {
  // Grid oracle over diagonal 2x2 matrices: argmin 1/2||D - diag(3,.5)||^2 + |d1| + |d2|.
  auto obj = [](const Vector& d) {
    return 0.5 * (std::pow(d(0) - 3.0, 2) + std::pow(d(1) - 0.5, 2)) + std::abs(d(0)) + std::abs(d(1));
  };
  const Vector grid = testutil::grid_minimise(obj, V({-4, -4}), V({4, 4}), 81, 1e-4);
  EXPECT_NEAR(grid(0), 2.0, 1e-3);
  EXPECT_NEAR(grid(1), 0.0, 1e-3);
  const Vector P = prox(Gauge::nuclear(2, 2), V({3, 0, 0, 0.5}), 1.0);
  EXPECT_NEAR(P(0), 2.0, 1e-12);
  EXPECT_NEAR(P(1), 0.0, 1e-12);
  EXPECT_NEAR(P(2), 0.0, 1e-12);
  EXPECT_NEAR(P(3), 0.0, 1e-12);
}

TEST(GaugeProx, Wsl1MatchesFullResolutionGrid) {
  // Exhaustive grid on [-4,4]^2 at resolution 1e-3 (frozen result: (1, 0)).
  const Gauge J = Gauge::wsl1(V({2, 1}));
  const Vector x = V({3, 1});
  double best = kInf;
  Vector arg(2);
  for (int i = 0; i <= 8000; ++i) {
    const double a = -4.0 + 1e-3 * i;
    for (int j = 0; j <= 8000; ++j) {
      const double b = -4.0 + 1e-3 * j;
      const double hi = std::max(std::abs(a), std::abs(b)), lo = std::min(std::abs(a), std::abs(b));
      const double v = 0.5 * ((a - 3) * (a - 3) + (b - 1) * (b - 1)) + 2 * hi + lo;
      if (v < best) { best = v; arg << a, b; }
    }
  }
  EXPECT_NEAR(arg(0), 1.0, 1e-3);
  EXPECT_NEAR(arg(1), 0.0, 1e-3);
  const Vector P = prox(J, x, 1.0);
  EXPECT_NEAR(P(0), arg(0), 1e-3);
  EXPECT_NEAR(P(1), arg(1), 1e-3);
}

TEST(GaugeProx, Wsl1MatchesRefinedGridUpToFourDims) {
  Sampler s(5);
  for (Index n = 2; n <= 4; ++n) {
    for (int t = 0; t < 4; ++t) {
      Vector w = s.normal_vec(n).cwiseAbs();
      std::sort(w.data(), w.data() + n, std::greater<double>());
      const Gauge J = Gauge::wsl1(w);
      const Vector x = 2.0 * s.normal_vec(n);
      const double tau = s.uniform(0.2, 1.5);
      auto obj = [&](const Vector& z) { return 0.5 * (z - x).squaredNorm() + tau * eval(J, z); };
      const Vector lo = Vector::Constant(n, -6.0), hi = Vector::Constant(n, 6.0);
      const Vector g = testutil::grid_minimise(obj, lo, hi, n <= 3 ? 41 : 21, 1e-5);
      const Vector P = prox(J, x, tau);
      EXPECT_LE((P - g).cwiseAbs().maxCoeff(), 1e-3) << "n=" << n << " t=" << t;
      EXPECT_LE(obj(P), obj(g) + 1e-12);
    }
  }
}

TEST(GaugeProx, AnalysisProxIsOptimal) {
  Sampler s(8);
  const Gauge J = Gauge::analysis_l1(s.normal_mat(4, 3));
  for (int t = 0; t < 20; ++t) {
    const Vector x = s.normal_vec(3);
    const Vector P = prox(J, x, 0.7);
    auto obj = [&](const Vector& z) { return 0.5 * (z - x).squaredNorm() + 0.7 * eval(J, z); };
    for (int k = 0; k < 50; ++k) EXPECT_LE(obj(P), obj(P + 1e-3 * s.normal_vec(3)) + 1e-12);
  }
}

// ---------------------------------------------------------------- dir_deriv

TEST(GaugeDirDeriv, L1Worked) {
  const Gauge J = Gauge::l1(2);
  const Vector x0 = V({0.5, 0});
  const Vector h1 = V({1, -2}) / std::sqrt(5.0), h2 = V({-1, 2}) / std::sqrt(5.0);
  EXPECT_NEAR(dir_deriv(J, x0, h1), 3 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(dir_deriv(J, x0, h2), 1 / std::sqrt(5.0), 1e-15);
  const double t = 1e-6;
  EXPECT_NEAR((eval(J, x0 + t * h1) - eval(J, x0)) / t, 3 / std::sqrt(5.0), 1e-8);
  EXPECT_NEAR((eval(J, x0 + t * h2) - eval(J, x0)) / t, 1 / std::sqrt(5.0), 1e-8);
}

TEST(GaugeDirDeriv, NuclearWorked) {
  const Gauge J = Gauge::nuclear(2, 2);
  const Vector X0 = V({1, 0, 0, 0}), H = V({0, 0, 0, 1});
  EXPECT_NEAR(dir_deriv(J, X0, H), 1.0, 1e-14);
  const double t = 1e-6;
  EXPECT_NEAR((eval(J, X0 + t * H) - eval(J, X0)) / t, 1.0, 1e-8);
}

TEST(GaugeDirDeriv, ConicDirectionsLeavingTheConeAreInfinite) {
  EXPECT_EQ(dir_deriv(Gauge::nonneg_l1(2), V({1, 0}), V({0, -1})), kInf);
  EXPECT_DOUBLE_EQ(dir_deriv(Gauge::nonneg_l1(2), V({1, 0}), V({-1, 1})), 0.0);
  const Gauge S = Gauge::sdp_trace(Matrix::Identity(2, 2));
  EXPECT_EQ(dir_deriv(S, V({1, 0, 0, 0}), V({0, 0, 0, -1})), kInf);
  EXPECT_DOUBLE_EQ(dir_deriv(S, V({1, 0, 0, 0}), V({0, 1, 1, 0})), 0.0);
}

TEST(GaugeDirDeriv, DifferenceQuotientsAgreeForAllKinds) {
  Sampler s(21);
  for (const Gauge& J : sample_gauges()) {
    for (int trial = 0; trial < 200; ++trial) {
      Vector x0 = sample_point(J, s);
      // Plant zeros / rank deficiency so nonsmooth branches are exercised.
      if (J.kind == GaugeKind::L1 || J.kind == GaugeKind::NonnegL1 || J.kind == GaugeKind::WSL1 ||
          J.kind == GaugeKind::GroupL12)
        x0(trial % J.n) = 0.0;
      if (J.kind == GaugeKind::WSL1 && trial % 3 == 0) x0(1) = x0(0);
      Vector h = s.unit(J.n);
      if (J.kind == GaugeKind::NonnegL1)
        for (Index i = 0; i < J.n; ++i)
          if (x0(i) == 0.0) h(i) = std::abs(h(i));
      if (J.kind == GaugeKind::SdpTrace) h = vec(sym(unvec(h, J.rows, J.rows)));
      const double d = dir_deriv(J, x0, h);
      ASSERT_TRUE(std::isfinite(d)) << to_string(J.kind);
      const double t1 = 1e-6, t2 = 1e-4;
      const double q1 = (eval(J, x0 + t1 * h) - eval(J, x0)) / t1;
      const double q2 = (eval(J, x0 + t2 * h) - eval(J, x0)) / t2;
      EXPECT_NEAR(q1, d, 1e-4 * std::max(1.0, std::abs(d))) << to_string(J.kind) << " " << trial;
      // Difference quotients of a convex function are nondecreasing in t.
      EXPECT_LE(q1, q2 + 1e-7) << to_string(J.kind);
    }
  }
}

// ---------------------------------------------------------------- subdiff_face

TEST(GaugeFace, L1Worked) {
  const Gauge J = Gauge::l1(2);
  const SubdiffFace F = subdiff_face(J, V({0.5, 0}));
  EXPECT_EQ(F.base, V({1, 0}));
  ASSERT_EQ(F.param_map.cols(), 1);
  EXPECT_EQ(F.param_map.col(0), V({0, 1}));
  EXPECT_EQ(F.domain, ParamDomain::Box);
  EXPECT_NEAR(face_margin(J, F, V({1, 0.3})), 0.7, 1e-15);
  EXPECT_NEAR(face_margin(J, F, V({1, -1})), 0.0, 1e-15);
  EXPECT_EQ(face_margin(J, F, V({0.9, 0})), -kInf);
}

TEST(GaugeFace, Wsl1VerticesWorked) {
  const SubdiffFace F = subdiff_face(Gauge::wsl1(V({2, 1})), V({1, 1}));
  ASSERT_EQ(F.vertices.size(), 2u);
  std::vector<Vector> expect{V({2, 1}), V({1, 2})};
  for (const Vector& e : expect)
    EXPECT_TRUE(std::any_of(F.vertices.begin(), F.vertices.end(), [&](const Vector& v) { return v == e; }));
  const Gauge J = Gauge::wsl1(V({2, 1}));
  EXPECT_NEAR(face_margin(J, F, V({1.5, 1.5})), 0.5, 1e-9);
  EXPECT_NEAR(face_margin(J, F, V({2, 1})), 0.0, 1e-9);
}

TEST(GaugeFace, Wsl1VertexCountWithZerosAndTies) {
  // |x| = (1, 1, 0, 0) with distinct weights: 2! * 2! orders, 2^2 signs on the zero block.
  const auto V4 = wsl1_vertices(V({4, 3, 2, 1}), V({1, -1, 0, 0}), 1e-10, 4096);
  EXPECT_EQ(V4.size(), 16u);
  for (const Vector& v : V4) EXPECT_NEAR(v.dot(V({1, -1, 0, 0})), 7.0, 1e-12);
  EXPECT_THROW(wsl1_vertices(Vector::LinSpaced(8, 8, 1), Vector::Zero(8), 1e-10, 4096), GaugeError);
}

TEST(GaugeFace, NuclearWorked) {
  const Gauge J = Gauge::nuclear(2, 2);
  const SubdiffFace F = subdiff_face(J, V({1, 0, 0, 0}));
  EXPECT_EQ(F.base, V({1, 0, 0, 0}));
  EXPECT_EQ(F.param_rows, 1);
  EXPECT_EQ(F.param_cols, 1);
  EXPECT_EQ(F.domain, ParamDomain::Spectral);
  for (double w : {-1.0, -0.3, 0.0, 0.8, 1.0}) {
    const Vector z = face_point(F, Vector::Constant(1, w));
    EXPECT_NEAR(z.dot(V({1, 0, 0, 0})), 1.0, 1e-12);
    EXPECT_LE(polar_eval(J, z), 1.0 + 1e-12);
  }
}

TEST(GaugeFace, AnalysisRankGapFlag) {
  // Dt with 3 atoms on R^2: the free columns of Dt' cannot be independent.
  Matrix Dt(3, 2);
  Dt << 1, -1, 1, 0, 0, 1;
  const SubdiffFace F = subdiff_face(Gauge::analysis_l1(Dt), V({1, 1}));
  EXPECT_FALSE(F.ri_gap_flag);  // one free atom
  const SubdiffFace F0 = subdiff_face(Gauge::analysis_l1(Dt), V({0, 0}));
  EXPECT_TRUE(F0.ri_gap_flag);
}

TEST(GaugeFace, SampledMembersFormValidSubgradients) {
  Sampler s(31);
  for (const Gauge& J : sample_gauges()) {
    for (int trial = 0; trial < 100; ++trial) {
      Vector x0 = sample_point(J, s);
      if (J.kind != GaugeKind::Nuclear && J.kind != GaugeKind::SdpTrace) x0(trial % J.n) = 0.0;
      if (J.kind == GaugeKind::Nuclear) {
        const Matrix X = unvec(s.normal_vec(2), 2, 1) * unvec(s.normal_vec(3), 1, 3);
        x0 = vec(X);
      }
      if (J.kind == GaugeKind::SdpTrace) {
        const Vector u = s.normal_vec(J.rows);
        x0 = vec(u * u.transpose());
      }
      const SubdiffFace F = subdiff_face(J, x0);
      Vector w = project_param(F, 2.0 * s.normal_vec(F.param_map.cols()));
      const Vector z = face_point(F, w);
      const double Jx = eval(J, x0);
      EXPECT_NEAR(z.dot(x0), Jx, 1e-9 * (1 + Jx)) << to_string(J.kind);
      EXPECT_LE(polar_eval(J, z), 1.0 + 1e-9) << to_string(J.kind);
      EXPECT_GE(face_margin(J, F, z), -1e-9) << to_string(J.kind);
      if (F.tangent_basis.cols() > 0) {
        const double m = face_margin(J, F, z);
        if (m > 1e-3 && F.domain != ParamDomain::Psd && J.kind != GaugeKind::AnalysisL1) {
          const Vector t = F.tangent_basis * s.unit(F.tangent_basis.cols());
          const Vector zp = z + 0.5 * m * t;
          EXPECT_NEAR(zp.dot(x0), Jx, 1e-9 * (1 + Jx)) << to_string(J.kind);
          EXPECT_LE(polar_eval(J, zp), 1.0 + 1e-9) << to_string(J.kind);
        }
      }
    }
  }
}

// ---------------------------------------------------------------- polar

TEST(GaugePolar, WorkedValues) {
  EXPECT_DOUBLE_EQ(polar_eval(Gauge::nonneg_l1(2), V({-5, 0.5})), 0.5);
  EXPECT_DOUBLE_EQ(polar_eval(Gauge::l1(2), V({0.3, -0.9})), 0.9);
  EXPECT_NEAR(polar_eval(Gauge::nuclear(2, 2), V({2, 0, 0, 1})), 2.0, 1e-14);
  // Generalised eigenvalue with C = diag(1, 2).
  const Gauge S = Gauge::sdp_trace((Matrix(2, 2) << 1, 0, 0, 2).finished());
  EXPECT_NEAR(polar_eval(S, V({1, 0, 0, 4})), 2.0, 1e-12);
  EXPECT_NEAR(polar_eval(S, V({-1, 0, 0, -1})), 0.0, 1e-12);
}

TEST(GaugePolar, NonnegPolarMatchesGridDistance) {
  // J°(z) = min over u <= 0 of ||z - u||_inf, brute force over a u grid.
  const Vector z = V({-5, 0.5});
  double best = kInf;
  for (int i = 0; i <= 600; ++i)
    for (int j = 0; j <= 600; ++j) {
      const double u1 = -6.0 + 0.01 * i, u2 = -6.0 + 0.01 * j;
      if (u1 > 0 || u2 > 0) continue;
      best = std::min(best, std::max(std::abs(z(0) - u1), std::abs(z(1) - u2)));
    }
  EXPECT_NEAR(best, 0.5, 1e-9);
  EXPECT_NEAR(polar_eval(Gauge::nonneg_l1(2), z), best, 1e-9);
}

TEST(GaugePolar, AnalysisPolarInfeasibleOutsideRange) {
  Matrix Dt(1, 2);
  Dt << 1, -1;
  const Gauge J = Gauge::analysis_l1(Dt);
  EXPECT_EQ(polar_eval(J, V({1, 1})), kInf);
  EXPECT_NEAR(polar_eval(J, V({0.5, -0.5})), 0.5, 1e-12);
}

TEST(GaugePolar, SingularCostMatrix) {
  const Gauge S = Gauge::sdp_trace((Matrix(2, 2) << 1, 0, 0, 0).finished());
  EXPECT_EQ(polar_eval(S, V({0, 0, 0, 1})), kInf);     // positive curvature on Ker C
  EXPECT_EQ(polar_eval(S, V({0, 1, 1, 0})), kInf);     // coupling into a flat kernel direction
  // Z = [[1, 1], [1, -1]]: Schur complement 1 - 1*(-1)^{-1}*1 = 2.
  EXPECT_NEAR(polar_eval(S, V({1, 1, 1, -1})), 2.0, 1e-12);
}

TEST(GaugePolar, Wsl1PolarMatchesDefinitionalLp) {
  Sampler s(41);
  for (Index n = 1; n <= 4; ++n)
    for (int t = 0; t < 25; ++t) {
      Vector w = s.normal_vec(n).cwiseAbs();
      std::sort(w.data(), w.data() + n, std::greater<double>());
      if (t % 5 == 0) w(n - 1) = 0.0;
      const Vector z = s.normal_vec(n);
      const double lp = wsl1_polar_by_lp(w, z);
      const double closed = polar_eval(Gauge::wsl1(w), z);
      if (std::isinf(lp)) {
        EXPECT_TRUE(std::isinf(closed));
      } else {
        EXPECT_NEAR(closed, lp, 1e-9 * (1 + lp)) << "n=" << n;
      }
    }
}

// ---------------------------------------------------------------- invariants

TEST(GaugeInvariants, HomogeneityPolarInequalityAndProxOptimality) {
  Sampler s(51);
  for (const Gauge& J : sample_gauges()) {
    for (int trial = 0; trial < 300; ++trial) {
      const Vector x = sample_point(J, s);
      const double a = s.uniform(1e-3, 10.0);
      const double Jx = eval(J, x);
      EXPECT_EQ(eval(J, Vector::Zero(J.n)), 0.0);
      EXPECT_GE(Jx, 0.0);
      EXPECT_LE(std::abs(eval(J, a * x) - a * Jx), 1e-9 * (1 + Jx) * std::max(1.0, a)) << to_string(J.kind);
      const Vector z = J.kind == GaugeKind::SdpTrace ? vec(sym(unvec(s.normal_vec(J.n), J.rows, J.rows)))
                                                     : s.normal_vec(J.n);
      const double pz = polar_eval(J, z);
      if (std::isfinite(pz)) EXPECT_LE(z.dot(x), Jx * pz + 1e-9 * (1 + Jx * pz)) << to_string(J.kind);
      if (trial % 10 == 0) {
        const double tau = s.uniform(0.1, 2.0);
        const Vector y = s.normal_vec(J.n);
        const Vector p = prox(J, y, tau);
        const double base = 0.5 * (p - y).squaredNorm() + tau * eval(J, p);
        for (int k = 0; k < 100; ++k) {
          const Vector q = (k % 2 ? p : Vector(sample_point(J, s))) + 0.1 * (k % 2) * sample_point(J, s);
          const double Jq = eval(J, q);
          if (!std::isfinite(Jq)) continue;
          EXPECT_LE(base, 0.5 * (q - y).squaredNorm() + tau * Jq + 1e-9) << to_string(J.kind);
        }
      }
    }
  }
}
