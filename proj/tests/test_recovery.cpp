#include <gtest/gtest.h>

#include <charconv>
#include <cmath>
#include <iostream>

#include "gaugecert/recovery.hpp"

using namespace gaugecert;

namespace {

ProblemInstance explicit_instance(const Gauge& J, const Matrix& A, const Vector& x0) {
  ProblemInstance inst;
  inst.id = "explicit";
  inst.gauge = J;
  inst.A = A;
  inst.x0 = x0;
  inst.b0 = A * x0;
  return with_noise(inst, 0.0, NoiseModel::Adversarial, 0);
}

Matrix row2(double a, double b) {
  Matrix A(1, 2);
  A << a, b;
  return A;
}

Vector pt(double a, double b) {
  Vector x(2);
  x << a, b;
  return x;
}

}  // namespace

TEST(GenInstance, ZeroSparsityAndNoise) {
  InstanceConfig c;
  c.sparsity = 0;
  c.delta = 0.0;
  const ProblemInstance inst = gen_instance(c, 5);
  EXPECT_EQ(inst.x0.norm(), 0.0);
  EXPECT_EQ(inst.b.norm(), 0.0);
  EXPECT_EQ(inst.A.rows(), 4);
  EXPECT_EQ(inst.A.cols(), 8);
}

TEST(GenInstance, Deterministic) {
  InstanceConfig c;
  c.delta = 0.05;
  const ProblemInstance a = gen_instance(c, 99), b = gen_instance(c, 99), other = gen_instance(c, 100);
  EXPECT_TRUE(a.A == b.A);
  EXPECT_TRUE(a.x0 == b.x0);
  EXPECT_TRUE(a.omega == b.omega);
  EXPECT_EQ(a.id, b.id);
  EXPECT_FALSE(a.A == other.A);
}

TEST(GenInstance, NoiseAndDataInvariants) {
  for (GaugeKind k : {GaugeKind::L1, GaugeKind::NonnegL1, GaugeKind::WSL1, GaugeKind::GroupL12,
                      GaugeKind::AnalysisL1, GaugeKind::Nuclear, GaugeKind::SdpTrace}) {
    InstanceConfig c;
    c.kind = k;
    c.n = k == GaugeKind::SdpTrace ? 3 : 6;
    c.sparsity = 2;
    c.rank = 1;
    c.delta = 0.3;
    for (NoiseModel nm : {NoiseModel::Sphere, NoiseModel::Adversarial}) {
      c.noise = nm;
      const ProblemInstance inst = gen_instance(c, 7);
      EXPECT_EQ(inst.A.cols(), inst.gauge.n) << to_string(k);
      EXPECT_TRUE(inst.b0 == inst.A * inst.x0);
      EXPECT_NEAR(inst.omega.norm(), 0.3, 1e-12);
      EXPECT_TRUE(std::isfinite(eval(inst.gauge, inst.x0))) << to_string(k);
    }
  }
  InstanceConfig c;
  c.kind = GaugeKind::L1;
  c.sparsity = 3;
  EXPECT_EQ((gen_instance(c, 1).x0.array() != 0).count(), 3);
  c.kind = GaugeKind::AnalysisL1;
  const ProblemInstance a = gen_instance(c, 2);
  EXPECT_EQ(((a.gauge.Dt * a.x0).array().abs() > 1e-12).count(), 3);
  c.sparsity = 9;
  EXPECT_THROW(gen_instance(c, 1), std::invalid_argument);
}

TEST(GenInstance, CertificateRateIsObserved) {
  InstanceConfig c;  // m = 4, n = 8, s = 1
  int sharp = 0;
  const int total = 40;
  for (int seed = 0; seed < total; ++seed) {
    const ProblemInstance inst = gen_instance(c, static_cast<std::uint64_t>(seed));
    sharp += certify_for_recovery(inst.gauge, inst.A, inst.x0).applicable;
  }
  std::cout << "certified-sharp rate " << sharp << "/" << total << "\n";
  RecordProperty("sharp_rate", std::to_string(sharp) + "/" + std::to_string(total));
}

TEST(RunRecovery, ZeroNoise) {
  InstanceConfig c;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RecoveryReport rep = run_recovery(gen_instance(c, seed), 1.0);
    ASSERT_EQ(rep.rows.size(), 1u);
    const RecoveryRow& r = rep.rows[0];
    if (!r.applicable) continue;
    EXPECT_NEAR(r.err_mozorov, 0.0, 1e-7);
    EXPECT_NEAR(r.err_tikhonov, 0.0, 1e-7);
    EXPECT_TRUE(r.pass);
  }
}

TEST(RunRecovery, SharpWorkedInstance) {
  const ProblemInstance base = explicit_instance(Gauge::l1(2), row2(2, 1), pt(0.5, 0));
  for (double d : {1e-3, 1e-2, 1e-1}) {
    const ProblemInstance inst = with_noise(base, d, NoiseModel::Adversarial, 0);
    EXPECT_NEAR(inst.omega(0), d, 1e-15);
    const RecoveryReport rep = run_recovery(inst, 1.0);
    const RecoveryRow& r = rep.rows[0];
    ASSERT_TRUE(r.applicable);
    EXPECT_NEAR(r.alpha, 1.0 / std::sqrt(2.0), 1e-9);
    EXPECT_LE(r.err_mozorov, 2.0 * std::sqrt(2.0) * d + kBoundSlack);
    EXPECT_NEAR(r.bound_mozorov, 2.0 * std::sqrt(2.0) * d, 1e-12);
    EXPECT_TRUE(r.pass);
    EXPECT_TRUE(rep.all_pass());
  }
}

TEST(RunRecovery, NonSharpIsNotApplicable) {
  const ProblemInstance inst = with_noise(explicit_instance(Gauge::l1(2), row2(1, 1), pt(1, 0)), 0.01,
                                          NoiseModel::Adversarial, 0);
  const RecoveryReport rep = run_recovery(inst, 1.0);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_FALSE(rep.rows[0].applicable);
  EXPECT_NE(rep.rows[0].note.find("not applicable"), std::string::npos);
  EXPECT_EQ(rep.applicable, 0u);
  EXPECT_TRUE(rep.all_pass());
}

TEST(RunRecovery, CorruptedAlphaFails) {
  const ProblemInstance base = explicit_instance(Gauge::l1(2), row2(2, 1), pt(0.5, 0));
  SharpnessData s = certify_for_recovery(base.gauge, base.A, base.x0);
  ASSERT_TRUE(s.applicable);
  s.alpha = 1e6;  // makes the 2 delta / alpha bound far too small
  ProblemInstance inst = with_noise(base, 0.1, NoiseModel::Sphere, 3);
  RecoveryReport rep;
  append_row(rep, recovery_row(inst, s, 1.0));
  // Tikhonov shrinkage keeps its error positive, so the inflated alpha must trip it.
  EXPECT_GT(rep.rows[0].err_tikhonov, 0.0);
  EXPECT_FALSE(rep.rows[0].pass);
  EXPECT_FALSE(rep.all_pass());
  EXPECT_GT(rep.max_violation, 0.0);
}

TEST(Sweep, ZeroNoiseGridPasses) {
  SweepSpec spec;
  spec.configs = {InstanceConfig{}};
  spec.seeds = {0, 1, 2, 3, 4};
  spec.deltas = {0.0};
  const RecoveryReport rep = sweep(spec);
  EXPECT_EQ(rep.rows.size(), 5u);
  EXPECT_TRUE(rep.all_pass());
}

TEST(Sweep, CsvIsDeterministic) {
  SweepSpec spec;
  InstanceConfig c;
  c.m = 3;
  c.n = 6;
  spec.configs = {c};
  spec.seeds = {11, 12, 13};
  spec.deltas = {1e-3, 1e-2};
  spec.c1s = {0.1, 1.0};
  spec.noises = {NoiseModel::Sphere, NoiseModel::Adversarial};
  const std::string a = recovery_csv(sweep(spec)), b = recovery_csv(sweep(spec));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "instance_id,gauge,m,n,delta,mu,err_mozorov,bound_mozorov,err_tikhonov,bound_tikhonov_y0,"
            "bound_tikhonov_lip,kappa,alpha,pass");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 3 * 2 * 2 * 2);
}

TEST(Sweep, SharpL1InstancesMeetBounds) {
  SweepSpec spec;
  spec.configs = {InstanceConfig{}};
  for (std::uint64_t s = 0; s < 12; ++s) spec.seeds.push_back(s);
  spec.deltas = {1e-3, 1e-2, 1e-1};
  spec.c1s = {0.1, 1.0};
  spec.noises = {NoiseModel::Sphere, NoiseModel::Adversarial};
  const RecoveryReport rep = sweep(spec);
  EXPECT_GT(rep.applicable, 0u);
  for (const RecoveryRow& r : rep.rows) {
    if (!r.applicable) continue;
    EXPECT_TRUE(r.pass) << r.instance_id << " delta " << r.delta << " c1 " << r.c1 << " moz " << r.err_mozorov
                        << "/" << r.bound_mozorov << " tik " << r.err_tikhonov << "/" << r.bound_tikhonov_y0;
  }
  EXPECT_TRUE(rep.all_pass());
}

TEST(Sweep, EmptyGridRejected) {
  SweepSpec spec;
  spec.configs = {InstanceConfig{}};
  spec.seeds = {};
  spec.deltas = {0.0};
  EXPECT_THROW(sweep(spec), std::invalid_argument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(1.0), "1");
  EXPECT_EQ(format_double(kInf), "inf");
  for (double v : {1.0 / 3.0, 2.0 / std::sqrt(5.0), 1e-300, -123456.789, 0x1.fffffffffffffp+1023}) {
    const std::string s = format_double(v);
    double back = 0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    EXPECT_EQ(back, v) << s;
  }
}

TEST(Lipschitz, ClosedForms) {
  EXPECT_DOUBLE_EQ(gauge_lipschitz(Gauge::l1(4)), 2.0);
  Vector w(2);
  w << 2, 1;
  EXPECT_DOUBLE_EQ(gauge_lipschitz(Gauge::wsl1(w)), std::sqrt(5.0));
  EXPECT_DOUBLE_EQ(gauge_lipschitz(Gauge::nuclear(2, 3)), std::sqrt(2.0));
  // Sampled ratios never exceed the constant.
  std::mt19937_64 gen(4);
  std::normal_distribution<double> nd;
  Matrix Dt(2, 3);
  Dt << 1, -1, 0, 0, 1, -1;
  for (const Gauge& J : {Gauge::l1(3), Gauge::wsl1(Vector::LinSpaced(3, 3, 1)), Gauge::analysis_l1(Dt),
                         Gauge::group_l12({{0, 1}, {2}}, 3)}) {
    const double L = gauge_lipschitz(J);
    for (int i = 0; i < 200; ++i) {
      Vector x(3), y(3);
      for (Index j = 0; j < 3; ++j) x(j) = nd(gen), y(j) = nd(gen);
      EXPECT_LE(std::abs(eval(J, x) - eval(J, y)), L * (x - y).norm() + 1e-12);
    }
  }
}
