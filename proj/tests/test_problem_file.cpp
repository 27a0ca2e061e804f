#include <gtest/gtest.h>

#include "gaugecert/problem_file.hpp"

using namespace gaugecert;

namespace {

const char* kE1 = R"({
  "version": 1,
  "gauge": {"kind": "l1"},
  "A": {"shape": [1, 2], "data": [2, 1]},
  "x0": [0.5, 0]
})";

FileError parse_error(const std::string& text) {
  try {
    parse_problem(text);
  } catch (const FileError& e) {
    return e;
  }
  ADD_FAILURE() << "expected a parse failure for\n" << text;
  return FileError("none");
}

}  // namespace

TEST(ProblemFile, ParsesWorkedInstance) {
  const ProblemFile p = parse_problem(kE1);
  EXPECT_EQ(p.gauge.kind, GaugeKind::L1);
  EXPECT_EQ(p.gauge.n, 2);
  ASSERT_TRUE(p.A && p.x0);
  EXPECT_EQ((*p.A)(0, 0), 2.0);
  EXPECT_EQ((*p.x0)(0), 0.5);
  EXPECT_NEAR((*p.exact_rhs())(0), 1.0, 0);
  EXPECT_FALSE(p.delta);
}

TEST(ProblemFile, AllGaugeKinds) {
  const ProblemFile a = parse_problem(R"({"version": 1,
    "gauge": {"kind": "analysis_l1", "D": {"shape": [2, 3], "data": [1, -1, 0, 0, 1, -1]}},
    "A": {"shape": [1, 3], "data": [1, 1, 1]}})");
  EXPECT_EQ(a.gauge.Dt.rows(), 2);
  const ProblemFile w = parse_problem(R"({"version": 1, "gauge": {"kind": "wsl1", "w": [2, 1]},
    "A": {"shape": [1, 2], "data": [1, 1]}, "delta": 0.1, "mu": 0.5, "c1": 2})");
  EXPECT_EQ(w.gauge.w(0), 2.0);
  EXPECT_EQ(*w.delta, 0.1);
  const ProblemFile g = parse_problem(R"({"version": 1, "gauge": {"kind": "group_l12", "partition": [[0, 2], [1]]},
    "A": {"shape": [1, 3], "data": [1, 1, 1]}})");
  EXPECT_EQ(g.gauge.groups.size(), 2u);
  const ProblemFile nu = parse_problem(R"({"version": 1, "gauge": {"kind": "nuclear", "shape": [2, 3]},
    "A": {"shape": [1, 6], "data": [1, 0, 0, 0, 0, 0]}})");
  EXPECT_EQ(nu.gauge.cols, 3);
  const ProblemFile s = parse_problem(R"({"version": 1,
    "gauge": {"kind": "sdp_trace", "C": {"shape": [2, 2], "data": [1, 0, 0, 1]}},
    "A": {"shape": [1, 4], "data": [1, 0, 0, 0]}, "x0": [1, 0, 0, 0]})");
  EXPECT_EQ(s.gauge.n, 4);
  const ProblemFile gen = parse_problem(R"({"version": 1, "gauge": {"kind": "nonneg_l1"},
    "generator": {"m": 3, "n": 5, "sparsity": 2}})");
  ASSERT_TRUE(gen.generator);
  EXPECT_EQ(gen.generator->kind, GaugeKind::NonnegL1);
  EXPECT_EQ(gen.generator->sparsity, 2);
}

TEST(ProblemFile, StrictDiagnostics) {
  struct Case {
    const char* text;
    const char* fragment;
    std::size_t line;
  };
  const Case cases[] = {
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [2, 1, 3]}}", "needs 2",
       3},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [2, 1]},\n \"extra\": 1}",
       "unknown field", 4},
      {"{\"version\": 2, \"gauge\": {\"kind\": \"l1\"}, \"A\": {\"shape\": [1, 1], \"data\": [1]}}", "version", 1},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l7\"},\n \"A\": {\"shape\": [1, 1], \"data\": [1]}}", "unknown gauge",
       2},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [1, 1]},\n \"x0\": [1]}",
       "x0 has length", 4},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [1, 1]},\n \"b\": [1, 2]}",
       "b has length", 4},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [1, \"x\"]}}",
       "expected a number", 3},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"gauge\": {\"kind\": \"l1\"}}", "duplicate", 3},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2] \"data\": [1, 1]}}", "malformed JSON",
       3},
      {"{\"version\": 1, \"gauge\": {\"kind\": \"l1\"}}", "exactly one", 1},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"wsl1\", \"w\": [1, 2]},\n \"A\": {\"shape\": [1, 2], \"data\": [1, 1]}}",
       "/gauge/w", 2},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"l1\"},\n \"A\": {\"shape\": [1, 2], \"data\": [1, 1]},\n \"delta\": -1}",
       "delta", 4},
      {"{\"version\": 1,\n \"gauge\": {\"kind\": \"nuclear\", \"shape\": [2, 2]},\n \"A\": {\"shape\": [1, 3], \"data\": "
       "[1, 1, 1]}}",
       "columns", 3},
  };
  for (const Case& c : cases) {
    const FileError e = parse_error(c.text);
    EXPECT_NE(std::string(e.what()).find(c.fragment), std::string::npos) << e.what();
    EXPECT_EQ(e.line, c.line) << e.what();
    EXPECT_GE(e.column, 1u);
  }
}

TEST(ProblemFile, WriterRoundTrip) {
  for (const char* text :
       {kE1,
        R"({"version": 1, "gauge": {"kind": "group_l12", "partition": [[0, 2], [1]]},
            "A": {"shape": [2, 3], "data": [1, 2, 3, 4, 5, 6.25]}, "x0": [1, 0, -1], "b": [0.1, 0.2], "mu": 0.3})",
        R"({"version": 1, "gauge": {"kind": "l1"}, "generator": {"m": 2, "n": 4}, "delta": 0.01})"}) {
    const ProblemFile p = parse_problem(text);
    const std::string once = problem_to_json(p);
    const ProblemFile q = parse_problem(once);
    EXPECT_EQ(problem_to_json(q), once);
    if (p.A) EXPECT_TRUE(*p.A == *q.A);
  }
}

TEST(Reports, CertificateRoundTrip) {
  CertificateReport r;
  r.is_sharp = Verdict::Yes;
  r.is_unique = Verdict::Yes;
  r.kappa = kInf;
  r.kappa_certified = true;
  r.alpha = 1.0 / 3.0;
  r.dual_certificate = Vector::LinSpaced(3, 0.1, 0.3);
  r.ri_margin = -kInf;
  r.conditions.push_back({"v.injective", Verdict::No, true, "quote \" and newline \n"});
  r.notes.push_back("n");
  const std::string text = certificate_json(r, Gauge::l1(3), "auto", Verdict::Yes);
  EXPECT_EQ(validate_report(text), "certificate");
  const ParsedCertificate p = parse_certificate_json(text);
  EXPECT_EQ(p.verdict, Verdict::Yes);
  EXPECT_EQ(p.gauge, "l1");
  EXPECT_EQ(*p.report.kappa, kInf);
  EXPECT_EQ(*p.report.alpha, 1.0 / 3.0);
  EXPECT_FALSE(p.report.kappa_direction);
  EXPECT_TRUE(*p.report.dual_certificate == *r.dual_certificate);
  EXPECT_EQ(p.report.ri_margin, -kInf);
  ASSERT_EQ(p.report.conditions.size(), 1u);
  EXPECT_EQ(p.report.conditions[0].detail, r.conditions[0].detail);
  EXPECT_EQ(certificate_json(p.report, Gauge::l1(3), "auto", Verdict::Yes), text);
}

TEST(Reports, OtherReportsValidate) {
  SolveResult s;
  s.point = Vector::Ones(2);
  s.value = 2;
  s.method = "lp";
  EXPECT_EQ(validate_report(solve_json(s, "primal", std::nullopt)), "solve");
  DualityGap g;
  g.primal = 1;
  g.dual = 1;
  g.gap = 0;
  EXPECT_EQ(validate_report(solve_json(s, "dual", g)), "solve");
  RecoveryReport rep;
  EXPECT_EQ(validate_report(recovery_json(rep)), "recovery");
  EXPECT_EQ(validate_report(nsp_json({0, 2}, 0.25)), "nsp");
}

TEST(Reports, StrictSchema) {
  const std::string good = nsp_json({0}, 0.25);
  EXPECT_THROW(validate_report(good.substr(0, good.size() - 3)), FileError);
  std::string extra = good;
  extra.insert(1, "\"extra\": 1,");
  EXPECT_THROW(validate_report(extra), FileError);
  std::string wrong = good;
  wrong.replace(wrong.find("0.25"), 4, "\"x\"");
  EXPECT_THROW(validate_report(wrong), FileError);
  EXPECT_THROW(validate_report(R"({"report": "other", "version": 1})"), FileError);
  EXPECT_THROW(validate_report("[1, 2]"), FileError);
}
