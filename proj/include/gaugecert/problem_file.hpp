// Versioned JSON problem files and JSON reports. Parsing is strict: unknown
// or duplicate keys, wrong types and inconsistent shapes are rejected with a
// line/column diagnostic.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gaugecert/certificates.hpp"
#include "gaugecert/gauge.hpp"
#include "gaugecert/linalg.hpp"
#include "gaugecert/recovery.hpp"
#include "gaugecert/solvers.hpp"

namespace gaugecert {

inline constexpr int kFormatVersion = 1;

class FileError : public std::runtime_error {
 public:
  // line and column are 1-based; 0 when the location is unknown.
  FileError(const std::string& msg, std::size_t line = 0, std::size_t column = 0);
  std::size_t line, column;
};

struct ProblemFile {
  int version = kFormatVersion;
  Gauge gauge;
  // Either a fixed operator or a generator for random instances.
  std::optional<Matrix> A;
  std::optional<InstanceConfig> generator;
  std::optional<Vector> x0, b, b0;
  std::optional<double> delta, mu, c1;

  // Right-hand side of the equality-constrained problem: b0, else A x0, else b.
  std::optional<Vector> exact_rhs() const;
  // Noisy data: b, else b0, else A x0.
  std::optional<Vector> noisy_rhs() const;
};

ProblemFile parse_problem(const std::string& text);
ProblemFile load_problem(const std::string& path);
std::string problem_to_json(const ProblemFile& p);

// Reports. Non-finite reals are written as the strings "inf", "-inf", "nan".
std::string certificate_json(const CertificateReport& r, const Gauge& J, const std::string& condition, Verdict verdict);
std::string solve_json(const SolveResult& r, const std::string& problem, const std::optional<DualityGap>& gap);
std::string recovery_json(const RecoveryReport& r);
std::string nsp_json(const std::vector<Index>& support, double constant);

struct ParsedCertificate {
  CertificateReport report;
  std::string gauge, condition;
  Verdict verdict = Verdict::Unknown;
};
ParsedCertificate parse_certificate_json(const std::string& text);
// Strict schema check for any emitted report; returns its "report" tag.
std::string validate_report(const std::string& text);

std::optional<Verdict> verdict_from_string(const std::string& s);

}  // namespace gaugecert
