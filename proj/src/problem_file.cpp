#include "gaugecert/problem_file.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

namespace gaugecert {

FileError::FileError(const std::string& msg, std::size_t line_, std::size_t column_)
    : std::runtime_error(line_ ? msg + " (line " + std::to_string(line_) + ", column " + std::to_string(column_) + ")"
                               : msg),
      line(line_),
      column(column_) {}

std::optional<Verdict> verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::Yes, Verdict::No, Verdict::Unknown})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

std::optional<Vector> ProblemFile::exact_rhs() const {
  if (b0) return b0;
  if (A && x0) return Vector(*A * *x0);
  return b;
}

std::optional<Vector> ProblemFile::noisy_rhs() const {
  if (b) return b;
  return exact_rhs();
}

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Parsing with key positions.

struct Doc {
  json root;
  std::string text;
  std::map<std::string, std::size_t> key_offset;  // JSON-pointer path -> byte offset of its key
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Next occurrence of a string token at or after `from`; keys must be followed by ':'.
std::size_t find_token(const std::string& text, const std::string& tok, std::size_t from, bool is_key) {
  for (std::size_t p = text.find(tok, from); p != std::string::npos; p = text.find(tok, p + 1)) {
    if (p > 0 && text[p - 1] == '\\') continue;
    if (!is_key) return p;
    std::size_t q = p + tok.size();
    while (q < text.size() && std::isspace(static_cast<unsigned char>(text[q]))) ++q;
    if (q < text.size() && text[q] == ':') return p;
  }
  return std::string::npos;
}

[[noreturn]] void fail(const Doc& d, std::string path, const std::string& msg) {
  const std::string shown = path.empty() ? "/" : path;
  for (;;) {
    auto it = d.key_offset.find(path);
    if (it != d.key_offset.end()) {
      const auto [l, c] = line_col(d.text, it->second);
      throw FileError(shown + ": " + msg, l, c);
    }
    const std::size_t cut = path.rfind('/');
    if (cut == std::string::npos || path.empty()) break;
    path.resize(cut);
  }
  throw FileError(shown + ": " + msg, 1, 1);
}

Doc parse_strict(const std::string& text) {
  Doc d;
  d.text = text;
  struct Frame {
    bool object;
    std::string key;
    long index = -1;
    std::set<std::string> seen;
  };
  std::vector<Frame> st;
  std::size_t cursor = 0;
  std::optional<std::pair<std::string, std::size_t>> duplicate;
  auto path = [&] {
    std::string p;
    for (const Frame& f : st) p += "/" + (f.object ? f.key : std::to_string(f.index));
    return p;
  };
  auto bump = [&] {
    if (!st.empty() && !st.back().object) ++st.back().index;
  };
  const json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        bump();
        st.push_back({true, {}, -1, {}});
        break;
      case json::parse_event_t::array_start:
        bump();
        st.push_back({false, {}, -1, {}});
        break;
      case json::parse_event_t::object_end:
      case json::parse_event_t::array_end:
        if (!st.empty()) st.pop_back();
        break;
      case json::parse_event_t::key: {
        Frame& f = st.back();
        f.key = parsed.get<std::string>();
        const std::string tok = json(f.key).dump();
        const std::size_t off = find_token(text, tok, cursor, true);
        if (off != std::string::npos) {
          cursor = off + tok.size();
          d.key_offset[path()] = off;
        }
        if (!f.seen.insert(f.key).second && !duplicate)
          duplicate = std::pair{path(), off == std::string::npos ? 0 : off};
        break;
      }
      case json::parse_event_t::value:
        bump();
        if (parsed.is_string()) {
          const std::string tok = parsed.dump();
          const std::size_t off = find_token(text, tok, cursor, false);
          if (off != std::string::npos) cursor = off + tok.size();
        }
        break;
    }
    return true;
  };
  try {
    d.root = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    const auto [l, c] = line_col(text, e.byte ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (const std::size_t p = msg.rfind(": "); p != std::string::npos) msg = msg.substr(p + 2);
    throw FileError("malformed JSON: " + msg, l, c);
  }
  if (duplicate) {
    const auto [l, c] = line_col(text, duplicate->second);
    throw FileError(duplicate->first + ": duplicate key", l, c);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Typed readers.

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

void check_keys(const Doc& d, const json& obj, const std::string& path, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  if (!obj.is_object()) fail(d, path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) fail(d, join(path, it.key()), "unknown field \"" + it.key() + "\"");
  for (const std::string& k : required)
    if (!obj.contains(k)) fail(d, path, "missing required field \"" + k + "\"");
}

double get_real(const Doc& d, const json& v, const std::string& path, bool allow_nonfinite = false) {
  if (v.is_number()) return v.get<double>();
  if (allow_nonfinite && v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(d, path, allow_nonfinite ? "expected a number or \"inf\"/\"-inf\"/\"nan\"" : "expected a number");
}

Index get_index(const Doc& d, const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return static_cast<Index>(v.get<std::uint64_t>());
  fail(d, path, "expected a nonnegative integer");
}

std::string get_string(const Doc& d, const json& v, const std::string& path) {
  if (!v.is_string()) fail(d, path, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const Doc& d, const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(d, path, "expected true or false");
  return v.get<bool>();
}

Vector get_vector(const Doc& d, const json& v, const std::string& path, bool allow_nonfinite = false) {
  if (!v.is_array()) fail(d, path, "expected an array of numbers");
  Vector out(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out(static_cast<Index>(i)) = get_real(d, v[i], path + "/" + std::to_string(i), allow_nonfinite);
  return out;
}

Matrix get_matrix(const Doc& d, const json& v, const std::string& path) {
  check_keys(d, v, path, {"shape", "data"}, {"shape", "data"});
  const json& shape = v["shape"];
  if (!shape.is_array() || shape.size() != 2) fail(d, join(path, "shape"), "expected [rows, cols]");
  const Index r = get_index(d, shape[0], join(path, "shape") + "/0");
  const Index c = get_index(d, shape[1], join(path, "shape") + "/1");
  const Vector data = get_vector(d, v["data"], join(path, "data"));
  if (data.size() != r * c)
    fail(d, join(path, "data"), "shape [" + std::to_string(r) + ", " + std::to_string(c) + "] needs " +
                                    std::to_string(r * c) + " entries, got " + std::to_string(data.size()));
  Matrix M(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) M(i, j) = data(i * c + j);
  return M;
}

std::vector<std::vector<Index>> get_partition(const Doc& d, const json& v, const std::string& path) {
  if (!v.is_array()) fail(d, path, "expected a list of index lists");
  std::vector<std::vector<Index>> groups;
  for (std::size_t g = 0; g < v.size(); ++g) {
    const std::string gp = path + "/" + std::to_string(g);
    if (!v[g].is_array()) fail(d, gp, "expected a list of indices");
    std::vector<Index> grp;
    for (std::size_t i = 0; i < v[g].size(); ++i) grp.push_back(get_index(d, v[g][i], gp + "/" + std::to_string(i)));
    groups.push_back(std::move(grp));
  }
  return groups;
}

template <class F>
auto guarded(const Doc& d, const std::string& path, F&& f) {
  try {
    return f();
  } catch (const FileError&) {
    throw;
  } catch (const std::exception& e) {
    fail(d, path, e.what());
  }
}

// ---------------------------------------------------------------------------
// Writers.

ojson real(double v) {
  if (v == 0) return 0.0;
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ojson opt_real(const std::optional<double>& v) { return v ? real(*v) : ojson(nullptr); }

ojson vec_json(const Vector& v) {
  ojson a = ojson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(real(v(i)));
  return a;
}

ojson mat_json(const Matrix& M) {
  ojson data = ojson::array();
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j) data.push_back(real(M(i, j)));
  return ojson{{"shape", {M.rows(), M.cols()}}, {"data", data}};
}

std::string emit(const ojson& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Report schemas.

enum class Field { Str, Int, Real, OptReal, Bool, RealArr, OptRealArr, IntArr, StrArr, Conditions };
using Schema = std::vector<std::pair<std::string, Field>>;

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> s = {
      {"certificate",
       {{"report", Field::Str},           {"version", Field::Int},
        {"gauge", Field::Str},            {"condition", Field::Str},
        {"verdict", Field::Str},          {"sharp", Field::Str},
        {"unique", Field::Str},           {"kappa", Field::OptReal},
        {"kappa_certified", Field::Bool}, {"kappa_direction", Field::OptRealArr},
        {"alpha", Field::OptReal},        {"alpha_certified", Field::Bool},
        {"kernel_trivial", Field::Bool},  {"dual_certificate", Field::OptRealArr},
        {"ri_margin", Field::Real},       {"lp_value", Field::OptReal},
        {"conditions", Field::Conditions}, {"notes", Field::StrArr}}},
      {"solve",
       {{"report", Field::Str},
        {"version", Field::Int},
        {"problem", Field::Str},
        {"status", Field::Str},
        {"method", Field::Str},
        {"value", Field::Real},
        {"point", Field::RealArr},
        {"feasibility_residual", Field::Real},
        {"optimality_residual", Field::Real},
        {"iterations", Field::Int},
        {"mu", Field::OptReal},
        {"residual_monotone", Field::Bool},
        {"multiplier", Field::OptRealArr},
        {"primal_value", Field::OptReal},
        {"dual_value", Field::OptReal},
        {"gap", Field::OptReal}}},
      {"recovery",
       {{"report", Field::Str},
        {"version", Field::Int},
        {"rows", Field::Int},
        {"applicable", Field::Int},
        {"passed", Field::Int},
        {"failed", Field::Int},
        {"errors", Field::Int},
        {"pass_rate", Field::Real},
        {"max_violation", Field::Real},
        {"all_pass", Field::Bool}}},
      {"nsp",
       {{"report", Field::Str},
        {"version", Field::Int},
        {"support", Field::IntArr},
        {"constant", Field::Real},
        {"below_half", Field::Bool}}},
  };
  return s;
}

void check_field(const Doc& d, const json& v, const std::string& path, Field f) {
  switch (f) {
    case Field::Str: get_string(d, v, path); break;
    case Field::Int: get_index(d, v, path); break;
    case Field::Real: get_real(d, v, path, true); break;
    case Field::OptReal:
      if (!v.is_null()) get_real(d, v, path, true);
      break;
    case Field::Bool: get_bool(d, v, path); break;
    case Field::RealArr: get_vector(d, v, path, true); break;
    case Field::OptRealArr:
      if (!v.is_null()) get_vector(d, v, path, true);
      break;
    case Field::IntArr:
      if (!v.is_array()) fail(d, path, "expected an array of integers");
      for (std::size_t i = 0; i < v.size(); ++i) get_index(d, v[i], path + "/" + std::to_string(i));
      break;
    case Field::StrArr:
      if (!v.is_array()) fail(d, path, "expected an array of strings");
      for (std::size_t i = 0; i < v.size(); ++i) get_string(d, v[i], path + "/" + std::to_string(i));
      break;
    case Field::Conditions:
      if (!v.is_array()) fail(d, path, "expected an array of condition records");
      for (std::size_t i = 0; i < v.size(); ++i) {
        const std::string p = path + "/" + std::to_string(i);
        check_keys(d, v[i], p, {"id", "verdict", "certified", "detail"}, {"id", "verdict", "certified", "detail"});
        get_string(d, v[i]["id"], p + "/id");
        if (!verdict_from_string(get_string(d, v[i]["verdict"], p + "/verdict")))
          fail(d, p + "/verdict", "expected yes, no or unknown");
        get_bool(d, v[i]["certified"], p + "/certified");
        get_string(d, v[i]["detail"], p + "/detail");
      }
      break;
  }
}

std::string validate_doc(const Doc& d) {
  const json& r = d.root;
  if (!r.is_object() || !r.contains("report")) fail(d, "", "expected a report object with a \"report\" tag");
  const std::string tag = get_string(d, r["report"], "/report");
  auto it = schemas().find(tag);
  if (it == schemas().end()) fail(d, "/report", "unknown report type \"" + tag + "\"");
  std::set<std::string> keys;
  for (const auto& [k, f] : it->second) keys.insert(k);
  check_keys(d, r, "", keys, keys);
  for (const auto& [k, f] : it->second) check_field(d, r[k], "/" + k, f);
  if (get_index(d, r["version"], "/version") != kFormatVersion) fail(d, "/version", "unsupported version");
  return tag;
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem files.

ProblemFile parse_problem(const std::string& text) {
  const Doc d = parse_strict(text);
  const json& r = d.root;
  check_keys(d, r, "", {"version", "gauge", "A", "generator", "x0", "b", "b0", "delta", "mu", "c1"},
             {"version", "gauge"});
  ProblemFile p;
  if (!r["version"].is_number_integer() || r["version"].get<long long>() != kFormatVersion)
    fail(d, "/version", "unsupported version (expected " + std::to_string(kFormatVersion) + ")");
  if (r.contains("A") == r.contains("generator")) fail(d, "", "exactly one of \"A\" and \"generator\" is required");

  const json& g = r["gauge"];
  if (!g.is_object() || !g.contains("kind")) fail(d, "/gauge", "gauge record needs a \"kind\"");
  const std::string kind_s = get_string(d, g["kind"], "/gauge/kind");
  const std::optional<GaugeKind> kind = gauge_kind_from_string(kind_s);
  if (!kind) fail(d, "/gauge/kind", "unknown gauge kind \"" + kind_s + "\"");

  if (r.contains("generator")) {
    check_keys(d, g, "/gauge", {"kind"}, {"kind"});
    const json& gen = r["generator"];
    check_keys(d, gen, "/generator", {"m", "n", "sparsity", "rank", "rows", "cols", "group_size"}, {"m", "n"});
    InstanceConfig c;
    c.kind = *kind;
    c.m = get_index(d, gen["m"], "/generator/m");
    c.n = get_index(d, gen["n"], "/generator/n");
    if (gen.contains("sparsity")) c.sparsity = get_index(d, gen["sparsity"], "/generator/sparsity");
    if (gen.contains("rank")) c.rank = get_index(d, gen["rank"], "/generator/rank");
    if (gen.contains("rows")) c.rows = get_index(d, gen["rows"], "/generator/rows");
    if (gen.contains("cols")) c.cols = get_index(d, gen["cols"], "/generator/cols");
    if (gen.contains("group_size")) c.group_size = get_index(d, gen["group_size"], "/generator/group_size");
    // Validates the configuration once, at parse time.
    const ProblemInstance probe = guarded(d, "/generator", [&] { return gen_instance(c, 0); });
    p.gauge = probe.gauge;
    p.generator = c;
    for (const char* k : {"x0", "b", "b0"})
      if (r.contains(k)) fail(d, std::string("/") + k, "not allowed together with a generator");
  } else {
    const Matrix A = get_matrix(d, r["A"], "/A");
    p.A = A;
    const Index n = A.cols();
    switch (*kind) {
      case GaugeKind::L1:
      case GaugeKind::NonnegL1: {
        check_keys(d, g, "/gauge", {"kind", "n"}, {"kind"});
        if (g.contains("n") && get_index(d, g["n"], "/gauge/n") != n)
          fail(d, "/gauge/n", "gauge length differs from the number of columns of A");
        p.gauge = *kind == GaugeKind::L1 ? Gauge::l1(n) : Gauge::nonneg_l1(n);
        break;
      }
      case GaugeKind::AnalysisL1: {
        check_keys(d, g, "/gauge", {"kind", "D"}, {"kind", "D"});
        const Matrix D = get_matrix(d, g["D"], "/gauge/D");
        p.gauge = guarded(d, "/gauge/D", [&] { return Gauge::analysis_l1(D); });
        break;
      }
      case GaugeKind::WSL1: {
        check_keys(d, g, "/gauge", {"kind", "w"}, {"kind", "w"});
        const Vector w = get_vector(d, g["w"], "/gauge/w");
        p.gauge = guarded(d, "/gauge/w", [&] { return Gauge::wsl1(w); });
        break;
      }
      case GaugeKind::GroupL12: {
        check_keys(d, g, "/gauge", {"kind", "partition"}, {"kind", "partition"});
        const auto groups = get_partition(d, g["partition"], "/gauge/partition");
        p.gauge = guarded(d, "/gauge/partition", [&] { return Gauge::group_l12(groups, n); });
        break;
      }
      case GaugeKind::Nuclear: {
        check_keys(d, g, "/gauge", {"kind", "shape"}, {"kind", "shape"});
        const json& s = g["shape"];
        if (!s.is_array() || s.size() != 2) fail(d, "/gauge/shape", "expected [rows, cols]");
        const Index rr = get_index(d, s[0], "/gauge/shape/0"), cc = get_index(d, s[1], "/gauge/shape/1");
        p.gauge = guarded(d, "/gauge/shape", [&] { return Gauge::nuclear(rr, cc); });
        break;
      }
      case GaugeKind::SdpTrace: {
        check_keys(d, g, "/gauge", {"kind", "C"}, {"kind", "C"});
        const Matrix C = get_matrix(d, g["C"], "/gauge/C");
        p.gauge = guarded(d, "/gauge/C", [&] { return Gauge::sdp_trace(C); });
        break;
      }
    }
    if (p.gauge.n != n)
      fail(d, "/A", "A has " + std::to_string(n) + " columns but the gauge acts on length " +
                        std::to_string(p.gauge.n));
    if (r.contains("x0")) {
      p.x0 = get_vector(d, r["x0"], "/x0");
      if (p.x0->size() != n) fail(d, "/x0", "x0 has length " + std::to_string(p.x0->size()) + ", expected " +
                                                std::to_string(n));
    }
    for (const char* k : {"b", "b0"}) {
      if (!r.contains(k)) continue;
      const std::string path = std::string("/") + k;
      Vector v = get_vector(d, r[k], path);
      if (v.size() != A.rows())
        fail(d, path, std::string(k) + " has length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(A.rows()));
      (std::string(k) == "b" ? p.b : p.b0) = std::move(v);
    }
  }
  if (r.contains("delta")) {
    p.delta = get_real(d, r["delta"], "/delta");
    if (!(*p.delta >= 0) || !std::isfinite(*p.delta)) fail(d, "/delta", "delta must be finite and >= 0");
  }
  for (const char* k : {"mu", "c1"}) {
    if (!r.contains(k)) continue;
    const std::string path = std::string("/") + k;
    const double v = get_real(d, r[k], path);
    if (!(v > 0) || !std::isfinite(v)) fail(d, path, std::string(k) + " must be finite and > 0");
    (std::string(k) == "mu" ? p.mu : p.c1) = v;
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

std::string problem_to_json(const ProblemFile& p) {
  ojson r;
  r["version"] = p.version;
  ojson g;
  g["kind"] = to_string(p.gauge.kind);
  if (!p.generator) {
    switch (p.gauge.kind) {
      case GaugeKind::L1:
      case GaugeKind::NonnegL1: g["n"] = p.gauge.n; break;
      case GaugeKind::AnalysisL1: g["D"] = mat_json(p.gauge.Dt); break;
      case GaugeKind::WSL1: g["w"] = vec_json(p.gauge.w); break;
      case GaugeKind::GroupL12: g["partition"] = p.gauge.groups; break;
      case GaugeKind::Nuclear: g["shape"] = {p.gauge.rows, p.gauge.cols}; break;
      case GaugeKind::SdpTrace: g["C"] = mat_json(p.gauge.C); break;
    }
  }
  r["gauge"] = g;
  if (p.A) r["A"] = mat_json(*p.A);
  if (p.generator) {
    const InstanceConfig& c = *p.generator;
    r["generator"] = ojson{{"m", c.m},       {"n", c.n},       {"sparsity", c.sparsity},    {"rank", c.rank},
                           {"rows", c.rows}, {"cols", c.cols}, {"group_size", c.group_size}};
  }
  if (p.x0) r["x0"] = vec_json(*p.x0);
  if (p.b) r["b"] = vec_json(*p.b);
  if (p.b0) r["b0"] = vec_json(*p.b0);
  if (p.delta) r["delta"] = *p.delta;
  if (p.mu) r["mu"] = *p.mu;
  if (p.c1) r["c1"] = *p.c1;
  return emit(r);
}

// ---------------------------------------------------------------------------
// Reports.

std::string certificate_json(const CertificateReport& rep, const Gauge& J, const std::string& condition,
                             Verdict verdict) {
  ojson r;
  r["report"] = "certificate";
  r["version"] = kFormatVersion;
  r["gauge"] = to_string(J.kind);
  r["condition"] = condition;
  r["verdict"] = to_string(verdict);
  r["sharp"] = to_string(rep.is_sharp);
  r["unique"] = to_string(rep.is_unique);
  r["kappa"] = opt_real(rep.kappa);
  r["kappa_certified"] = rep.kappa_certified;
  r["kappa_direction"] = rep.kappa_direction ? vec_json(*rep.kappa_direction) : ojson(nullptr);
  r["alpha"] = opt_real(rep.alpha);
  r["alpha_certified"] = rep.alpha_certified;
  r["kernel_trivial"] = rep.kernel_trivial;
  r["dual_certificate"] = rep.dual_certificate ? vec_json(*rep.dual_certificate) : ojson(nullptr);
  r["ri_margin"] = real(rep.ri_margin);
  r["lp_value"] = opt_real(rep.lp_value);
  ojson conds = ojson::array();
  for (const ConditionCheck& c : rep.conditions)
    conds.push_back(ojson{{"id", c.id}, {"verdict", to_string(c.verdict)}, {"certified", c.certified},
                          {"detail", c.detail}});
  r["conditions"] = conds;
  r["notes"] = rep.notes;
  return emit(r);
}

std::string solve_json(const SolveResult& s, const std::string& problem, const std::optional<DualityGap>& gap) {
  ojson r;
  r["report"] = "solve";
  r["version"] = kFormatVersion;
  r["problem"] = problem;
  r["status"] = to_string(s.status);
  r["method"] = s.method;
  r["value"] = real(s.value);
  r["point"] = vec_json(s.point);
  r["feasibility_residual"] = real(s.feasibility_residual);
  r["optimality_residual"] = real(s.optimality_residual);
  r["iterations"] = s.iterations;
  r["mu"] = std::isnan(s.mu) ? ojson(nullptr) : real(s.mu);
  r["residual_monotone"] = s.residual_monotone;
  r["multiplier"] = s.multiplier.size() ? vec_json(s.multiplier) : ojson(nullptr);
  r["primal_value"] = gap ? real(gap->primal) : ojson(nullptr);
  r["dual_value"] = gap ? real(gap->dual) : ojson(nullptr);
  r["gap"] = gap ? real(gap->gap) : ojson(nullptr);
  return emit(r);
}

std::string recovery_json(const RecoveryReport& rep) {
  ojson r;
  r["report"] = "recovery";
  r["version"] = kFormatVersion;
  r["rows"] = rep.rows.size();
  r["applicable"] = rep.applicable;
  r["passed"] = rep.passed;
  r["failed"] = rep.failed;
  r["errors"] = rep.errors;
  r["pass_rate"] = real(rep.pass_rate());
  r["max_violation"] = real(rep.max_violation);
  r["all_pass"] = rep.all_pass();
  return emit(r);
}

std::string nsp_json(const std::vector<Index>& support, double constant) {
  ojson r;
  r["report"] = "nsp";
  r["version"] = kFormatVersion;
  r["support"] = support;
  r["constant"] = real(constant);
  r["below_half"] = constant < 0.5;
  return emit(r);
}

std::string validate_report(const std::string& text) { return validate_doc(parse_strict(text)); }

ParsedCertificate parse_certificate_json(const std::string& text) {
  const Doc d = parse_strict(text);
  if (validate_doc(d) != "certificate") fail(d, "/report", "expected a certificate report");
  const json& r = d.root;
  ParsedCertificate out;
  CertificateReport& rep = out.report;
  auto verdict = [&](const char* key) {
    const auto v = verdict_from_string(r[key].get<std::string>());
    if (!v) fail(d, std::string("/") + key, "expected yes, no or unknown");
    return *v;
  };
  auto opt_r = [&](const char* key) -> std::optional<double> {
    if (r[key].is_null()) return std::nullopt;
    return get_real(d, r[key], std::string("/") + key, true);
  };
  auto opt_v = [&](const char* key) -> std::optional<Vector> {
    if (r[key].is_null()) return std::nullopt;
    return get_vector(d, r[key], std::string("/") + key, true);
  };
  out.gauge = r["gauge"].get<std::string>();
  out.condition = r["condition"].get<std::string>();
  out.verdict = verdict("verdict");
  rep.is_sharp = verdict("sharp");
  rep.is_unique = verdict("unique");
  rep.kappa = opt_r("kappa");
  rep.kappa_certified = r["kappa_certified"].get<bool>();
  rep.kappa_direction = opt_v("kappa_direction");
  rep.alpha = opt_r("alpha");
  rep.alpha_certified = r["alpha_certified"].get<bool>();
  rep.kernel_trivial = r["kernel_trivial"].get<bool>();
  rep.dual_certificate = opt_v("dual_certificate");
  rep.ri_margin = get_real(d, r["ri_margin"], "/ri_margin", true);
  rep.lp_value = opt_r("lp_value");
  for (const json& c : r["conditions"])
    rep.conditions.push_back(ConditionCheck{c["id"].get<std::string>(),
                                            *verdict_from_string(c["verdict"].get<std::string>()),
                                            c["certified"].get<bool>(), c["detail"].get<std::string>()});
  for (const json& n : r["notes"]) rep.notes.push_back(n.get<std::string>());
  return out;
}

}  // namespace gaugecert
