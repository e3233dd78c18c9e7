// ncspace: experiment runner. Every command resolves a typed configuration,
// runs, and writes <out>/<run id>/report.json plus rows.csv.
//
// Exit codes: 0 every verdict passed, 1 some verdict failed, 2 usage, schema
// or input error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ncspace/ncspace.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace ncspace;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kLevelNote =
    "Banach-level (level-1) checks: completely bounded statements are verified on scalar-level norms only";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Schema and configuration

enum class Kind { integer, number, exponent, string, int_list, grid };

struct KeySpec {
  Kind kind;
  ojson def;  // null means required
  std::vector<std::string> choices = {};
};

using Schema = std::map<std::string, KeySpec>;

Schema common_schema() {
  return {
      {"seed", {Kind::integer, 0}},
      {"solver.tol", {Kind::number, 1e-6}},
      {"solver.max_iter", {Kind::integer, 50000}},
  };
}

Schema command_schema(const std::string& cmd) {
  Schema s = common_schema();
  auto add = [&s](Schema extra) {
    for (auto& [k, v] : extra) s[k] = v;
  };
  if (cmd == "norm") {
    add({{"input", {Kind::string, nullptr}},
         {"space", {Kind::string, "schatten", {"schatten", "vector", "asymmetric", "jk"}}},
         {"exponents.p", {Kind::exponent, 2.0}},
         {"exponents.q", {Kind::exponent, 1.0}},
         {"exponents.r", {Kind::exponent, 2.0}},
         {"exponents.s", {Kind::exponent, 2.0}},
         {"trace", {Kind::string, "auto", {"auto", "tr", "tau"}}},
         {"jk.mode", {Kind::string, "intersection", {"intersection", "sum"}}}});
  } else if (cmd == "embed-verify") {
    add({{"dims.n", {Kind::integer, 2}},
         {"exponents.p", {Kind::exponent, 2.0}},
         {"exponents.q", {Kind::exponent, 1.0}},
         {"mc.samples", {Kind::integer, 200}},
         {"search.adversarial", {Kind::integer, 20}},
         {"min.samples", {Kind::integer, 20}}});
    s["solver.tol"].def = 1e-5;
  } else if (cmd == "main-theorem-check") {
    add({{"dims.l", {Kind::integer, 2}},
         {"dims.n", {Kind::integer, 3}},
         {"exponents.p", {Kind::exponent, 2.0}},
         {"mc.samples", {Kind::integer, 5}}});
  } else if (cmd == "rosenthal") {
    add({{"mode", {Kind::string, "nc", {"nc", "classical"}}},
         {"dims.m", {Kind::integer, 2}},
         {"dims.l", {Kind::integer, 2}},
         {"dims.n", {Kind::integer, 4}},
         {"exponents.p", {Kind::exponent, 2.0}},
         {"mc.samples", {Kind::integer, 100}},
         {"distribution", {Kind::string, "exponential", {"exponential", "bernoulli", "uniform", "constant"}}},
         {"theta", {Kind::number, 0.5}}});
  } else if (cmd == "cb-check") {
    add({{"dims.n", {Kind::integer, 3}},
         {"exponents.r", {Kind::exponent, "inf"}},
         {"exponents.s", {Kind::exponent, 2.0}},
         {"orientation", {Kind::string, "column", {"column", "row"}}},
         {"mc.samples", {Kind::integer, 10}},
         {"cb.iterations", {Kind::integer, 200}},
         {"cb.restarts", {Kind::integer, 8}}});
  } else if (cmd == "type-cotype") {
    add({{"witness", {Kind::string, "type", {"type", "cotype", "commutative"}}},
         {"dims.d", {Kind::int_list, ojson::array({2, 3, 4, 6})}},
         {"dims.gamma", {Kind::int_list, ojson::array({4, 16, 64})}},
         {"exponents.p", {Kind::exponent, 1.0}},
         {"exponents.q", {Kind::exponent, 2.0}},
         {"mc.samples", {Kind::integer, 10000}}});
  } else if (cmd == "sweep") {
    add({{"sweep.command", {Kind::string, nullptr,
                            {"norm", "embed-verify", "main-theorem-check", "rosenthal", "cb-check", "type-cotype"}}},
         {"sweep.grid", {Kind::grid, ojson::object()}}});
  } else {
    throw UsageError("unknown command '" + cmd + "'");
  }
  return s;
}

void flatten(const ojson& node, const std::string& prefix, std::map<std::string, ojson>& out) {
  if (node.is_object() && prefix != "sweep.grid") {
    for (auto it = node.begin(); it != node.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    }
  } else {
    out[prefix] = node;
  }
}

ojson parse_scalar(const std::string& text) {
  try {
    return ojson::parse(text);
  } catch (const std::exception&) {
    return text;
  }
}

void check_value(const std::string& key, const KeySpec& spec, const ojson& v) {
  auto fail = [&](const std::string& what) { throw UsageError("config key '" + key + "': " + what); };
  switch (spec.kind) {
    case Kind::integer:
      if (!v.is_number_integer()) fail("expected an integer");
      break;
    case Kind::number:
      if (!v.is_number()) fail("expected a number");
      break;
    case Kind::exponent:
      if (v.is_number()) {
        if (v.get<double>() < 1.0) fail("exponent must be >= 1");
      } else if (v.is_string()) {
        try {
          parse_exponent(v.get<std::string>()).require_at_least_one("exponent");
        } catch (const std::exception& e) {
          fail(e.what());
        }
      } else {
        fail("expected an exponent (number or \"inf\")");
      }
      break;
    case Kind::string:
      if (!v.is_string()) fail("expected a string");
      if (!spec.choices.empty() &&
          std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end()) {
        fail("unsupported value '" + v.get<std::string>() + "'");
      }
      break;
    case Kind::int_list:
      if (!v.is_array() || v.empty()) fail("expected a non-empty list of integers");
      for (const auto& e : v) {
        if (!e.is_number_integer()) fail("expected a list of integers");
      }
      break;
    case Kind::grid:
      if (!v.is_object()) fail("expected an object of key -> list");
      break;
  }
}

class Config {
 public:
  Config(std::string command, Schema schema, std::map<std::string, ojson> values)
      : command_(std::move(command)), schema_(std::move(schema)), values_(std::move(values)) {
    for (const auto& [k, v] : values_) {
      if (!schema_.count(k)) throw UsageError("unknown config key '" + k + "' for command " + command_);
    }
    for (const auto& [k, spec] : schema_) {
      if (!values_.count(k)) {
        if (spec.def.is_null()) throw UsageError("missing required config key '" + k + "'");
        values_[k] = spec.def;
      }
      if (spec.kind == Kind::int_list && values_[k].is_number_integer()) values_[k] = ojson::array({values_[k]});
      check_value(k, spec, values_[k]);
    }
  }

  const std::string& command() const { return command_; }
  const Schema& schema() const { return schema_; }
  const std::map<std::string, ojson>& values() const { return values_; }

  long long integer(const std::string& k) const { return values_.at(k).get<long long>(); }
  double number(const std::string& k) const { return values_.at(k).get<double>(); }
  std::string str(const std::string& k) const { return values_.at(k).get<std::string>(); }
  Exponent exponent(const std::string& k) const {
    const ojson& v = values_.at(k);
    return v.is_string() ? parse_exponent(v.get<std::string>()) : Exponent(v.get<double>());
  }
  std::vector<int> int_list(const std::string& k) const { return values_.at(k).get<std::vector<int>>(); }
  const ojson& raw(const std::string& k) const { return values_.at(k); }

  SolverOptions solver() const {
    SolverOptions o;
    o.tolerance = number("solver.tol");
    o.max_iterations = static_cast<int>(integer("solver.max_iter"));
    return o;
  }
  RngSeed seed(const std::string& label) const {
    return {static_cast<std::uint64_t>(integer("seed")), command_ + "/" + label};
  }

  ojson snapshot() const {
    ojson out = ojson::object();
    for (const auto& [k, v] : values_) {
      if (k == "sweep.grid") {
        out["sweep"]["grid"] = v;
        continue;
      }
      ojson* node = &out;
      std::size_t start = 0;
      for (std::size_t dot; (dot = k.find('.', start)) != std::string::npos; start = dot + 1) {
        node = &(*node)[k.substr(start, dot - start)];
      }
      (*node)[k.substr(start)] = v;
    }
    return out;
  }

 private:
  std::string command_;
  Schema schema_;
  std::map<std::string, ojson> values_;
};

// ---------------------------------------------------------------------------
// Reports

struct Report {
  ojson rows = ojson::array();
  ojson summary = ojson::object();
  ojson verdicts = ojson::array();
  ojson thresholds = ojson::object();

  void verdict(const std::string& name, bool pass, const std::string& detail, std::optional<std::size_t> row = {}) {
    ojson v{{"name", name}, {"pass", pass}, {"detail", detail}};
    if (row) v["row"] = *row;
    verdicts.push_back(std::move(v));
  }
  bool all_pass() const {
    for (const auto& v : verdicts) {
      if (!v["pass"].get<bool>()) return false;
    }
    return true;
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

ojson exp_json(const Exponent& e) { return e.is_infinite() ? ojson("inf") : ojson(e.value()); }

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_number_float()) return num(v.get<double>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  return v.dump();
}

void write_csv(const fs::path& path, const ojson& rows) {
  std::vector<std::string> cols;
  std::set<std::string> seen;
  for (const auto& r : rows) {
    for (auto it = r.begin(); it != r.end(); ++it) {
      if (seen.insert(it.key()).second) cols.push_back(it.key());
    }
  }
  std::ofstream out(path);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      out << (i ? "," : "") << (r.contains(cols[i]) ? csv_cell(r[cols[i]]) : "");
    }
    out << '\n';
  }
}

std::string run_id(const ojson& snapshot) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char ts[32];
  std::strftime(ts, sizeof ts, "%Y%m%dT%H%M%SZ", &tm);
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(ncspace::detail::fnv1a(snapshot.dump())));
  return std::string(ts) + "-" + std::string(hash).substr(0, 12);
}

fs::path persist(const Config& cfg, const Report& rep, const fs::path& out_root) {
  const ojson snap = cfg.snapshot();
  const std::string base = run_id(snap);
  fs::path dir = out_root / base;
  for (int i = 1; fs::exists(dir); ++i) dir = out_root / (base + "-" + std::to_string(i));
  fs::create_directories(dir);
  ojson doc;
  doc["run_id"] = dir.filename().string();
  doc["tool"] = "ncspace";
  doc["version"] = kVersion;
  doc["command"] = cfg.command();
  doc["level"] = kLevelNote;
  doc["config"] = snap;
  doc["tolerances"] = {{"solver.tol", cfg.number("solver.tol")},
                       {"solver.max_iter", cfg.integer("solver.max_iter")},
                       {"verdicts", rep.thresholds}};
  doc["summary"] = rep.summary;
  doc["verdicts"] = rep.verdicts;
  doc["all_pass"] = rep.all_pass();
  doc["rows"] = rep.rows;
  std::ofstream(dir / "report.json") << doc.dump(2) << '\n';
  write_csv(dir / "rows.csv", rep.rows);
  return dir;
}

// ---------------------------------------------------------------------------
// Commands

ojson certified_row(const CertifiedValue& cv) {
  return {{"lower", cv.lower}, {"upper", cv.upper}, {"gap", cv.gap}, {"status", to_string(cv.status)},
          {"iterations", cv.iterations}};
}

bool all_diagonal(const VectorElement& v) {
  for (const auto& c : v.components) {
    CMat off = c;
    off.diagonal().setZero();
    if (!off.isZero(0.0)) return false;
  }
  return true;
}

Report cmd_norm(const Config& cfg) {
  Report rep;
  const std::string path = cfg.str("input");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open input '" + path + "'");
  std::string magic;
  in >> magic;
  in.seekg(0);
  const std::string trace = cfg.str("trace");
  VectorElement x;
  bool matrix_input = false;
  if (magic == "NCMAT") {
    x = VectorElement({read_ncmat(in)}, trace == "tau" ? TraceWeight::Kind::normalized : TraceWeight::Kind::unnormalized);
    matrix_input = true;
  } else if (magic == "NCVEC") {
    x = read_ncvec(in);
    if (trace != "auto") x.weight = trace == "tau" ? TraceWeight::Kind::normalized : TraceWeight::Kind::unnormalized;
  } else {
    throw ParseError("input is neither NCMAT nor NCVEC");
  }
  const std::string space = cfg.str("space");
  const Exponent p = cfg.exponent("exponents.p"), q = cfg.exponent("exponents.q");
  const SolverOptions opt = cfg.solver();
  ojson row{{"space", space}, {"components", x.size()}, {"dim", x.dimension()},
            {"trace", x.weight == TraceWeight::Kind::normalized ? "tau" : "tr"}};
  rep.thresholds = {{"bracket_order", 1e-12}, {"certificate_residual", 1e-8}, {"commutative_cross_check", 1e-6}};

  auto check_cert = [&](const CertifiedValue& cv) {
    rep.verdict("bracket_ordered", cv.lower <= cv.upper * (1.0 + 1e-12), short_num(cv.lower) + " <= " + short_num(cv.upper), 0);
    if (!cv.primal.middle.empty()) {
      const double scale = std::max(1.0, x[0].norm());
      const double res = primal_residual(cv, x);
      row["primal_residual"] = res;
      rep.verdict("primal_certificate_reproduces_input", res <= 1e-8 * scale, "residual " + short_num(res), 0);
    }
    if (!cv.dual_certificate.middle.empty()) {
      const double res = dual_residual(cv);
      row["dual_residual"] = res;
      rep.verdict("dual_certificate_feasible", res <= 1e-8 * std::max(1.0, cv.dual[0].norm()) && dual_objective(cv) <= 1.0 + 1e-8,
                  "residual " + short_num(res), 0);
    }
  };

  if (space == "schatten") {
    row["p"] = exp_json(p);
    const double v = matrix_input ? lp_trace_norm(x[0], p, x.trace_weight()) : block_lp_norm(x, p);
    row["lower"] = v;
    row["upper"] = v;
    row["status"] = "exact";
    rep.summary["value"] = v;
  } else if (space == "vector") {
    row["p"] = exp_json(p);
    row["q"] = exp_json(q);
    const CertifiedValue cv = norm_lq_valued(x, p, q, opt);
    row.update(certified_row(cv));
    check_cert(cv);
    if (all_diagonal(x)) {
      const Eigen::Index n = x.dimension();
      Eigen::MatrixXd table(static_cast<Eigen::Index>(x.size()), n);
      for (std::size_t k = 0; k < x.size(); ++k) table.row(static_cast<Eigen::Index>(k)) = x[k].diagonal().cwiseAbs().transpose();
      const RVec w = RVec::Constant(n, x.weight == TraceWeight::Kind::normalized ? 1.0 / static_cast<double>(n) : 1.0);
      const double comm = commutative_mixed_norm(table, w, p, q);
      row["commutative_oracle"] = comm;
      rep.verdict("commutative_cross_check",
                  cv.lower <= comm * (1.0 + 1e-6) && cv.upper >= comm * (1.0 - 1e-6),
                  "oracle " + short_num(comm) + " in [" + short_num(cv.lower) + ", " + short_num(cv.upper) + "]", 0);
    }
    rep.summary["lower"] = cv.lower;
    rep.summary["upper"] = cv.upper;
  } else if (space == "asymmetric") {
    if (!matrix_input && x.size() != 1) throw DimensionError("asymmetric norm needs a single matrix");
    const Exponent r = cfg.exponent("exponents.r"), s = cfg.exponent("exponents.s");
    row["r"] = exp_json(r);
    row["s"] = exp_json(s);
    const CertifiedValue cv = norm_asym_scalar(x[0], r, s, x.weight, opt);
    row.update(certified_row(cv));
    const Exponent g = Exponent::harmonic_sum(r, s);
    const double closed = lp_trace_norm(x[0], g, x.trace_weight());
    row["gamma"] = exp_json(g);
    row["closed_form"] = closed;
    check_cert(cv);
    rep.thresholds["closed_form_relative"] = 1e-4;
    rep.verdict("closed_form_match", std::abs(cv.midpoint() - closed) <= 1e-4 * std::max(closed, 1e-300),
                "midpoint " + short_num(cv.midpoint()) + " vs " + short_num(closed), 0);
    rep.summary["lower"] = cv.lower;
    rep.summary["upper"] = cv.upper;
  } else {
    const JKMode mode = cfg.str("jk.mode") == "sum" ? JKMode::sum : JKMode::intersection;
    const JKNormSpec spec{p, q, x.dimension(), x.size(), mode};
    row["p"] = exp_json(p);
    row["q"] = exp_json(q);
    row["mode"] = cfg.str("jk.mode");
    const CertifiedValue cv = jk_norm(x, spec, opt);
    row.update(certified_row(cv));
    rep.verdict("bracket_ordered", cv.lower <= cv.upper * (1.0 + 1e-12), short_num(cv.lower) + " <= " + short_num(cv.upper), 0);
    rep.summary["lower"] = cv.lower;
    rep.summary["upper"] = cv.upper;
  }
  rep.rows.push_back(row);
  return rep;
}

Report cmd_embed_verify(const Config& cfg) {
  Report rep;
  const int n = static_cast<int>(cfg.integer("dims.n"));
  const EmbeddingSpec spec = EmbeddingSpec::standard(n, cfg.exponent("exponents.p"), cfg.exponent("exponents.q"));
  spec.validate();
  const bool q1 = spec.q.reciprocal() == 1.0, iso = spec.q == spec.p;
  if (!q1 && !iso) throw DomainError("embed-verify: q must be 1 or equal to p");
  const DistortionReport d = distortion_survey(spec, static_cast<int>(cfg.integer("mc.samples")),
                                               static_cast<int>(cfg.integer("search.adversarial")), cfg.seed("survey"),
                                               cfg.solver());
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto& r = d.rows[i];
    rep.rows.push_back({{"section", "distortion"}, {"input", r.input}, {"kind", r.kind}, {"x_norm", r.x_norm},
                        {"phi_lower", r.phi_lower}, {"phi_upper", r.phi_upper}, {"ratio_low", r.ratio_low},
                        {"ratio_high", r.ratio_high}, {"status", r.status}});
    if (r.ratio_low < d.rows[argmin].ratio_low) argmin = i;
  }
  rep.summary = {{"min_ratio", d.min_ratio}, {"max_ratio", d.max_ratio}, {"adversarial_min", d.adversarial_min},
                 {"adversarial_max", d.adversarial_max}, {"ambient_dim", spec.ambient_dim()}};
  rep.thresholds = {{"min_ratio_floor", 1 - 1e-3}, {"max_ratio_guard_times_p", 8.0}, {"isometry", 1e-8},
                    {"min_structure_selfadjoint", 1 + 1e-6}, {"min_structure_general", 2 + 1e-6}};
  rep.verdict("inverse_contraction", d.min_ratio >= 1.0 - 1e-3, "min ratio " + short_num(d.min_ratio), argmin);
  if (!spec.p.is_infinite()) {
    rep.verdict("calibration_guard", d.max_ratio <= 8.0 * spec.p.value(), "max ratio " + short_num(d.max_ratio));
  }
  if (iso) {
    rep.verdict("isometry", std::abs(d.min_ratio - 1.0) <= 1e-8 && std::abs(d.max_ratio - 1.0) <= 1e-8,
                "ratios in [" + num(d.min_ratio) + ", " + num(d.max_ratio) + "]");
  }
  Engine eng = make_engine(cfg.seed("min-structure"));
  double sa = 0.0, gen = 0.0;
  std::size_t sa_row = 0, gen_row = 0;
  for (long long i = 0; i < cfg.integer("min.samples"); ++i) {
    for (int general = 0; general < 2; ++general) {
      const CMat x = general ? ginibre(n, n, eng) : random_hermitian(n, eng);
      const MinStructureResult m = min_structure_check(x, spec);
      rep.rows.push_back({{"section", "min_structure"}, {"input", std::to_string(i)},
                          {"kind", general ? "general" : "self_adjoint"}, {"x_norm", m.snorm},
                          {"estimate", m.estimate}, {"factor", m.factor}});
      double& worst = general ? gen : sa;
      if (m.factor > worst) {
        worst = m.factor;
        (general ? gen_row : sa_row) = rep.rows.size() - 1;
      }
    }
  }
  if (cfg.integer("min.samples") > 0) {
    rep.summary["min_structure_selfadjoint_max"] = sa;
    rep.summary["min_structure_general_max"] = gen;
    rep.verdict("min_structure_selfadjoint", sa <= 1.0 + 1e-6, "max factor " + short_num(sa), sa_row);
    rep.verdict("min_structure_general", gen <= 2.0 + 1e-6, "max factor " + short_num(gen), gen_row);
  }
  return rep;
}

IndependentFamily random_family(Eigen::Index l, int n, Engine& eng) {
  IndependentFamily f;
  f.l = l;
  for (int k = 0; k < n; ++k) f.blocks.push_back(random_mixed_input(l, eng));
  return f;
}

Report cmd_main_theorem(const Config& cfg) {
  Report rep;
  const Exponent p = cfg.exponent("exponents.p");
  const Eigen::Index l = cfg.integer("dims.l");
  const int n = static_cast<int>(cfg.integer("dims.n"));
  require_capacity(std::pow(static_cast<long double>(l), n), "main-theorem-check");
  rep.thresholds = {{"lower_sandwich", 1 - 1e-3}, {"p1_equality", 1e-6}, {"dual_upper", 1 + 1e-3}, {"ratio_high_guard", 8.0}};
  Engine eng = make_engine(cfg.seed("families"));
  double low = INFINITY, high = 0.0, dual = 0.0;
  for (long long i = 0; i < cfg.integer("mc.samples"); ++i) {
    const IndependentFamily f = random_family(l, n, eng);
    const MainTheoremResult r = theorem_main_check(f, p, cfg.solver());
    const MainTheoremDualResult d = theorem_main_dual_check(f, p, cfg.solver());
    rep.rows.push_back({{"instance", i}, {"lhs_lower", r.lhs.lower}, {"lhs_upper", r.lhs.upper}, {"cap", r.cap},
                        {"ratio_low", r.ratio_low}, {"ratio_high", r.ratio_high}, {"dual_lhs_upper", d.lhs.upper},
                        {"sum_lower", d.sum.lower}, {"sum_upper", d.sum.upper}, {"dual_ratio_high", d.ratio_high},
                        {"status", to_string(r.lhs.status)}});
    const std::size_t row = rep.rows.size() - 1;
    rep.verdict("lower_sandwich", r.ratio_low >= 1.0 - 1e-3, "lhs/cap " + short_num(r.ratio_low), row);
    rep.verdict("dual_upper_sandwich", d.ratio_high <= 1.0 + 1e-3, "lhs/sum " + short_num(d.ratio_high), row);
    rep.verdict("ratio_high_guard", r.ratio_high <= 8.0, "lhs/(p cap) " + short_num(r.ratio_high), row);
    if (p.reciprocal() == 1.0) {
      const double dev = std::max(std::abs(r.lhs.lower - r.cap), std::abs(r.lhs.upper - r.cap)) / r.cap;
      rep.verdict("p1_equality", dev <= 1e-6, "relative deviation " + short_num(dev), row);
    }
    low = std::min(low, r.ratio_low);
    high = std::max(high, r.ratio_high);
    dual = std::max(dual, d.ratio_high);
  }
  rep.summary = {{"min_ratio_low", low}, {"max_ratio_high", high}, {"max_dual_ratio", dual}};
  return rep;
}

Distribution parse_distribution(const std::string& s) {
  if (s == "exponential") return Distribution::exponential;
  if (s == "bernoulli") return Distribution::bernoulli;
  if (s == "uniform") return Distribution::uniform;
  return Distribution::constant;
}

Report cmd_rosenthal(const Config& cfg) {
  Report rep;
  const Exponent p = cfg.exponent("exponents.p");
  if (cfg.str("mode") == "classical") {
    rep.thresholds = {{"ratio_low", 0.25}, {"ratio_high", 4.0}};
    const int n = static_cast<int>(cfg.integer("dims.n"));
    const auto r = classical_rosenthal_check(parse_distribution(cfg.str("distribution")), n, p,
                                             static_cast<std::size_t>(cfg.integer("mc.samples")), cfg.seed("classical"),
                                             cfg.number("theta"));
    rep.rows.push_back({{"distribution", cfg.str("distribution")}, {"n", n}, {"p", exp_json(p)},
                        {"lhs", r.lhs.mean}, {"lhs_std_error", r.lhs.std_error}, {"rhs", r.rhs}, {"ratio", r.ratio},
                        {"ratio_ci_low", r.ratio_ci_low}, {"ratio_ci_high", r.ratio_ci_high},
                        {"samples", r.lhs.count}, {"deterministic", r.lhs.deterministic}});
    rep.summary = {{"ratio", r.ratio}};
    rep.verdict("ratio_bounded", r.ratio_ci_low >= 0.25 && r.ratio_ci_high <= 4.0,
                "ratio " + short_num(r.ratio) + " CI [" + short_num(r.ratio_ci_low) + ", " + short_num(r.ratio_ci_high) + "]", 0);
    return rep;
  }
  rep.thresholds = {{"ratio_over_p", 8.0}, {"scaling_invariance", 1e-12}};
  const Eigen::Index m = cfg.integer("dims.m"), l = cfg.integer("dims.l");
  const int n = static_cast<int>(cfg.integer("dims.n"));
  require_capacity(static_cast<long double>(m) * std::pow(static_cast<long double>(l), n), "rosenthal");
  Engine eng = make_engine(cfg.seed("families"));
  double worst = 0.0, drift = 0.0;
  std::size_t worst_row = 0;
  for (long long i = 0; i < cfg.integer("mc.samples"); ++i) {
    IndependentFamily f{l, {}, m};
    for (int k = 0; k < n; ++k) f.blocks.push_back(random_psd(m * l, eng));
    IndependentFamily g = f;
    for (auto& b : g.blocks) b *= 2.5;
    const RosenthalResult r = rosenthal_nc_check(f, p);
    const RosenthalResult s = rosenthal_nc_check(g, p);
    rep.rows.push_back({{"instance", i}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ratio_over_p", r.ratio_over_p},
                        {"scaled_ratio_over_p", s.ratio_over_p}});
    if (r.ratio_over_p > worst) {
      worst = r.ratio_over_p;
      worst_row = rep.rows.size() - 1;
    }
    drift = std::max(drift, std::abs(r.ratio_over_p - s.ratio_over_p));
  }
  rep.summary = {{"max_ratio_over_p", worst}, {"max_scaling_drift", drift}};
  rep.verdict("ratio_over_p_bounded", worst <= 8.0, "max " + short_num(worst), worst_row);
  rep.verdict("scaling_invariance", drift <= 1e-12, "max drift " + short_num(drift));
  return rep;
}

Report cmd_cb_check(const Config& cfg) {
  Report rep;
  rep.thresholds = {{"upper", 1 + 1e-9}, {"attainment", 1 - 1e-3}};
  const Exponent r = cfg.exponent("exponents.r"), s = cfg.exponent("exponents.s");
  const Eigen::Index n = cfg.integer("dims.n");
  const Orientation o = cfg.str("orientation") == "row" ? Orientation::row : Orientation::column;
  Engine eng = make_engine(cfg.seed("maps"));
  for (long long i = 0; i < cfg.integer("mc.samples"); ++i) {
    const ColumnMapSpec spec{ginibre(n, n, eng), r, s, o};
    const double cf = cb_norm_closed_form(spec);
    const CBLowerBound lb = cb_lower_bound(spec, static_cast<int>(cfg.integer("cb.iterations")),
                                           static_cast<int>(cfg.integer("cb.restarts")),
                                           cfg.seed("lower/" + std::to_string(i)));
    const double ratio = lb.value / cf;
    rep.rows.push_back({{"instance", i}, {"t", exp_json(spec.t())}, {"closed_form", cf}, {"lower_bound", lb.value},
                        {"ratio", ratio}, {"converged", lb.converged}, {"iterations", lb.iterations}});
    const std::size_t row = rep.rows.size() - 1;
    rep.verdict("weak_duality", ratio <= 1.0 + 1e-9, "ratio " + num(ratio), row);
    rep.verdict("attainment", ratio >= 1.0 - 1e-3, "ratio " + num(ratio), row);
  }
  return rep;
}

Report cmd_type_cotype(const Config& cfg) {
  Report rep;
  const std::string w = cfg.str("witness");
  const Exponent p = cfg.exponent("exponents.p"), q = cfg.exponent("exponents.q");
  const std::uint64_t seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  auto push = [&](const WitnessReport& r) {
    rep.rows.push_back({{"d", r.d}, {"p", exp_json(r.p)}, {"q", exp_json(r.q)}, {"lhs", r.lhs}, {"rhs", r.rhs},
                        {"implied_bound", r.implied_bound}, {"ci_low", r.ci_low}, {"ci_high", r.ci_high},
                        {"samples", r.samples}, {"seed", seed}, {"measured", r.measured}});
    return rep.rows.size() - 1;
  };
  if (w == "type") {
    rep.thresholds = {{"measured_relative", 1e-10}, {"implied_bound_absolute", 1e-12}};
    for (int d : cfg.int_list("dims.d")) {
      const WitnessReport r = sigma_type_witness(d, p, q, cfg.seed("type/" + std::to_string(d)));
      const std::size_t row = push(r);
      const double expected = std::pow(static_cast<double>(d), 2.0 * (p.reciprocal() - q.reciprocal()));
      rep.verdict("measured_lhs_exact", std::abs(r.measured - r.lhs) <= 1e-10 * r.lhs, "measured " + num(r.measured), row);
      rep.verdict("implied_bound", std::abs(r.implied_bound - expected) <= 1e-12,
                  "d^{2(1/p-1/q)} = " + num(expected), row);
    }
  } else if (w == "cotype") {
    rep.thresholds = {{"measured_relative", 1e-10}, {"ratio_absolute", 1e-12}};
    for (int d : cfg.int_list("dims.d")) {
      const WitnessReport r = cotype_witness(d, p, q, cfg.seed("cotype/" + std::to_string(d)));
      const std::size_t row = push(r);
      const double dd = static_cast<double>(d);
      const double coef = 0.5 + p.reciprocal() / 2 + q.reciprocal() / 2;
      const double func = q.conjugate().reciprocal() + q.reciprocal() / 2 + p.conjugate().reciprocal() / 2;
      rep.verdict("measured_function_side", std::abs(r.measured - r.rhs) <= 1e-10 * r.rhs, "measured " + num(r.measured), row);
      rep.verdict("ratio_exponents", std::abs(r.implied_bound - std::pow(dd, coef - func)) <= 1e-12,
                  "d^" + short_num(coef - func), row);
    }
  } else {
    rep.thresholds = {{"c_low", 0.3}, {"c_high", 1.0}};
    for (int g : cfg.int_list("dims.gamma")) {
      const WitnessReport r = commutative_type_bound(static_cast<std::size_t>(g), p, q,
                                                     static_cast<std::size_t>(cfg.integer("mc.samples")),
                                                     cfg.seed("commutative/" + std::to_string(g)));
      const std::size_t row = push(r);
      rep.rows[row]["d"] = g;
      rep.verdict("implied_c_range", r.implied_bound >= 0.3 && r.implied_bound <= 1.0 && r.ci_low > 0.0,
                  "c " + short_num(r.implied_bound) + " CI low " + short_num(r.ci_low), row);
    }
  }
  return rep;
}

using Runner = std::function<Report(const Config&)>;

const std::map<std::string, Runner>& runners();

Report cmd_sweep(const Config& cfg) {
  Report rep;
  const std::string target = cfg.str("sweep.command");
  const ojson& grid = cfg.raw("sweep.grid");
  std::vector<std::string> keys;
  std::vector<ojson> lists;
  for (auto it = grid.begin(); it != grid.end(); ++it) {
    keys.push_back(it.key());
    lists.push_back(it.value().is_array() ? it.value() : ojson::array({it.value()}));
    if (lists.back().empty()) throw UsageError("sweep.grid." + it.key() + " is empty");
  }
  std::map<std::string, ojson> base;
  for (const auto& [k, v] : cfg.values()) {
    if (k.rfind("sweep.", 0) != 0) base[k] = v;
  }
  const Schema target_schema = command_schema(target);
  std::vector<std::size_t> idx(keys.size(), 0);
  std::size_t point = 0;
  while (true) {
    std::map<std::string, ojson> vals = base;
    ojson label = ojson::object();
    for (std::size_t i = 0; i < keys.size(); ++i) {
      vals[keys[i]] = lists[i][idx[i]];
      label[keys[i]] = lists[i][idx[i]];
    }
    for (auto it = vals.begin(); it != vals.end();) {
      // drop defaults the target does not know about (e.g. another command's solver default)
      it = target_schema.count(it->first) ? std::next(it) : vals.erase(it);
    }
    const Config sub(target, target_schema, vals);
    const Report r = runners().at(target)(sub);
    const std::size_t offset = rep.rows.size();
    for (const auto& row : r.rows) {
      ojson out = ojson::object();
      out["point"] = point;
      for (auto it = label.begin(); it != label.end(); ++it) out[it.key()] = it.value();
      for (auto it = row.begin(); it != row.end(); ++it) out[it.key()] = it.value();
      rep.rows.push_back(std::move(out));
    }
    for (auto v : r.verdicts) {
      v["name"] = "point " + std::to_string(point) + ": " + v["name"].get<std::string>();
      if (v.contains("row")) v["row"] = v["row"].get<std::size_t>() + offset;
      rep.verdicts.push_back(std::move(v));
    }
    rep.summary["points"].push_back({{"point", point}, {"grid", label}, {"summary", r.summary}});
    rep.thresholds = r.thresholds;
    ++point;
    std::size_t i = 0;
    for (; i < keys.size(); ++i) {
      if (++idx[i] < lists[i].size()) break;
      idx[i] = 0;
    }
    if (i == keys.size()) break;
  }
  return rep;
}

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> r{
      {"norm", cmd_norm},         {"embed-verify", cmd_embed_verify}, {"main-theorem-check", cmd_main_theorem},
      {"rosenthal", cmd_rosenthal}, {"cb-check", cmd_cb_check},       {"type-cotype", cmd_type_cotype},
      {"sweep", cmd_sweep},
  };
  return r;
}

// ---------------------------------------------------------------------------
// Command line

struct Invocation {
  std::string config_file;
  std::vector<std::string> sets;
  std::string out = "ncspace-runs";
  std::optional<long long> seed;
  std::map<std::string, std::string> flags;  // config key -> raw text
};

Config resolve(const std::string& cmd, const Invocation& inv) {
  std::map<std::string, ojson> vals;
  if (!inv.config_file.empty()) {
    std::ifstream f(inv.config_file);
    if (!f) throw UsageError("cannot open config '" + inv.config_file + "'");
    ojson doc;
    try {
      doc = ojson::parse(f);
    } catch (const std::exception& e) {
      throw UsageError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw UsageError("config must be a JSON object");
    flatten(doc, "", vals);
  }
  for (const auto& [k, v] : inv.flags) vals[k] = parse_scalar(v);
  for (const auto& s : inv.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--set expects key=value, got '" + s + "'");
    const std::string key = s.substr(0, eq);
    ojson value = parse_scalar(s.substr(eq + 1));
    if (key.rfind("sweep.grid.", 0) == 0) {
      ojson& g = vals["sweep.grid"];
      if (g.is_null()) g = ojson::object();
      g[key.substr(11)] = value;
    } else {
      vals[key] = value;
    }
  }
  if (inv.seed) vals["seed"] = *inv.seed;
  Schema schema = command_schema(cmd);
  if (cmd == "sweep") {
    // a sweep accepts every key of its target command
    auto it = vals.find("sweep.command");
    if (it == vals.end() || !it->second.is_string()) throw UsageError("sweep needs sweep.command");
    const std::string target = it->second.get<std::string>();
    if (target == "sweep") throw UsageError("sweep cannot target itself");
    const Schema ts = command_schema(target);
    for (const auto& [k, v] : ts) schema[k] = v;
    if (auto g = vals.find("sweep.grid"); g != vals.end() && g->second.is_object()) {
      for (auto e = g->second.begin(); e != g->second.end(); ++e) {
        if (!ts.count(e.key())) throw UsageError("unknown grid key '" + e.key() + "' for command " + target);
        for (const auto& v : e.value().is_array() ? e.value() : ojson::array({e.value()})) check_value(e.key(), ts.at(e.key()), v);
      }
    }
  }
  return Config(cmd, schema, vals);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ncspace: certified noncommutative norms, embeddings and random-unitary witnesses"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  struct FlagDef {
    const char* cmd;
    const char* flag;
    const char* key;
    const char* help;
  };
  const std::vector<FlagDef> defs{
      {"norm", "input", "input", "NCMAT or NCVEC file"},
      {"norm", "--space", "space", "schatten | vector | asymmetric | jk"},
      {"norm", "--p", "exponents.p", "outer exponent p"},
      {"norm", "--q", "exponents.q", "inner exponent q"},
      {"norm", "--r", "exponents.r", "left exponent r (asymmetric)"},
      {"norm", "--s", "exponents.s", "right exponent s (asymmetric)"},
      {"norm", "--trace", "trace", "tr | tau | auto"},
      {"norm", "--mode", "jk.mode", "intersection | sum (jk)"},
      {"embed-verify", "--n", "dims.n", "matrix size n"},
      {"embed-verify", "--p", "exponents.p", "exponent p"},
      {"embed-verify", "--q", "exponents.q", "exponent q (1 or p)"},
      {"embed-verify", "--samples", "mc.samples", "random inputs"},
      {"embed-verify", "--adversarial", "search.adversarial", "adversarial steps per direction"},
      {"main-theorem-check", "--l", "dims.l", "block size l"},
      {"main-theorem-check", "--n", "dims.n", "number of blocks n"},
      {"main-theorem-check", "--p", "exponents.p", "exponent p"},
      {"main-theorem-check", "--samples", "mc.samples", "random families"},
      {"rosenthal", "--mode", "mode", "nc | classical"},
      {"rosenthal", "--p", "exponents.p", "exponent p"},
      {"rosenthal", "--n", "dims.n", "number of summands"},
      {"rosenthal", "--samples", "mc.samples", "families (nc) or Monte Carlo draws (classical)"},
      {"rosenthal", "--distribution", "distribution", "exponential | bernoulli | uniform | constant"},
      {"cb-check", "--r", "exponents.r", "source exponent r"},
      {"cb-check", "--s", "exponents.s", "target exponent s"},
      {"cb-check", "--n", "dims.n", "matrix size"},
      {"cb-check", "--samples", "mc.samples", "random maps"},
      {"type-cotype", "--witness", "witness", "type | cotype | commutative"},
      {"type-cotype", "--p", "exponents.p", "exponent p"},
      {"type-cotype", "--q", "exponents.q", "q (type) or q' (cotype)"},
      {"type-cotype", "--samples", "mc.samples", "Monte Carlo draws (commutative)"},
      {"sweep", "--command", "sweep.command", "command to sweep"},
  };
  const std::vector<std::pair<std::string, std::string>> commands{
      {"norm", "compute a certified norm of an NCMAT/NCVEC input"},
      {"embed-verify", "distortion survey of the embedding and the min-structure check"},
      {"main-theorem-check", "sandwich of the independent-sum norm by the J/K norms"},
      {"rosenthal", "noncommutative or classical Rosenthal-type inequality"},
      {"cb-check", "cb norms of column maps against the composition lower bound"},
      {"type-cotype", "type, cotype and commutative witnesses for the Steinhaus system"},
      {"sweep", "run a command over a parameter grid"},
  };

  std::map<std::string, Invocation> invs;
  std::map<std::string, std::map<std::string, std::string>> raw_flags;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    Invocation& inv = invs[name];
    sub->add_option("--config", inv.config_file, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--set", inv.sets, "override a config key (key=value)");
    sub->add_option("--out", inv.out, "output directory (NCSPACE_OUT overrides)");
    sub->add_option_function<long long>("--seed", [&inv](const long long& s) { inv.seed = s; }, "random seed");
    subs[name] = sub;
  }
  for (const auto& d : defs) {
    std::string& slot = raw_flags[d.cmd][d.key];
    subs[d.cmd]->add_option(d.flag, slot, d.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string cmd;
  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) cmd = name;
  }
  Invocation inv = invs[cmd];
  for (const auto& [key, text] : raw_flags[cmd]) {
    if (!text.empty()) inv.flags[key] = text;
  }
  if (const char* env = std::getenv("NCSPACE_OUT"); env && *env) inv.out = env;

  try {
    const Config cfg = resolve(cmd, inv);
    const Report rep = runners().at(cmd)(cfg);
    const fs::path dir = persist(cfg, rep, inv.out);
    std::size_t failed = 0;
    for (const auto& v : rep.verdicts) {
      if (!v["pass"].get<bool>()) {
        ++failed;
        std::cout << "FAIL " << v["name"].get<std::string>();
        if (v.contains("row")) std::cout << " (row " << v["row"].get<std::size_t>() << ")";
        std::cout << ": " << v["detail"].get<std::string>() << '\n';
      }
    }
    std::cout << cmd << ": " << rep.verdicts.size() - failed << "/" << rep.verdicts.size() << " verdicts passed\n";
    for (auto it = rep.summary.begin(); it != rep.summary.end(); ++it) {
      if (!it.value().is_structured()) std::cout << "  " << it.key() << " = " << csv_cell(it.value()) << '\n';
    }
    std::cout << "report: " << (dir / "report.json").string() << '\n';
    return failed == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "dimension error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
