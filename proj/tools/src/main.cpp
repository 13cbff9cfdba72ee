// kgb-lab: command-line front end for the coupled Klein-Gordon--Boussinesq
// workbench. Subcommands: classify, solve-wave, oracle, evolve, kdv-error,
// check-invariants. All outputs are deterministic: 17-significant-digit CSV,
// JSON metadata recording every parameter with its source (flag/config/
// default). Exit codes: 0 success, 2 validation error, 3 numerical failure;
// errors are reported as JSON on stdout.

#include "kgb/closed_form.hpp"
#include "kgb/errors.hpp"
#include "kgb/evolution.hpp"
#include "kgb/io.hpp"
#include "kgb/kdv.hpp"
#include "kgb/model.hpp"
#include "kgb/regimes.hpp"
#include "kgb/spectral.hpp"
#include "kgb/state.hpp"
#include "kgb/wave_solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------------------
// output locations and small serialization helpers

// Relative --out paths land under $KGB_LAB_OUT when that is set.
fs::path resolve_out(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* root = std::getenv("KGB_LAB_OUT"); root && *root)
      p = fs::path(root) / p;
  }
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec)
    throw kgb::ValidationError("CannotWrite", p.string() + ": " + ec.message());
  return p;
}

void write_json_file(const fs::path& path, const ordered_json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw kgb::ValidationError("CannotWrite", path.string());
  f << j.dump(2) << '\n';
  if (!f)
    throw kgb::ValidationError("CannotWrite", path.string());
}

ordered_json coefficients_json(const kgb::ModelCoefficients& c) {
  return {{"alpha", c.alpha}, {"a_uu", c.a_uu}, {"a_uv", c.a_uv},
          {"a_vv", c.a_vv},   {"b_uu", c.b_uu}, {"b_uv", c.b_uv},
          {"b_vv", c.b_vv}};
}

ordered_json region_json(const kgb::RegionReport& r) {
  ordered_json roots = ordered_json::array();
  for (const auto& z : r.roots)
    roots.push_back(ordered_json::array({z.real(), z.imag()}));
  return {{"alpha", r.alpha},
          {"c_s", r.c_s},
          {"mu", r.lin.mu},
          {"A", r.lin.A},
          {"B", r.lin.B},
          {"label", kgb::to_string(r.label)},
          {"predicted", kgb::to_string(r.predicted)},
          {"z_minus", r.z_minus},
          {"z_plus", r.z_plus},
          {"c20", r.c20},
          {"roots", roots},
          {"warnings", r.warnings}};
}

const char* to_string(kgb::SolveStatus s) {
  switch (s) {
  case kgb::SolveStatus::Converged:
    return "Converged";
  case kgb::SolveStatus::Stagnated:
    return "Stagnated";
  default:
    return "MaxIterations";
  }
}

const char* to_string(kgb::RunStatus s) {
  return s == kgb::RunStatus::Completed ? "Completed" : "BlowupSuspected";
}

// ---------------------------------------------------------------------------
// parameter registry: flags > config file > defaults, with source tracking

class ParamSet {
public:
  explicit ParamSet(CLI::App* sub) : sub_(sub) {
    sub_->add_option("--config", config_path_,
                     "numeric parameter file: flat key=value lines or a flat "
                     "JSON object; flags override it");
  }

  void add(const std::string& key, double* var, const std::string& help) {
    auto* opt =
        sub_->add_option("--" + flag_name(key), *var, help)->capture_default_str();
    dbl_[key] = {opt, var};
  }

  void add(const std::string& key, int* var, const std::string& help) {
    auto* opt =
        sub_->add_option("--" + flag_name(key), *var, help)->capture_default_str();
    int_[key] = {opt, var};
  }

  // Apply the config file to every parameter not already set by a flag.
  void resolve() {
    if (config_path_.empty())
      return;
    for (const auto& [raw_key, value] : load_config(config_path_)) {
      const std::string key = config_name(raw_key);
      if (auto it = dbl_.find(key); it != dbl_.end()) {
        if (it->second.first->count() == 0) {
          *it->second.second = value;
          from_config_.insert(key);
        }
      } else if (auto jt = int_.find(key); jt != int_.end()) {
        if (std::rint(value) != value || std::abs(value) > 1e9)
          throw kgb::ValidationError("BadConfig",
                                     raw_key + " must be an integer");
        if (jt->second.first->count() == 0) {
          *jt->second.second = static_cast<int>(std::rint(value));
          from_config_.insert(key);
        }
      } else {
        throw kgb::ValidationError("UnknownConfigKey", raw_key);
      }
    }
  }

  bool given(const std::string& key) const {
    if (auto it = dbl_.find(key); it != dbl_.end())
      if (it->second.first->count() > 0)
        return true;
    if (auto it = int_.find(key); it != int_.end())
      if (it->second.first->count() > 0)
        return true;
    return from_config_.count(key) > 0;
  }

  void require(std::initializer_list<std::string> keys) const {
    for (const auto& k : keys)
      if (!given(k))
        throw kgb::ValidationError("MissingParameter",
                                   "--" + flag_name(k) + " is required");
  }

  // {"key": {"value": ..., "source": "flag"|"config"|"default"}, ...}
  ordered_json metadata() const {
    std::map<std::string, ordered_json> rows;
    for (const auto& [key, entry] : dbl_)
      rows[key] = {{"value", *entry.second}, {"source", source_of(key)}};
    for (const auto& [key, entry] : int_)
      rows[key] = {{"value", *entry.second}, {"source", source_of(key)}};
    ordered_json j = ordered_json::object();
    for (const auto& [key, row] : rows)
      j[key] = row;
    return j;
  }

private:
  static std::string flag_name(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }
  static std::string config_name(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
  }

  std::string source_of(const std::string& key) const {
    auto count_of = [&]() -> std::size_t {
      if (auto it = dbl_.find(key); it != dbl_.end())
        return it->second.first->count();
      return int_.at(key).first->count();
    };
    if (count_of() > 0)
      return "flag";
    if (from_config_.count(key) > 0)
      return "config";
    return "default";
  }

  static std::map<std::string, double> load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
      throw kgb::ValidationError("CannotRead", path);
    std::stringstream ss;
    ss << f.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        throw kgb::ValidationError("BadConfig", e.what());
      }
      std::map<std::string, double> out;
      for (const auto& [key, value] : j.items()) {
        if (!value.is_number())
          throw kgb::ValidationError("BadConfig", key + ": values must be numbers");
        out[key] = value.get<double>();
      }
      return out;
    }
    return kgb::parse_flat_config(text);
  }

  CLI::App* sub_;
  std::string config_path_;
  std::map<std::string, std::pair<CLI::Option*, double*>> dbl_;
  std::map<std::string, std::pair<CLI::Option*, int*>> int_;
  std::set<std::string> from_config_;
};

void add_coefficient_flags(ParamSet& ps, kgb::ModelCoefficients& c) {
  ps.add("alpha", &c.alpha, "speed parameter of the u equation");
  ps.add("a_uu", &c.a_uu, "u^2 coefficient of f1");
  ps.add("a_uv", &c.a_uv, "u v coefficient of f1 (enters as 2 a_uv u v)");
  ps.add("a_vv", &c.a_vv, "v^2 coefficient of f1");
  ps.add("b_uu", &c.b_uu, "u^2 coefficient of f2");
  ps.add("b_uv", &c.b_uv, "u v coefficient of f2 (enters as 2 b_uv u v)");
  ps.add("b_vv", &c.b_vv, "v^2 coefficient of f2");
}

// c_s^2 = 1 and c_s = 0 are rejected before any solver runs.
void require_regular_speed(double c_s) {
  if (c_s == 0.0)
    throw kgb::ValidationError("Degenerate", "c_s = 0 has no traveling frame");
  if (std::abs(c_s * c_s - 1.0) <= 1e-12)
    throw kgb::ValidationError("SpeedSingular",
                               "c_s^2 = 1 makes the v symbol degenerate");
}

// ---------------------------------------------------------------------------
// snapshot and profile CSV round-trip

void write_state_csv(const fs::path& path, const kgb::EvolutionState& s) {
  kgb::write_csv(path.string(), {"x", "u", "w", "v", "z"},
                 {s.grid->x, s.u.v, s.w.v, s.v.v, s.z.v});
}

double parse_csv_number(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double value = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(value))
    throw kgb::ValidationError("CorruptSnapshot",
                               where + ": bad number '" + tok + "'");
  return value;
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& path,
                                                  const std::string& header,
                                                  std::size_t columns) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw kgb::ValidationError("CannotRead", path.string());
  std::string line;
  if (!std::getline(f, line) || line != header)
    throw kgb::ValidationError("CorruptSnapshot",
                               path.string() + ": expected header '" + header + "'");
  std::vector<std::vector<double>> cols(columns);
  while (std::getline(f, line)) {
    std::stringstream row(line);
    std::string tok;
    std::size_t got = 0;
    while (std::getline(row, tok, ',')) {
      if (got >= columns)
        break;
      cols[got].push_back(parse_csv_number(tok, path.string()));
      ++got;
    }
    if (got != columns || std::getline(row, tok, ','))
      throw kgb::ValidationError("CorruptSnapshot",
                                 path.string() + ": expected " +
                                     std::to_string(columns) + " columns");
  }
  return cols;
}

void require_grid_abscissa(const std::vector<double>& x, kgb::GridPtr g,
                           const std::string& where) {
  if (static_cast<int>(x.size()) != g->N)
    throw kgb::ValidationError("GridMismatch",
                               where + ": " + std::to_string(x.size()) +
                                   " rows for an N=" + std::to_string(g->N) +
                                   " grid");
  const double tol = 1e-9 * std::max(1.0, g->L);
  for (int j = 0; j < g->N; ++j)
    if (std::abs(x[static_cast<size_t>(j)] - g->x[static_cast<size_t>(j)]) > tol)
      throw kgb::ValidationError("GridMismatch",
                                 where + ": x column does not match the grid");
}

kgb::EvolutionState read_state_csv(const fs::path& path, kgb::GridPtr g,
                                   double t) {
  auto cols = read_numeric_csv(path, "x,u,w,v,z", 5);
  require_grid_abscissa(cols[0], g, path.string());
  kgb::EvolutionState s;
  s.grid = g;
  s.u = {g, std::move(cols[1])};
  s.w = {g, std::move(cols[2])};
  s.v = {g, std::move(cols[3])};
  s.z = {g, std::move(cols[4])};
  s.t = t;
  return s;
}

std::pair<kgb::RealField, kgb::RealField> read_profile_csv(const fs::path& path,
                                                           kgb::GridPtr g) {
  auto cols = read_numeric_csv(path, "x,u,v", 3);
  require_grid_abscissa(cols[0], g, path.string());
  return {kgb::RealField{g, std::move(cols[1])},
          kgb::RealField{g, std::move(cols[2])}};
}

// Traveling-wave initial state for u(x - c_s t), v(x - c_s t):
// w = -c_s (u - mean u) (w must be mean-free), z = v_t = -c_s v_x.
kgb::EvolutionState traveling_state(const kgb::RealField& u,
                                    const kgb::RealField& v, double c_s) {
  kgb::EvolutionState s;
  s.grid = u.grid;
  s.u = u;
  s.v = v;
  const double m = kgb::mean(u);
  s.w = kgb::make_field(u.grid);
  for (int j = 0; j < u.grid->N; ++j)
    s.w.v[static_cast<size_t>(j)] = -c_s * (u.v[static_cast<size_t>(j)] - m);
  s.z = kgb::derivative(v, 1);
  for (auto& value : s.z.v)
    value *= -c_s;
  s.t = 0.0;
  return s;
}

double relative_drift(const std::vector<kgb::InvariantSnapshot>& inv,
                      bool energy) {
  if (inv.size() < 2)
    return 0.0;
  const double v0 = energy ? inv.front().E : inv.front().F;
  const double denom = std::max(std::abs(v0), 1e-12);
  double worst = 0.0;
  for (const auto& row : inv)
    worst = std::max(worst, std::abs((energy ? row.E : row.F) - v0));
  return worst / denom;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOpts {
  kgb::ModelCoefficients c;
  double cs = 0.0;
  std::string out;
  std::shared_ptr<ParamSet> params;
};

void run_classify(ClassifyOpts& o) {
  o.params->resolve();
  o.params->require({"cs"});
  o.c.validate();
  const auto report = kgb::classify(o.c, o.cs);
  ordered_json j = region_json(report);
  j["params"] = o.params->metadata();
  std::cout << j.dump(2) << '\n';
  if (!o.out.empty())
    write_json_file(resolve_out(o.out) / "classify.json", j);
}

void setup_classify(CLI::App& app) {
  auto o = std::make_shared<ClassifyOpts>();
  o->c.alpha = 1.0;
  o->c.a_uu = 1.0;
  auto* sub = app.add_subcommand(
      "classify", "linearization regime and predicted wave type at (alpha, c_s)");
  o->params = std::make_shared<ParamSet>(sub);
  add_coefficient_flags(*o->params, o->c);
  o->params->add("cs", &o->cs, "traveling-wave speed c_s");
  sub->add_option("--out", o->out, "also write classify.json into this directory");
  sub->callback([o] { run_classify(*o); });
}

// ---------------------------------------------------------------------------
// solve-wave

struct SolveWaveOpts {
  kgb::ModelCoefficients c;
  double cs = 0.0;
  double L = 60.0;
  int N = 1024;
  double tol = 1e-10;
  int max_iter = 500;
  bool extrapolate = false;
  int window = 5;
  std::string guess = "csw";
  std::string guess_file;
  std::string out = "solve-wave-out";
  std::shared_ptr<ParamSet> params;
};

void run_solve_wave(SolveWaveOpts& o) {
  o.params->resolve();
  o.params->require({"cs"});
  require_regular_speed(o.cs);
  o.c.validate();
  auto grid = kgb::build_grid(o.L, o.N);

  kgb::SolveOptions so;
  so.tol = o.tol;
  so.max_iter = o.max_iter;
  so.extrapolate = o.extrapolate;
  so.extrapolation_window = o.window;
  if (o.guess == "file") {
    if (o.guess_file.empty())
      throw kgb::ValidationError("CustomGuessMissing",
                                 "--guess file requires --guess-file");
    so.custom_guess = read_profile_csv(o.guess_file, grid);
  }

  const auto prof = kgb::solve_wave(o.c, o.cs, grid, so);

  const fs::path dir = resolve_out(o.out);
  kgb::write_csv((dir / "profile.csv").string(), {"x", "u", "v"},
                 {grid->x, prof.u.v, prof.v.v});
  std::vector<double> tn, tM, tres, tchange;
  for (const auto& e : prof.trace) {
    tn.push_back(e.n);
    tM.push_back(e.M);
    tres.push_back(e.res);
    tchange.push_back(e.change);
  }
  kgb::write_csv((dir / "trace.csv").string(), {"n", "M", "res", "change"},
                 {tn, tM, tres, tchange});

  ordered_json j{{"command", "solve-wave"},
                 {"status", to_string(prof.status)},
                 {"iterations", prof.iterations},
                 {"final_res", prof.final_res},
                 {"ripple_sup", prof.ripple_sup},
                 {"c_s", prof.c_s},
                 {"grid", {{"L", o.L}, {"N", o.N}}},
                 {"guess", o.guess},
                 {"coefficients", coefficients_json(o.c)},
                 {"classification", region_json(prof.classified)},
                 {"warnings", prof.warnings},
                 {"params", o.params->metadata()}};
  write_json_file(dir / "run.json", j);
  std::cout << j.dump(2) << '\n';
}

void setup_solve_wave(CLI::App& app) {
  auto o = std::make_shared<SolveWaveOpts>();
  o->c.a_uu = 1.0;
  auto* sub = app.add_subcommand(
      "solve-wave", "iterate the profile system to a traveling-wave solution");
  o->params = std::make_shared<ParamSet>(sub);
  add_coefficient_flags(*o->params, o->c);
  o->params->add("cs", &o->cs, "traveling-wave speed c_s");
  o->params->add("L", &o->L, "half-length of the periodic domain [-L, L)");
  o->params->add("N", &o->N, "grid points (even, >= 8)");
  o->params->add("tol", &o->tol, "residual tolerance");
  o->params->add("max_iter", &o->max_iter, "iteration cap");
  o->params->add("window", &o->window, "extrapolation cycle length");
  sub->add_flag("--extrapolate", o->extrapolate,
                "accelerate with vector extrapolation every window iterations");
  sub->add_option("--guess", o->guess, "initial guess: normal-form or file")
      ->check(CLI::IsMember({"csw", "file"}))
      ->capture_default_str();
  sub->add_option("--guess-file", o->guess_file,
                  "profile.csv (x,u,v) on the same grid for --guess file");
  sub->add_option("--out", o->out, "output directory")->capture_default_str();
  sub->callback([o] { run_solve_wave(*o); });
}

// ---------------------------------------------------------------------------
// oracle: closed-form reference data

struct OracleOpts {
  std::string kind;
  kgb::ModelCoefficients c;
  double cs = 0.0;
  double eps = 0.1;
  double c_kdv = 0.8;
  double t = 0.0;
  int p = 2;
  double L = 60.0;
  int N = 1024;
  std::string out = "oracle-out";
  std::shared_ptr<ParamSet> params;
};

void run_oracle(OracleOpts& o) {
  o.params->resolve();
  const fs::path dir = resolve_out(o.out);
  auto grid = kgb::build_grid(o.L, o.N);
  ordered_json j{{"command", "oracle"}, {"kind", o.kind}};

  if (o.kind == "exact-csw") {
    o.params->require({"cs"});
    const auto ex = kgb::exact_csw_special(o.c.alpha, o.cs, o.c.b_uv, o.c.a_vv);
    auto u = kgb::sample(grid, [&](double x) { return ex.u(x); });
    auto v = kgb::sample(grid, [&](double x) { return ex.v(x); });
    kgb::write_csv((dir / "profile.csv").string(), {"x", "u", "v"},
                   {grid->x, u.v, v.v});
    j["b"] = ex.b;
    j["A1"] = ex.A1;
    j["A2"] = ex.A2;
    j["coefficients"] = coefficients_json(ex.coeffs);
  } else if (o.kind == "kdv-soliton") {
    const auto field = kgb::sample(grid, [&](double x) {
      return kgb::kdv_soliton(o.eps, o.c_kdv, o.c.alpha, o.c.a_uu, x, o.t);
    });
    kgb::write_csv((dir / "profile.csv").string(), {"x", "u"},
                   {grid->x, field.v});
    j["t"] = o.t;
    j["peak"] = o.eps * o.eps * o.c_kdv * 3.0 * o.c.alpha * o.c.alpha / o.c.a_uu;
    j["speed"] = o.c.alpha * (1.0 + o.c_kdv * o.eps * o.eps);
  } else if (o.kind == "imbq-soliton") {
    const auto q =
        kgb::sample(grid, [&](double x) { return kgb::imbq_soliton(o.p, o.cs, x); });
    kgb::write_csv((dir / "profile.csv").string(), {"x", "q"}, {grid->x, q.v});
    j["p"] = o.p;
    j["peak"] = kgb::imbq_soliton(o.p, o.cs, 0.0);
  } else if (o.kind == "kernels") {
    o.params->require({"cs"});
    const auto kp = kgb::green_kernels(o.c, o.cs);
    auto ku = kgb::sample(grid, [&](double x) { return kp.base_u(x); });
    auto kv = kgb::sample(grid, [&](double x) { return kp.base_v(x); });
    kgb::write_csv((dir / "kernels.csv").string(), {"x", "base_u", "base_v"},
                   {grid->x, ku.v, kv.v});
    std::vector<double> su, sv;
    for (double k : grid->k) {
      su.push_back(kp.symbol_u(k));
      sv.push_back(kp.symbol_v(k));
    }
    kgb::write_csv((dir / "symbols.csv").string(), {"k", "symbol_u", "symbol_v"},
                   {grid->k, su, sv});
    j["s"] = kp.s;
    j["r"] = kp.r;
    j["symbol_u_at_0"] = kp.symbol_u(0.0);
    j["symbol_v_at_0"] = kp.symbol_v(0.0);
  } else if (o.kind == "fixed-points") {
    o.params->require({"cs"});
    o.c.validate();
    const auto pts = kgb::constant_fixed_points(o.c, o.cs);
    std::vector<double> X, Y, rdu, rdv, rhu, rhv;
    for (const auto& pt : pts) {
      X.push_back(pt.X);
      Y.push_back(pt.Y);
      rdu.push_back(pt.residual_direct_u);
      rdv.push_back(pt.residual_direct_v);
      rhu.push_back(pt.residual_halved_u);
      rhv.push_back(pt.residual_halved_v);
    }
    kgb::write_csv((dir / "fixed_points.csv").string(),
                   {"X", "Y", "residual_direct_u", "residual_direct_v",
                    "residual_halved_u", "residual_halved_v"},
                   {X, Y, rdu, rdv, rhu, rhv});
    j["count"] = pts.size();
  } else {
    throw kgb::ValidationError("BadOracleKind", o.kind);
  }

  j["params"] = o.params->metadata();
  write_json_file(dir / "oracle.json", j);
  std::cout << j.dump(2) << '\n';
}

void setup_oracle(CLI::App& app) {
  auto o = std::make_shared<OracleOpts>();
  o->c.alpha = 1.0;
  o->c.a_uu = 1.0;
  auto* sub = app.add_subcommand("oracle", "sample closed-form reference data");
  sub->add_option("--kind", o->kind, "which closed form to sample")
      ->required()
      ->check(CLI::IsMember(
          {"exact-csw", "kdv-soliton", "imbq-soliton", "kernels", "fixed-points"}));
  o->params = std::make_shared<ParamSet>(sub);
  add_coefficient_flags(*o->params, o->c);
  o->params->add("cs", &o->cs, "traveling-wave speed c_s");
  o->params->add("eps", &o->eps, "long-wave amplitude parameter");
  o->params->add("c", &o->c_kdv, "KdV frame speed");
  o->params->add("t", &o->t, "sample time for kdv-soliton");
  o->params->add("p", &o->p, "nonlinearity power for imbq-soliton");
  o->params->add("L", &o->L, "half-length of the sampling grid");
  o->params->add("N", &o->N, "grid points");
  sub->add_option("--out", o->out, "output directory")->capture_default_str();
  sub->callback([o] { run_oracle(*o); });
}

// ---------------------------------------------------------------------------
// evolve

struct EvolveOpts {
  kgb::ModelCoefficients c;
  double cs = 0.0;
  double eps = 0.1;
  double c_kdv = 0.8;
  double L = 60.0;
  int N = 1024;
  double T = 10.0;
  double dt = 0.0;
  int stride = 10;
  double beta = std::numeric_limits<double>::quiet_NaN();
  double t0 = 1.0;
  double amplitude_limit = 1e8;
  bool no_snapshots = false;
  std::string initial = "exact-csw";
  std::string initial_file;
  std::string out = "evolve-out";
  std::shared_ptr<ParamSet> params;
};

void run_evolve(EvolveOpts& o) {
  o.params->resolve();
  auto grid = kgb::build_grid(o.L, o.N);

  kgb::EvolutionState state;
  ordered_json initial_meta{{"kind", o.initial}};
  if (o.initial == "exact-csw") {
    o.params->require({"alpha", "cs"});
    for (const char* key : {"a_uu", "a_uv", "b_uu", "b_vv"})
      if (o.params->given(key))
        throw kgb::ValidationError(
            "CoefficientsDerived",
            std::string("--initial exact-csw derives a_uu and zeroes a_uv, "
                        "b_uu, b_vv; remove --") +
                key);
    const auto ex = kgb::exact_csw_special(o.c.alpha, o.cs, o.c.b_uv, o.c.a_vv);
    o.c = ex.coeffs;
    auto u = kgb::sample(grid, [&](double x) { return ex.u(x); });
    auto v = kgb::sample(grid, [&](double x) { return ex.v(x); });
    state = traveling_state(u, v, o.cs);
    initial_meta["c_s"] = o.cs;
    initial_meta["A1"] = ex.A1;
    initial_meta["A2"] = ex.A2;
  } else if (o.initial == "kdv") {
    o.params->require({"alpha", "eps", "c"});
    o.c.validate();
    const auto data =
        kgb::build_initial_data(o.eps, o.c_kdv, o.c.alpha, o.c.a_uu, grid);
    state = kgb::to_first_order(data.u0, data.u1, data.v0, data.v1);
    initial_meta["eps"] = o.eps;
    initial_meta["c"] = o.c_kdv;
  } else if (o.initial == "file") {
    if (o.initial_file.empty())
      throw kgb::ValidationError("MissingParameter",
                                 "--initial file requires --initial-file");
    o.c.validate();
    state = read_state_csv(o.initial_file, grid, 0.0);
    initial_meta["file"] = o.initial_file;
  } else {
    throw kgb::ValidationError("BadInitialKind", o.initial);
  }

  kgb::EvolveConfig cfg;
  cfg.coeffs = o.c;
  cfg.T = o.T;
  cfg.dt = o.dt;
  cfg.monitor_stride = o.stride;
  if (!std::isnan(o.beta))
    cfg.beta = o.beta;
  cfg.t0 = o.t0;
  cfg.amplitude_limit = o.amplitude_limit;
  cfg.keep_snapshots = !o.no_snapshots;

  const auto res = kgb::evolve(state, cfg);

  const fs::path dir = resolve_out(o.out);
  ordered_json snaps = ordered_json::array();
  for (std::size_t i = 0; i < res.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05zu.csv", i);
    write_state_csv(dir / name, res.snapshots[i]);
    snaps.push_back({{"file", name}, {"t", res.snapshots[i].t}});
  }
  write_state_csv(dir / "final.csv", res.final_state);

  std::vector<double> it, iE, iF;
  for (const auto& row : res.invariants) {
    it.push_back(row.t);
    iE.push_back(row.E);
    iF.push_back(row.F);
  }
  kgb::write_csv((dir / "invariants.csv").string(), {"t", "E", "F"}, {it, iE, iF});

  std::vector<double> bt, bI, bI1, bdI;
  for (const auto& row : res.monitor.series) {
    bt.push_back(row.t);
    bI.push_back(row.I);
    bI1.push_back(row.I1);
    bdI.push_back(row.dI);
  }
  kgb::write_csv((dir / "blowup.csv").string(), {"t", "I", "I1", "dI"},
                 {bt, bI, bI1, bdI});

  ordered_json j{{"command", "evolve"},
                 {"status", to_string(res.status)},
                 {"stop_reason", res.stop_reason},
                 {"T", o.T},
                 {"dt_used", res.dt_used},
                 {"steps_taken", res.steps_taken},
                 {"grid", {{"L", o.L}, {"N", o.N}}},
                 {"coefficients", coefficients_json(o.c)},
                 {"initial", initial_meta},
                 {"hamiltonian", res.hamiltonian},
                 {"energy_drift_rel", relative_drift(res.invariants, true)},
                 {"momentum_drift_rel", relative_drift(res.invariants, false)},
                 {"boundary_sup", res.boundary_sup},
                 {"monitor",
                  {{"enabled", res.monitor.enabled},
                   {"beta", res.monitor.beta},
                   {"t0", res.monitor.t0}}},
                 {"snapshots", snaps},
                 {"params", o.params->metadata()}};
  write_json_file(dir / "run.json", j);
  std::cout << j.dump(2) << '\n';
}

void setup_evolve(CLI::App& app) {
  auto o = std::make_shared<EvolveOpts>();
  auto* sub = app.add_subcommand(
      "evolve", "integrate the first-order system with invariants and "
                "blow-up monitoring");
  o->params = std::make_shared<ParamSet>(sub);
  add_coefficient_flags(*o->params, o->c);
  o->params->add("cs", &o->cs, "profile speed for --initial exact-csw");
  o->params->add("eps", &o->eps, "amplitude parameter for --initial kdv");
  o->params->add("c", &o->c_kdv, "frame speed for --initial kdv");
  o->params->add("L", &o->L, "half-length of the periodic domain [-L, L)");
  o->params->add("N", &o->N, "grid points (even, >= 8)");
  o->params->add("T", &o->T, "final time");
  o->params->add("dt", &o->dt, "time step (<= 0 picks the stability default)");
  o->params->add("stride", &o->stride, "steps between monitor samples");
  o->params->add("beta", &o->beta,
                 "blow-up functional weight (default: max(0, -E(0)))");
  o->params->add("t0", &o->t0, "blow-up functional time shift");
  o->params->add("amplitude_limit", &o->amplitude_limit,
                 "sup-norm threshold for BlowupSuspected");
  sub->add_flag("--no-snapshots", o->no_snapshots, "keep only the final state");
  sub->add_option("--initial", o->initial, "initial data: exact-csw, kdv, or file")
      ->check(CLI::IsMember({"exact-csw", "kdv", "file"}))
      ->capture_default_str();
  sub->add_option("--initial-file", o->initial_file,
                  "snapshot CSV (x,u,w,v,z) for --initial file");
  sub->add_option("--out", o->out, "output directory")->capture_default_str();
  sub->callback([o] { run_evolve(*o); });
}

// ---------------------------------------------------------------------------
// check-invariants

struct CheckOpts {
  std::string run_dir;
  double budget = 1e-6;
};

double meta_number(const ordered_json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number())
    throw kgb::ValidationError("BadRunMetadata",
                               std::string("missing numeric field ") + key);
  return j[key].get<double>();
}

void run_check(CheckOpts& o) {
  const fs::path dir(o.run_dir);
  std::ifstream f(dir / "run.json", std::ios::binary);
  if (!f)
    throw kgb::ValidationError("CannotRead", (dir / "run.json").string());
  ordered_json meta;
  try {
    meta = ordered_json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw kgb::ValidationError("BadRunMetadata", e.what());
  }
  if (meta.value("command", std::string{}) != "evolve")
    throw kgb::ValidationError("WrongRunKind",
                               "check-invariants needs an evolve run directory");

  const auto& cj = meta.at("coefficients");
  kgb::ModelCoefficients c;
  c.alpha = meta_number(cj, "alpha");
  c.a_uu = meta_number(cj, "a_uu");
  c.a_uv = meta_number(cj, "a_uv");
  c.a_vv = meta_number(cj, "a_vv");
  c.b_uu = meta_number(cj, "b_uu");
  c.b_uv = meta_number(cj, "b_uv");
  c.b_vv = meta_number(cj, "b_vv");
  auto grid = kgb::build_grid(meta_number(meta.at("grid"), "L"),
                              static_cast<int>(meta_number(meta.at("grid"), "N")));

  if (!meta.contains("snapshots") || !meta["snapshots"].is_array() ||
      meta["snapshots"].size() < 2)
    throw kgb::ValidationError("TooFewSnapshots",
                               "need at least two stored snapshots to measure drift");

  const auto structure = kgb::hamiltonian_structure(c);
  // Without the pairing the quadratic-cubic functional is still well defined
  // with the formal choices B = b_uu, C = b_uv; it is reported, not judged.
  kgb::HamiltonianStructure formal;
  formal.B_ham = c.b_uu;
  formal.C_ham = c.b_uv;
  const kgb::HamiltonianStructure used = structure ? *structure : formal;

  std::vector<kgb::InvariantSnapshot> inv;
  for (const auto& entry : meta["snapshots"]) {
    const std::string file = entry.value("file", std::string{});
    if (file.empty() || !entry.contains("t") || !entry["t"].is_number())
      throw kgb::ValidationError("BadRunMetadata", "malformed snapshot entry");
    const auto s =
        read_state_csv(dir / file, grid, entry["t"].get<double>());
    kgb::InvariantSnapshot row;
    row.t = s.t;
    row.E = kgb::energy(c, used, s);
    row.F = kgb::momentum(s);
    inv.push_back(row);
  }

  const double e_drift = relative_drift(inv, true);
  const double f_drift = relative_drift(inv, false);
  std::string verdict;
  if (!structure)
    verdict = "not-judged";
  else
    verdict = (e_drift <= o.budget && f_drift <= o.budget) ? "pass" : "fail";

  ordered_json j{{"command", "check-invariants"},
                 {"run_dir", o.run_dir},
                 {"hamiltonian", static_cast<bool>(structure)},
                 {"budget", o.budget},
                 {"snapshots", inv.size()},
                 {"energy0", inv.front().E},
                 {"momentum0", inv.front().F},
                 {"energy_drift_rel", e_drift},
                 {"momentum_drift_rel", f_drift},
                 {"verdict", verdict}};
  if (!structure)
    j["note"] = "E not guaranteed conserved; drift reported, not judged";
  write_json_file(dir / "check.json", j);
  std::cout << j.dump(2) << '\n';
}

void setup_check(CLI::App& app) {
  auto o = std::make_shared<CheckOpts>();
  auto* sub = app.add_subcommand(
      "check-invariants",
      "recompute E and F drifts from an evolve run's stored snapshots");
  sub->add_option("run-dir", o->run_dir, "evolve output directory")->required();
  sub->add_option("--budget", o->budget, "relative drift budget")
      ->capture_default_str();
  sub->callback([o] { run_check(*o); });
}

// ---------------------------------------------------------------------------
// kdv-error

struct KdvErrorOpts {
  std::string eps_list = "0.1,0.075,0.05";
  double T = 100.0;
  double c = 0.8;
  double dt = 0.01;
  kgb::ModelCoefficients coeffs;
  int N = 4096;
  int stride = 25;
  int jobs = 1;
  std::string out = "kdv-error-out";
  std::shared_ptr<ParamSet> params;
};

std::vector<double> parse_eps_list(const std::string& text) {
  std::vector<double> eps;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto a = tok.find_first_not_of(" \t");
    const auto b = tok.find_last_not_of(" \t");
    if (a == std::string::npos)
      throw kgb::ValidationError("BadEpsilon", "empty entry in --eps-list");
    tok = tok.substr(a, b - a + 1);
    char* end = nullptr;
    const double value = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !(value > 0.0))
      throw kgb::ValidationError("BadEpsilon", tok);
    eps.push_back(value);
  }
  if (eps.empty())
    throw kgb::ValidationError("BadEpsilon", "--eps-list is empty");
  return eps;
}

void run_kdv_error(KdvErrorOpts& o) {
  o.params->resolve();
  o.coeffs.validate();
  if (!(o.T > 0.0) || !(o.dt > 0.0))
    throw kgb::ValidationError("NonPositiveDt", "T and dt must be positive");
  if (o.jobs < 1)
    throw kgb::ValidationError("BadJobs", "--jobs must be >= 1");
  const auto eps = parse_eps_list(o.eps_list);

  struct EpsRun {
    double L = 0.0;
    double dt_used = 0.0;
    int steps = 0;
    std::vector<kgb::KdvErrorRow> rows;
  };
  std::vector<EpsRun> runs(eps.size());
  std::vector<std::exception_ptr> errors(eps.size());

  auto run_one = [&](std::size_t i) {
    const double e = eps[i];
    EpsRun r;
    // domain wide enough for the crest to travel T at speed ~alpha and for
    // the eps-wide profile to decay: L = alpha T + 40/eps
    r.L = o.coeffs.alpha * o.T + 40.0 / e;
    auto grid = kgb::build_grid(r.L, o.N);
    const auto data =
        kgb::build_initial_data(e, o.c, o.coeffs.alpha, o.coeffs.a_uu, grid);
    const auto state = kgb::to_first_order(data.u0, data.u1, data.v0, data.v1);
    kgb::EvolveConfig cfg;
    cfg.coeffs = o.coeffs;
    cfg.T = o.T;
    cfg.dt = o.dt;
    cfg.monitor_stride = o.stride;
    cfg.keep_snapshots = true;
    const auto res = kgb::evolve(state, cfg);
    if (res.status != kgb::RunStatus::Completed)
      throw kgb::NumericalError("KdvRunAborted", "eps=" + kgb::format_g17(e) +
                                                     ": " + res.stop_reason);
    r.dt_used = res.dt_used;
    r.steps = res.steps_taken;
    r.rows =
        kgb::measure_error(res.snapshots, e, o.c, o.coeffs.alpha, o.coeffs.a_uu);
    runs[i] = std::move(r);
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(o.jobs), eps.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < eps.size(); ++i) {
      try {
        run_one(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < eps.size();) {
        try {
          run_one(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back(worker);
    for (auto& th : pool)
      th.join();
  }
  for (const auto& err : errors)
    if (err)
      std::rethrow_exception(err);

  std::vector<kgb::KdvErrorRow> all_rows;
  for (const auto& r : runs)
    all_rows.insert(all_rows.end(), r.rows.begin(), r.rows.end());
  const auto fit = kgb::fit_exponent(all_rows);

  const fs::path dir = resolve_out(o.out);
  std::vector<double> ce, ct, cu, cv;
  for (const auto& row : all_rows) {
    ce.push_back(row.epsilon);
    ct.push_back(row.t);
    cu.push_back(row.sup_error_u);
    cv.push_back(row.sup_error_v);
  }
  kgb::write_csv((dir / "errors.csv").string(),
                 {"epsilon", "t", "sup_error_u", "sup_error_v"},
                 {ce, ct, cu, cv});

  // bounded-in-time: the max is attained in the first half, or the second
  // half exceeds the first by less than 20%
  ordered_json groups = ordered_json::array();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double m1 = 0.0, m2 = 0.0, mall = 0.0, arg = 0.0;
    double mu = 0.0, mv = 0.0;
    for (const auto& row : runs[i].rows) {
      const double err = std::max(row.sup_error_u, row.sup_error_v);
      if (row.t <= o.T / 2)
        m1 = std::max(m1, err);
      else
        m2 = std::max(m2, err);
      if (err > mall) {
        mall = err;
        arg = row.t;
      }
      mu = std::max(mu, row.sup_error_u);
      mv = std::max(mv, row.sup_error_v);
    }
    groups.push_back({{"epsilon", eps[i]},
                      {"L", runs[i].L},
                      {"dt_used", runs[i].dt_used},
                      {"steps", runs[i].steps},
                      {"max_sup_error", mall},
                      {"max_sup_error_u", mu},
                      {"max_sup_error_v", mv},
                      {"argmax_t", arg},
                      {"bounded", m2 <= 1.2 * m1}});
  }

  ordered_json fit_json{{"slope", fit.slope},
                        {"intercept", fit.intercept},
                        {"r2", fit.r2},
                        {"groups", groups}};
  write_json_file(dir / "fit.json", fit_json);

  ordered_json j{{"command", "kdv-error"},
                 {"eps", eps},
                 {"T", o.T},
                 {"c", o.c},
                 {"N", o.N},
                 {"coefficients", coefficients_json(o.coeffs)},
                 {"fit", fit_json},
                 {"params", o.params->metadata()}};
  write_json_file(dir / "run.json", j);
  std::cout << j.dump(2) << '\n';
}

void setup_kdv_error(CLI::App& app) {
  auto o = std::make_shared<KdvErrorOpts>();
  o->coeffs.alpha = 1.0;
  o->coeffs.a_uu = o->coeffs.a_uv = o->coeffs.a_vv = 1.0;
  o->coeffs.b_uu = o->coeffs.b_uv = o->coeffs.b_vv = 1.0;
  auto* sub = app.add_subcommand(
      "kdv-error", "long-wave error scaling against the KdV approximation");
  o->params = std::make_shared<ParamSet>(sub);
  sub->add_option("--eps-list", o->eps_list, "comma-separated amplitudes")
      ->capture_default_str();
  add_coefficient_flags(*o->params, o->coeffs);
  o->params->add("T", &o->T, "final time");
  o->params->add("c", &o->c, "KdV frame speed");
  o->params->add("dt", &o->dt, "time step");
  o->params->add("N", &o->N, "grid points per run");
  o->params->add("stride", &o->stride, "steps between error samples");
  o->params->add("jobs", &o->jobs, "parallel runs (one per epsilon)");
  sub->add_option("--out", o->out, "output directory")->capture_default_str();
  sub->callback([o] { run_kdv_error(*o); });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral workbench for the coupled Klein-Gordon--Boussinesq "
               "system"};
  app.require_subcommand(1);
  setup_classify(app);
  setup_solve_wave(app);
  setup_oracle(app);
  setup_evolve(app);
  setup_check(app);
  setup_kdv_error(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0)
      return app.exit(e); // --help / --version
    ordered_json j{{"error",
                    {{"kind", "usage"}, {"code", e.get_name()}, {"detail", e.what()}}}};
    std::cout << j.dump(2) << '\n';
    return 2;
  } catch (const kgb::ValidationError& e) {
    ordered_json j{{"error",
                    {{"kind", "validation"}, {"code", e.code()}, {"detail", e.what()}}}};
    std::cout << j.dump(2) << '\n';
    return 2;
  } catch (const kgb::NumericalError& e) {
    ordered_json j{{"error",
                    {{"kind", "numerical"}, {"code", e.code()}, {"detail", e.what()}}}};
    std::cout << j.dump(2) << '\n';
    return 3;
  }
  return 0;
}
