#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdp/analytics.hpp"
#include "hdp/parallel.hpp"
#include "hdp/skew.hpp"
#include "hdp/solutions.hpp"
#include "hdp/stats.hpp"
#include "hdp/verify.hpp"

namespace hdp {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;
constexpr std::uint64_t kDefaultSeed = 20231109;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string subcommand;
  ModelParams model;
  double t_end = 1.0;
  std::size_t steps = 1000;
  std::size_t paths = 1;
  std::uint64_t seed = kDefaultSeed;
  std::string seed_source = "default";
  std::string out = "hdp_out";
  std::string format = "csv";
  unsigned workers = 0;

  std::string family = "benchmark";
  std::string scheme = "exact";
  double nm_A = 1.0;
  double nm_level = 1.0;
  std::string suite;
  std::string which;
  std::string points;
  double eps = 0.1;
  double h = 1e-5;
  double horizon = 0.0;  // 0: same as t_end
  std::string terminal_from = "forward-sim";
  std::string method = "sde";
  double y_terminal = NAN;
  double z_terminal = NAN;
};

json config_json(const RunConfig& c) {
  json j;
  j["alpha"] = c.model.alpha;
  j["theta"] = c.model.theta;
  j["x0"] = c.model.x0;
  j["t_end"] = c.t_end;
  j["steps"] = c.steps;
  j["paths"] = c.paths;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["format"] = c.format;
  j["workers"] = c.workers;
  if (c.subcommand == "simulate") {
    j["family"] = c.family;
    j["scheme"] = c.scheme;
    j["A"] = c.nm_A;
    j["level"] = c.nm_level;
  } else if (c.subcommand == "verify") {
    j["suite"] = c.suite;
  } else if (c.subcommand == "density") {
    j["which"] = c.which;
    j["points"] = c.points;
  } else if (c.subcommand == "exit-prob") {
    j["eps"] = c.eps;
    j["dt"] = c.h;
  } else if (c.subcommand == "reverse") {
    j["horizon"] = c.horizon;
    j["terminal_from"] = c.terminal_from;
    j["method"] = c.method;
    if (c.terminal_from == "explicit") {
      j["y_terminal"] = c.y_terminal;
      j["z_terminal"] = c.z_terminal;
    }
  }
  return j;
}

// Tabular output in either format. Missing cells stay empty in CSV and null in JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<std::string> notes;  // optional trailing text column
  std::string notes_column;
};

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// Files written so far; removed again if the command fails.
class OutputSet {
public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  fs::path open(const std::string& name, std::ofstream& stream) {
    fs::create_directories(dir_);
    const fs::path p = dir_ / name;
    written_.push_back(p);
    stream.open(p, std::ios::binary | std::ios::trunc);
    if (!stream) throw std::runtime_error("cannot write " + p.string());
    return p;
  }

  void write_table(const std::string& stem, const std::string& format, const Table& t) {
    std::ofstream os;
    if (format == "csv") {
      open(stem + ".csv", os);
      for (std::size_t c = 0; c < t.columns.size(); ++c) os << (c ? "," : "") << t.columns[c];
      if (!t.notes_column.empty()) os << "," << t.notes_column;
      os << "\n";
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t c = 0; c < t.rows[r].size(); ++c) os << (c ? "," : "") << csv_cell(t.rows[r][c]);
        if (!t.notes_column.empty()) os << "," << t.notes[r];
        os << "\n";
      }
    } else {
      open(stem + ".json", os);
      json j;
      j["schema_version"] = kSchemaVersion;
      auto cols = t.columns;
      if (!t.notes_column.empty()) cols.push_back(t.notes_column);
      j["columns"] = cols;
      j["rows"] = json::array();
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        json row = json::array();
        for (const auto& v : t.rows[r]) row.push_back(v ? json(*v) : json(nullptr));
        if (!t.notes_column.empty()) row.push_back(t.notes[r]);
        j["rows"].push_back(std::move(row));
      }
      os << j.dump(1) << "\n";
    }
    if (!os) throw std::runtime_error("write failed in " + dir_.string());
  }

  void write_json(const std::string& name, const json& j) {
    std::ofstream os;
    open(name, os);
    os << j.dump(2) << "\n";
    if (!os) throw std::runtime_error("write failed in " + dir_.string());
  }

  std::vector<std::string> names() const {
    std::vector<std::string> n;
    for (const auto& p : written_) n.push_back(p.filename().string());
    return n;
  }

  void remove_all() noexcept {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

json manifest(const RunConfig& c, const std::vector<std::string>& outputs) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["tool"] = "hdp_lab";
  m["subcommand"] = c.subcommand;
  m["config"] = config_json(c);
  m["seeds"] = {{"master_seed", c.seed},
                {"source", c.seed_source},
                {"streams", "path i draws from stream (master_seed, i)"}};
  m["outputs"] = outputs;
  return m;
}

void finish(OutputSet& files, const RunConfig& c, json extra = json::object()) {
  auto m = manifest(c, files.names());
  for (auto& [k, v] : extra.items()) m[k] = v;
  files.write_json("manifest.json", m);
}

void validate_common(const RunConfig& c) {
  validate(c.model);
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw ConfigError("--t-end must be positive");
  if (c.steps == 0) throw ConfigError("--steps must be at least 1");
  if (c.paths == 0) throw ConfigError("--paths must be at least 1");
}

// simulate --------------------------------------------------------------

struct SimRow {
  std::vector<double> B, B_theta, L, X;
};

int cmd_simulate(const RunConfig& c, OutputSet& files, std::ostream& out) {
  validate_common(c);
  const TimeGrid grid(c.t_end, c.steps);
  const SkewScheme scheme = skew_scheme_from_string(c.scheme);
  const NonMarkovParams nm{c.nm_A, c.nm_level};
  const bool skew_family = c.family == "skew";
  if (!skew_family && c.family != "benchmark" && c.family != "stopped" &&
      c.family != "nonmarkov" && c.family != "reflected")
    throw ConfigError("unknown family '" + c.family + "'");
  if (c.family == "reflected" && c.model.x0 < 0.0)
    throw ConfigError("reflected family needs --x0 >= 0");

  bool non_solution = false;
  const auto rows = parallel_map(c.paths, c.workers, [&](std::size_t i) {
    const SeedSpec seed{c.seed, i};
    SimRow r;
    auto copy = [](const Path& p) { return std::vector<double>(p.values().begin(), p.values().end()); };
    if (skew_family) {
      const auto coupled =
          simulate_skew_pair(c.model.theta, skew_start(c.model.alpha, c.model.x0), grid, seed, scheme);
      const auto sol = skew_solution(c.model, coupled);
      r.B = copy(coupled.driver_B);
      r.B_theta = copy(coupled.skew_B);
      r.L = copy(coupled.local_time_L);
      r.X = copy(sol.X);
      return r;
    }
    const Path b = sample_brownian(grid, seed);
    r.B = copy(b);
    if (c.family == "benchmark") r.X = copy(benchmark_solution(c.model, b));
    else if (c.family == "stopped") r.X = copy(stopped_solution(c.model, b));
    else if (c.family == "nonmarkov") r.X = copy(nonmarkov_solution(c.model, nm, b));
    else r.X = copy(reflected_solution_explicit(c.model.alpha, c.model.x0, b));
    return r;
  });
  if (skew_family) non_solution = is_known_non_solution(c.model);

  Table t;
  t.columns = {"path_id", "t", "B", "B_theta", "L", "X"};
  const auto times = grid.times();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t k = 0; k < times.size(); ++k) {
      auto opt = [&](const std::vector<double>& v) {
        return v.empty() ? std::optional<double>() : std::optional<double>(v[k]);
      };
      t.rows.push_back({static_cast<double>(i), times[k], r.B[k], opt(r.B_theta), opt(r.L), r.X[k]});
    }
  }
  files.write_table("paths", c.format, t);
  json extra;
  extra["family"] = c.family;
  extra["non_solution_flag"] = non_solution;
  if (skew_family) extra["skew_scheme"] = to_string(scheme);
  finish(files, c, extra);
  out << "wrote " << rows.size() << " paths of " << grid.n_nodes() << " nodes to " << c.out << "\n";
  if (non_solution) out << "note: alpha <= 0 with theta != 0 does not solve the equation\n";
  return 0;
}

// verify ----------------------------------------------------------------

json report_json(const VerificationReport& r) {
  json j;
  j["check_name"] = r.check_name;
  j["measured"] = r.measured;
  j["reference"] = r.reference;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  j["metadata"] = r.metadata;
  return j;
}

int cmd_verify(const RunConfig& c, OutputSet& files, std::ostream& out) {
  if (!is_suite(c.suite)) throw ConfigError("unknown suite '" + c.suite + "'");
  const auto reports = run_suite(c.suite, VerifyOptions{c.seed, c.workers});
  json arr = json::array();
  for (const auto& r : reports) {
    arr.push_back(report_json(r));
    out << (r.pass ? "PASS " : "FAIL ") << r.check_name << "  measured=" << format_double(r.measured)
        << " reference=" << format_double(r.reference) << "\n";
  }
  files.write_json("verify_" + c.suite + ".json", arr);
  const bool ok = all_pass(reports);
  finish(files, c, {{"all_pass", ok}});
  return ok ? 0 : 1;
}

// density ---------------------------------------------------------------

std::vector<std::vector<double>> read_points(const std::string& file, std::size_t arity) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read points file '" + file + "'");
  std::vector<std::vector<double>> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t", used) != std::string::npos) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric && line_no == 1 && pts.empty()) continue;  // header
    if (!numeric || row.size() != arity)
      throw ConfigError("points file line " + std::to_string(line_no) + ": expected " +
                        std::to_string(arity) + " numbers");
    pts.push_back(std::move(row));
  }
  return pts;
}

int cmd_density(const RunConfig& c, OutputSet& files, std::ostream& out) {
  require_theta(c.model.theta);
  if (!(c.t_end > 0.0)) throw ConfigError("--t-end must be positive");
  Table t;
  std::size_t arity;
  if (c.which == "skew") {
    t.columns = {"b", "density"};
    arity = 1;
  } else if (c.which == "joint-bl") {
    t.columns = {"b", "l", "density"};
    arity = 2;
  } else if (c.which == "joint-yb") {
    if (c.model.theta == 0.0) throw ConfigError("joint-yb needs theta != 0");
    t.columns = {"y", "z", "density"};
    arity = 2;
  } else {
    throw ConfigError("--which must be skew, joint-bl or joint-yb");
  }
  if (c.points.empty()) throw ConfigError("--points is required");
  const auto pts = read_points(c.points, arity);
  t.notes_column = "status";

  const double th = c.model.theta, time = c.t_end;
  std::size_t rejected = 0;
  for (const auto& p : pts) {
    std::optional<double> value;
    std::string status = "ok";
    try {
      if (c.which == "skew") {
        value = skew_density(th, time, p[0]);
      } else if (c.which == "joint-bl") {
        if (!(p[1] > 0.0)) throw std::invalid_argument("l must be positive");
        value = joint_density_BL(th, time, c.model.x0, p[0], p[1]);
      } else if (!in_yb_support(th, p[0], p[1])) {
        value = 0.0;
        status = "outside support";
      } else {
        value = joint_density_YB(th, time, p[0], p[1]);
      }
    } catch (const std::invalid_argument& e) {
      status = std::string("error: ") + e.what();
    }
    if (status != "ok") ++rejected;
    std::vector<std::optional<double>> row(p.begin(), p.end());
    row.push_back(value);
    t.rows.push_back(std::move(row));
    t.notes.push_back(status);
  }
  files.write_table("density_" + c.which, c.format, t);
  finish(files, c, {{"rejected_rows", rejected}});
  out << "evaluated " << pts.size() << " points, " << rejected << " rejected\n";
  return rejected ? 1 : 0;
}

// msd / exit-prob -------------------------------------------------------

int cmd_msd(const RunConfig& c, OutputSet& files, std::ostream& out) {
  validate(c.model);
  Table t;
  t.columns = {"alpha", "theta", "t", "msd", "msd_quadrature"};
  const double v = msd(c.model.alpha, c.model.theta, c.t_end);
  const double q = msd_quadrature(c.model.alpha, c.model.theta, c.t_end);
  t.rows.push_back({c.model.alpha, c.model.theta, c.t_end, v, q});
  files.write_table("msd", c.format, t);
  finish(files, c);
  out << "msd=" << format_double(v) << " quadrature=" << format_double(q) << "\n";
  return 0;
}

int cmd_exit_prob(const RunConfig& c, OutputSet& files, std::ostream& out) {
  require_theta(c.model.theta);
  if (c.paths < 2) throw ConfigError("--paths must be at least 2");
  const auto res = exit_probability(c.model.theta, c.eps, c.paths, c.h, c.seed, c.workers);
  Table t;
  t.columns = {"theta", "eps", "h", "n_paths", "estimate", "std_error", "beta_plus"};
  t.rows.push_back({c.model.theta, c.eps, c.h, static_cast<double>(c.paths), res.estimate.value,
                    res.estimate.std_error, 0.5 * (1.0 + c.model.theta)});
  files.write_table("exit_prob", c.format, t);
  finish(files, c, {{"coarse_mesh_warning", res.coarse_mesh_warning}});
  out << "p_plus=" << format_double(res.estimate.value) << " se=" << format_double(res.estimate.std_error)
      << "\n";
  if (res.coarse_mesh_warning) out << "warning: h > eps^2/100, exits may be missed\n";
  return 0;
}

// reverse ---------------------------------------------------------------

int cmd_reverse(const RunConfig& c, OutputSet& files, std::ostream& out) {
  validate_common(c);
  const double th = c.model.theta;
  if (th == 0.0) throw ConfigError("reverse needs theta != 0");
  const double T = c.horizon > 0.0 ? c.horizon : c.t_end;
  if (c.t_end > T) throw ConfigError("--t-end must not exceed --horizon");
  if (c.terminal_from != "forward-sim" && c.terminal_from != "explicit")
    throw ConfigError("--terminal-from must be forward-sim or explicit");
  if (c.method != "sde" && c.method != "bessel") throw ConfigError("--method must be sde or bessel");
  const bool reflected = std::abs(th) == 1.0;
  const double mirror = th < 0.0 && reflected ? -1.0 : 1.0;
  if (c.terminal_from == "explicit") {
    if (!std::isfinite(c.y_terminal) || !std::isfinite(c.z_terminal))
      throw ConfigError("explicit terminal needs --y-terminal and --z-terminal");
    if (reflected ? !(mirror * c.y_terminal > 0.0) : !in_yb_support(th, c.y_terminal, c.z_terminal))
      throw ConfigError("terminal point lies outside the support");
  }
  const TimeGrid grid(c.t_end, c.steps);

  const auto pairs = parallel_map(c.paths, c.workers, [&](std::size_t i) {
    const SeedSpec seed{c.seed, i};
    auto [y, z] = c.terminal_from == "explicit" ? std::pair{c.y_terminal, c.z_terminal}
                                                : sample_forward_terminal(th, T, seed);
    if (reflected) {
      const auto r = simulate_reversed_reflected(T, mirror * y, mirror * z, grid, seed.substream(1));
      if (mirror > 0.0) return r;
      auto neg = [&](const Path& p) {
        std::vector<double> v(p.values().begin(), p.values().end());
        for (double& x : v) x = -x;
        return Path(p.grid(), std::move(v));
      };
      return ReversedPair{neg(r.Y), neg(r.B), r.wedge_reflections};
    }
    return c.method == "sde" ? simulate_reversed_pair(th, T, y, z, grid, seed.substream(1))
                             : simulate_reversed_bessel(th, T, y, z, grid, seed.substream(1));
  });

  Table t;
  t.columns = {"path_id", "s", "Y", "B"};
  std::size_t reflections = 0;
  const auto times = grid.times();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    reflections += pairs[i].wedge_reflections;
    for (std::size_t k = 0; k < times.size(); ++k)
      t.rows.push_back({static_cast<double>(i), times[k], pairs[i].Y[k], pairs[i].B[k]});
  }
  files.write_table("reversed", c.format, t);
  json extra;
  extra["horizon"] = T;
  extra["dynamics"] = reflected ? "reflected" : c.method;
  extra["wedge_reflections"] = reflections;
  finish(files, c, extra);
  out << "wrote " << pairs.size() << " reversed paths to " << c.out << "\n";
  return 0;
}

void add_shared(CLI::App& app, RunConfig& c) {
  app.add_option("--alpha", c.model.alpha, "Exponent alpha in (-1, 1)")->capture_default_str();
  app.add_option("--theta", c.model.theta, "Skewness theta in [-1, 1]")->capture_default_str();
  app.add_option("--x0", c.model.x0, "Initial value")->capture_default_str();
  app.add_option("--t-end", c.t_end, "Time horizon of the grid")->capture_default_str();
  app.add_option("--steps", c.steps, "Number of grid steps")->capture_default_str();
  app.add_option("--paths", c.paths, "Ensemble size")->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed (falls back to HDP_LAB_SEED)");
  app.add_option("--out", c.out, "Output directory")->capture_default_str();
  app.add_option("--format", c.format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads, 0 for all cores")->capture_default_str();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Simulation and verification lab for dX = |X|^alpha o dB", "hdp_lab"};
  app.set_config("--config", "", "Configuration file with key = value lines");
  app.require_subcommand(1, 1);
  app.fallthrough();
  add_shared(app, c);

  auto* sim = app.add_subcommand("simulate", "Simulate an ensemble of solution paths");
  sim->add_option("--family", c.family, "benchmark, stopped, nonmarkov, skew or reflected")
      ->capture_default_str();
  sim->add_option("--scheme", c.scheme, "Skew scheme: exact, walk or reflection")->capture_default_str();
  sim->add_option("--A", c.nm_A, "Non-Markov family: A")->capture_default_str();
  sim->add_option("--level", c.nm_level, "Non-Markov family: level B")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "Run an acceptance suite");
  ver->add_option("--suite", c.suite, "Suite name")->required();

  auto* den = app.add_subcommand("density", "Evaluate a density at points from a CSV file");
  den->add_option("--which", c.which, "skew, joint-bl or joint-yb")->required();
  den->add_option("--points", c.points, "CSV file with one point per line")->required();

  app.add_subcommand("msd", "Variance of X^theta_t from X_0 = 0");

  auto* ex = app.add_subcommand("exit-prob", "Monte Carlo exit probability through +eps");
  ex->add_option("--eps", c.eps, "Half width of the exit interval")->capture_default_str();
  ex->add_option("--dt", c.h, "Monitoring step h")->capture_default_str();

  auto* rev = app.add_subcommand("reverse", "Simulate the time-reversed pair");
  rev->add_option("--horizon", c.horizon, "Forward horizon T (default: --t-end)");
  rev->add_option("--terminal-from", c.terminal_from, "forward-sim or explicit")->capture_default_str();
  rev->add_option("--method", c.method, "sde or bessel (ignored for |theta| = 1)")->capture_default_str();
  rev->add_option("--y-terminal", c.y_terminal, "Explicit terminal Y_T");
  rev->add_option("--z-terminal", c.z_terminal, "Explicit terminal B_T");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  c.subcommand = app.get_subcommands().front()->get_name();

  if (app.get_option("--seed")->count() > 0) {
    c.seed_source = "flag";
  } else if (const char* env = std::getenv("HDP_LAB_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      err << "error: HDP_LAB_SEED must be an unsigned integer\n";
      return 2;
    }
    c.seed_source = "HDP_LAB_SEED";
  }

  OutputSet files(c.out);
  try {
    if (c.subcommand == "simulate") return cmd_simulate(c, files, out);
    if (c.subcommand == "verify") return cmd_verify(c, files, out);
    if (c.subcommand == "density") return cmd_density(c, files, out);
    if (c.subcommand == "msd") return cmd_msd(c, files, out);
    if (c.subcommand == "exit-prob") return cmd_exit_prob(c, files, out);
    return cmd_reverse(c, files, out);
  } catch (const std::exception& e) {
    files.remove_all();
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hdp
