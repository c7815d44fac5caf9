#include "gmom/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "gmom/errors.hpp"
#include "gmom/rng.hpp"

namespace gmom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed offset separating the starting-point stream from the data stream.
constexpr std::uint64_t kStartPointStream = 0x9E3779B97F4A7C15ULL;

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

double parse_double(const std::string& key, const std::string& raw) {
  try {
    size_t used = 0;
    double v = std::stod(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config value for '" + key + "' is not a number: " + raw);
}

long long parse_int(const std::string& key, const std::string& raw) {
  try {
    size_t used = 0;
    long long v = std::stoll(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config value for '" + key +
                    "' is not an integer: " + raw);
}

bool parse_bool(const std::string& key, const std::string& raw) {
  if (raw == "true" || raw == "1") return true;
  if (raw == "false" || raw == "0") return false;
  throw ConfigError("config value for '" + key + "' is not a boolean: " + raw);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& raw) {
  std::string body = trim(raw);
  if (!body.empty() && body.front() == '[') {
    if (body.back() != ']') {
      throw ConfigError("config value for '" + key + "' has unbalanced [ ]");
    }
    body = body.substr(1, body.size() - 2);
  }
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_field(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

void apply_key(CliConfig& cfg, const std::string& key,
               const std::string& value) {
  if (key == "command") {
    cfg.command = value;
  } else if (key == "method") {
    cfg.method = value;
  } else if (key == "lambda") {
    cfg.lambda = parse_double(key, value);
  } else if (key == "c") {
    cfg.c = parse_double(key, value);
  } else if (key == "mu") {
    cfg.mu = parse_double(key, value);
  } else if (key == "mirror") {
    cfg.mirror = value;
  } else if (key == "radius") {
    cfg.radius = parse_double(key, value);
  } else if (key == "p") {
    cfg.p = parse_double(key, value);
  } else if (key == "problem") {
    cfg.problem = value;
  } else if (key == "dim") {
    cfg.dim = static_cast<int>(parse_int(key, value));
  } else if (key == "kappa") {
    cfg.kappa = parse_double(key, value);
  } else if (key == "samples") {
    cfg.samples = static_cast<int>(parse_int(key, value));
  } else if (key == "ridge") {
    cfg.ridge = parse_double(key, value);
  } else if (key == "iters") {
    cfg.iters = static_cast<int>(parse_int(key, value));
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "diag_ck") {
    cfg.diag_ck = parse_bool(key, value);
  } else if (key == "history_cap") {
    cfg.history_cap = static_cast<int>(parse_int(key, value));
  } else if (key == "dynamics") {
    cfg.dynamics = value;
  } else if (key == "tscale") {
    cfg.tscale = value;
  } else if (key == "power") {
    cfg.power = parse_double(key, value);
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "tmax") {
    cfg.tmax = parse_double(key, value);
  } else if (key == "lambdas") {
    cfg.lambdas = parse_double_list(key, value);
  } else if (key == "suite") {
    cfg.suite = value;
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

}  // namespace

CliConfig parse_config_text(const std::string& text) {
  std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    if (body.back() != '}') {
      throw ConfigError("config document has unbalanced { }");
    }
    body = body.substr(1, body.size() - 2);
  }

  CliConfig cfg;
  // Split on top-level commas; '[' ']' nest for the lambdas list.
  int depth = 0;
  std::vector<std::string> items;
  std::string cur;
  for (char ch : body) {
    if (ch == '[') ++depth;
    if (ch == ']') --depth;
    if (ch == ',' && depth == 0) {
      items.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  items.push_back(cur);

  for (const std::string& raw : items) {
    std::string item = trim(raw);
    if (item.empty()) continue;
    size_t colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("config entry is not key: value — " + item);
    }
    std::string key = unquote(trim(item.substr(0, colon)));
    std::string value = unquote(trim(item.substr(colon + 1)));
    apply_key(cfg, key, value);
  }
  return cfg;
}

CliConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string serialize_config(const CliConfig& cfg) {
  std::ostringstream os;
  os << "{command: " << cfg.command;
  os << ", method: " << cfg.method;
  os << ", lambda: " << format_double(cfg.lambda);
  os << ", c: " << format_double(cfg.c);
  os << ", mu: " << format_double(cfg.mu);
  os << ", mirror: " << cfg.mirror;
  os << ", radius: " << format_double(cfg.radius);
  os << ", p: " << format_double(cfg.p);
  os << ", problem: " << cfg.problem;
  os << ", dim: " << cfg.dim;
  os << ", kappa: " << format_double(cfg.kappa);
  os << ", samples: " << cfg.samples;
  os << ", ridge: " << format_double(cfg.ridge);
  os << ", iters: " << cfg.iters;
  os << ", seed: " << cfg.seed;
  if (!cfg.out.empty()) os << ", out: " << cfg.out;
  os << ", diag_ck: " << (cfg.diag_ck ? "true" : "false");
  os << ", history_cap: " << cfg.history_cap;
  os << ", dynamics: " << cfg.dynamics;
  os << ", tscale: " << cfg.tscale;
  os << ", power: " << format_double(cfg.power);
  os << ", eta: " << format_double(cfg.eta);
  os << ", dt: " << format_double(cfg.dt);
  os << ", tmax: " << format_double(cfg.tmax);
  if (!cfg.lambdas.empty()) {
    os << ", lambdas: [";
    for (size_t i = 0; i < cfg.lambdas.size(); ++i) {
      if (i) os << ", ";
      os << format_double(cfg.lambdas[i]);
    }
    os << "]";
  }
  os << ", suite: " << cfg.suite;
  os << "}";
  return os.str();
}

MirrorMap make_mirror_from_config(const CliConfig& cfg) {
  if (cfg.mirror == "euclidean") return MirrorMap::euclidean(cfg.mu);
  if (cfg.mirror == "ball") return MirrorMap::euclidean_ball(cfg.mu, cfg.radius);
  if (cfg.mirror == "entropy") return MirrorMap::entropy_simplex(cfg.mu);
  if (cfg.mirror == "pnorm") return MirrorMap::squared_p_norm(cfg.mu, cfg.p);
  throw ConfigError("unknown mirror kind: " + cfg.mirror +
                    " (expected euclidean | ball | entropy | pnorm)");
}

Objective make_objective_from_config(const CliConfig& cfg) {
  if (cfg.problem == "quadratic") {
    return make_quadratic(cfg.dim, cfg.kappa, cfg.seed);
  }
  if (cfg.problem == "logistic") {
    return make_logistic(cfg.samples, cfg.dim, cfg.seed, cfg.ridge);
  }
  if (cfg.problem == "double_well") {
    return make_nonconvex_2d(NonconvexKind::DoubleWell);
  }
  if (cfg.problem == "styblinski_tang") {
    return make_nonconvex_2d(NonconvexKind::StyblinskiTang);
  }
  throw ConfigError("unknown problem kind: " + cfg.problem +
                    " (expected quadratic | logistic | double_well | "
                    "styblinski_tang)");
}

static Method method_from_name(const std::string& name) {
  if (name == "gmd_f") return Method::GmdF;
  if (name == "gmd") return Method::Gmd;
  if (name == "gmd_b") return Method::GmdB;
  if (name == "baseline_gd") return Method::Baseline;
  throw ConfigError("unknown method: " + name +
                    " (expected gmd_f | gmd | gmd_b | baseline_gd)");
}

void validate_config(const CliConfig& cfg) {
  if (cfg.command != "run" && cfg.command != "simulate" &&
      cfg.command != "sweep" && cfg.command != "check") {
    throw ConfigError("unknown command: " + cfg.command);
  }
  if (cfg.command == "check") return;

  if (cfg.command == "simulate") {
    if (cfg.dynamics != "hd" && cfg.dynamics != "ad" && cfg.dynamics != "mod") {
      throw ConfigError("unknown dynamics: " + cfg.dynamics +
                        " (expected hd | ad | mod)");
    }
    if (cfg.tscale != "polynomial" && cfg.tscale != "exponential") {
      throw ConfigError("unknown tscale: " + cfg.tscale);
    }
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.tmax >= cfg.dt)) throw ConfigError("tmax must be >= dt");
  }

  Method method = method_from_name(cfg.method);
  Objective obj = make_objective_from_config(cfg);
  MirrorMap map = make_mirror_from_config(cfg);

  if (cfg.command == "run" || cfg.command == "sweep") {
    if (cfg.iters < 0) throw ConfigError("iters must be >= 0");
    if (!(cfg.c > 0.0 && cfg.c <= 1.0)) throw ConfigError("c must lie in (0, 1]");
    // Lambda-specific constraints are per-run: a sweep records them as row
    // failures instead of rejecting the whole sweep.
    if (cfg.command == "run") {
      if (!(cfg.lambda >= 0.0 && cfg.lambda <= 2.0)) {
        throw ConfigError("lambda must lie in [0, 2]");
      }
      if (cfg.lambda == 0.0 &&
          cfg.c * map.modulus() / obj.smoothness >= 1.0) {
        throw ConfigError("λ=0 requires cμ/L < 1");
      }
      if (method == Method::GmdF && cfg.lambda > 1.0) {
        throw ConfigError("gmd_f carries averaged-iterate guarantees only "
                          "for lambda in [0, 1]");
      }
    }
    if (method == Method::Baseline) {
      if (map.geometry() != Geometry::Euclidean) {
        throw ConfigError(
            "baseline_gd requires an unconstrained Euclidean problem");
      }
    } else {
      validate_method_geometry(method, map);
    }
  }
}

ProblemInstance make_problem_from_config(const CliConfig& cfg) {
  Objective obj = make_objective_from_config(cfg);
  MirrorMap map = make_mirror_from_config(cfg);
  Rng rng(cfg.seed ^ kStartPointStream);

  Vector x0;
  if (map.geometry() == Geometry::EntropySimplex) {
    // Softmax of a uniform draw: strictly interior simplex point.
    Vector u = rng.uniform_vector(obj.dim, -1.0, 1.0);
    Vector w = (u.array() - u.maxCoeff()).exp().matrix();
    x0 = w / w.sum();
  } else if (obj.box) {
    x0 = Vector(obj.dim);
    for (int i = 0; i < obj.dim; ++i) {
      x0[i] = rng.uniform(0.75 * obj.box->first[i], 0.75 * obj.box->second[i]);
    }
  } else {
    x0 = rng.uniform_vector(obj.dim, -1.0, 1.0);
    if (map.geometry() == Geometry::EuclideanBall) {
      double limit = 0.9 * map.radius();
      double n = x0.norm();
      if (n > limit) x0 *= limit / n;
    }
  }
  return make_problem(std::move(obj), std::move(map), std::move(x0));
}

Trace baseline_gd(const ProblemInstance& problem, int steps) {
  if (problem.mirror.geometry() != Geometry::Euclidean) {
    throw ConfigError("baseline_gd requires an unconstrained Euclidean problem");
  }
  if (steps < 0) throw ConfigError("baseline_gd: steps must be >= 0");
  const Objective& f = problem.objective;
  const double L = f.smoothness;
  const bool has_opt = f.optimum_value.has_value();

  Trace tr;
  tr.method = Method::Baseline;
  tr.map = problem.mirror;
  tr.objective = f;
  tr.x0 = problem.x0;

  Vector x = problem.x0;
  for (int k = 0; k <= steps; ++k) {
    double fx = f.value(x);
    Vector g = f.gradient(x);
    if (!std::isfinite(fx) || !g.allFinite() || !x.allFinite()) {
      throw DivergenceError("baseline diverged at iteration " +
                                std::to_string(k),
                            k, tr.x_hist.empty() ? problem.x0 : tr.x_hist.back(),
                            tr.f_y.empty() ? fx : tr.f_y.back());
    }
    if (!f.in_box(x)) {
      throw DivergenceError(
          "baseline left the objective's documented box at iteration " +
              std::to_string(k),
          k, tr.x_hist.empty() ? problem.x0 : tr.x_hist.back(),
          tr.f_y.empty() ? fx : tr.f_y.back());
    }
    double gn = problem.mirror.dual_norm(g);
    tr.f_y.push_back(fx);
    tr.f_x.push_back(fx);
    tr.grad_dual.push_back(gn);
    tr.min_grad_sq.push_back(
        k == 0 ? gn * gn : std::min(tr.min_grad_sq.back(), gn * gn));
    tr.gap.push_back(has_opt ? fx - *f.optimum_value : kNaN);
    tr.x_hist.push_back(x);
    x -= g / L;
  }
  tr.history_cap = steps;
  tr.y_hist = tr.x_hist;
  tr.x = tr.x_hist.back();
  tr.y = tr.x;
  tr.xhat = tr.x;
  tr.z = Vector::Zero(problem.x0.size());
  return tr;
}

Trace execute_run(const CliConfig& cfg) {
  validate_config(cfg);
  ProblemInstance problem = make_problem_from_config(cfg);
  Method method = method_from_name(cfg.method);
  if (method == Method::Baseline) return baseline_gd(problem, cfg.iters);

  RunConfig rc;
  rc.method = method;
  rc.lambda = cfg.lambda;
  rc.c = cfg.c;
  rc.iters = cfg.iters;
  rc.track_ck = cfg.diag_ck;
  rc.history_cap = cfg.history_cap;
  return run(rc, problem);
}

void emit_trace(const Trace& tr, std::ostream& os) {
  os << "k,f_y,f_x,grad_norm_dual,min_grad_sq,gap,A,H,B,C_f,E\n";
  const int n = tr.steps();
  for (int k = 0; k <= n; ++k) {
    os << k;
    os << ',' << format_field(tr.f_y[k]);
    os << ',' << format_field(tr.f_x[k]);
    os << ',' << format_field(tr.grad_dual[k]);
    os << ',' << format_field(tr.min_grad_sq[k]);
    os << ',' << format_field(tr.gap[k]);
    if (tr.schedule) {
      os << ',' << format_field(tr.schedule->A[k]);
      os << ',' << format_field(tr.schedule->H[k]);
      os << ',' << format_field(tr.schedule->B[k]);
    } else {
      os << ",,,";
    }
    os << ',' << (k < static_cast<int>(tr.c_f.size())
                      ? format_field(tr.c_f[k])
                      : std::string());
    os << ',' << (k < static_cast<int>(tr.e.size()) ? format_field(tr.e[k])
                                                    : std::string());
    os << '\n';
  }
}

void emit_trace_file(const Trace& tr, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  emit_trace(tr, out);
  if (!out.good()) throw ConfigError("write failed: " + path);
}

TraceTable parse_trace_csv(std::istream& is) {
  TraceTable table;
  std::string line;
  if (!std::getline(is, line)) {
    throw ConfigError("trace CSV is empty");
  }
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  table.columns.resize(table.header.size());

  while (std::getline(is, line)) {
    if (line.empty()) continue;
    size_t col = 0;
    size_t pos = 0;
    while (col < table.header.size()) {
      size_t next = line.find(',', pos);
      std::string field = next == std::string::npos
                              ? line.substr(pos)
                              : line.substr(pos, next - pos);
      table.columns[col].push_back(field.empty() ? kNaN
                                                 : std::stod(field));
      ++col;
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    while (col < table.header.size()) table.columns[col++].push_back(kNaN);
  }
  return table;
}

std::vector<SweepRow> sweep_lambda(const CliConfig& base,
                                   const std::vector<double>& lambdas) {
  std::vector<SweepRow> rows;
  for (double lam : lambdas) {
    SweepRow row;
    row.lambda = lam;
    CliConfig cfg = base;
    cfg.command = "run";
    cfg.lambda = lam;
    try {
      Trace tr = execute_run(cfg);
      if (auto fit = fit_rate(tr, TraceColumn::Gap)) row.slope_gap = fit->slope;
      if (auto fit = fit_rate(tr, TraceColumn::MinGradSq)) {
        row.slope_min_grad_sq = fit->slope;
      }
      if (!std::isnan(tr.gap.back())) row.final_gap = tr.gap.back();
      row.final_min_grad_sq = tr.min_grad_sq.back();
    } catch (const std::exception& e) {
      row.failed = true;
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_sweep(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "lambda,slope_gap,slope_min_grad_sq,final_gap,final_min_grad_sq\n";
  for (const SweepRow& row : rows) {
    os << format_double(row.lambda);
    auto field = [&](const std::optional<double>& v) {
      os << ',' << (v ? format_double(*v) : std::string());
    };
    field(row.slope_gap);
    field(row.slope_min_grad_sq);
    field(row.final_gap);
    field(row.final_min_grad_sq);
    os << '\n';
  }
}

Trajectory execute_simulation(const CliConfig& cfg) {
  validate_config(cfg);
  Objective obj = make_objective_from_config(cfg);
  MirrorMap map = make_mirror_from_config(cfg);

  CliConfig probe = cfg;
  ProblemInstance problem = make_problem_from_config(probe);

  ContinuousRun run{};
  if (cfg.dynamics == "hd") {
    run.kind = DynamicsKind::Hd;
  } else if (cfg.dynamics == "ad") {
    run.kind = DynamicsKind::Ad;
  } else {
    run.kind = DynamicsKind::Mod;
    run.h = HPower{cfg.lambda, 1.0};
  }
  run.map = problem.mirror;
  run.objective = problem.objective;
  run.ts = cfg.tscale == "exponential" ? TimeScale::exponential(cfg.eta)
                                       : TimeScale::polynomial(cfg.power);
  run.dt = cfg.dt;
  run.T = cfg.tmax;
  run.z0 = problem.z0;
  run.x0 = problem.x0;
  return integrate(run);
}

void emit_trajectory(const Trajectory& traj, std::ostream& os) {
  os << "t,f_x,conserved,energy\n";
  std::vector<double> conserved;
  if (traj.kind != DynamicsKind::Hd) conserved = conserved_cf(traj);
  std::vector<double> energy = hamiltonian_energy(traj);
  for (int i = 0; i < traj.samples(); ++i) {
    os << format_double(traj.t[i]);
    os << ',' << format_double(traj.f_x[i]);
    os << ','
       << (conserved.empty() ? std::string() : format_double(conserved[i]));
    os << ',' << format_double(energy[i]);
    os << '\n';
  }
}

namespace {

void register_common_options(CLI::App* sub, CliConfig& cfg,
                             std::string& config_path) {
  sub->add_option("--config", config_path,
                  "flat {key: value} config file; explicit flags override it");
  sub->add_option("--method", cfg.method, "gmd_f | gmd | gmd_b | baseline_gd");
  sub->add_option("--lambda", cfg.lambda, "memory exponent in [0, 2]");
  sub->add_option("--c", cfg.c, "step aggressiveness in (0, 1]");
  sub->add_option("--mu", cfg.mu, "mirror-map strong-convexity parameter");
  sub->add_option("--mirror", cfg.mirror, "euclidean | ball | entropy | pnorm");
  sub->add_option("--radius", cfg.radius, "ball mirror radius");
  sub->add_option("--p", cfg.p, "pnorm mirror exponent in (1, 2]");
  sub->add_option("--problem", cfg.problem,
                  "quadratic | logistic | double_well | styblinski_tang");
  sub->add_option("--dim", cfg.dim, "problem dimension");
  sub->add_option("--kappa", cfg.kappa, "quadratic condition number");
  sub->add_option("--samples", cfg.samples, "logistic data rows");
  sub->add_option("--ridge", cfg.ridge, "logistic ridge term");
  sub->add_option("--iters", cfg.iters, "iteration budget");
  sub->add_option("--seed", cfg.seed, "RNG seed for data and starting point");
  sub->add_option("--out", cfg.out, "output CSV path (default stdout)");
  sub->add_flag("--diag-ck", cfg.diag_ck,
                "track the run conserved quantity (fills the E column)");
  sub->add_option("--history-cap", cfg.history_cap,
                  "iterates kept for diagnostics");
  sub->add_option("--dynamics", cfg.dynamics, "hd | ad | mod");
  sub->add_option("--tscale", cfg.tscale, "polynomial | exponential");
  sub->add_option("--power", cfg.power, "polynomial time scale (1 + t)^power");
  sub->add_option("--eta", cfg.eta, "exponential time scale exp(eta t)");
  sub->add_option("--dt", cfg.dt, "integrator step");
  sub->add_option("--tmax", cfg.tmax, "integration horizon");
  sub->add_option("--lambdas", cfg.lambdas, "sweep lambda values")
      ->delimiter(',');
  sub->add_option("--suite", cfg.suite,
                  "check selector: spaces | objectives | schedules | discrete "
                  "| continuous | diagnostics | all");
}

template <typename Emit>
void write_output(const CliConfig& cfg, Emit&& emit) {
  if (cfg.out.empty()) {
    emit(std::cout);
  } else {
    std::ofstream out(cfg.out);
    if (!out) throw ConfigError("cannot open output file: " + cfg.out);
    emit(out);
    if (!out.good()) throw ConfigError("write failed: " + cfg.out);
  }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"generalized momentum methods: discrete runs, continuous "
               "flows, lambda sweeps, and invariant checks"};
  app.require_subcommand(1);

  CliConfig cfg;
  std::string config_path;

  // Load the config file first so explicit flags take precedence; CLI11
  // only writes a bound field when its flag is present on the command line.
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      config_path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      config_path = arg.substr(9);
    }
  }
  if (!config_path.empty()) {
    try {
      cfg = load_config_file(config_path);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  CLI::App* cmd_run = app.add_subcommand("run", "run a discrete method");
  CLI::App* cmd_sim =
      app.add_subcommand("simulate", "integrate a continuous flow");
  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "run one method across lambda values");
  CLI::App* cmd_check =
      app.add_subcommand("check", "execute the module invariant suites");
  std::string ignored;
  register_common_options(cmd_run, cfg, config_path);
  register_common_options(cmd_sim, cfg, ignored);
  register_common_options(cmd_sweep, cfg, ignored);
  register_common_options(cmd_check, cfg, ignored);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (cmd_run->parsed()) {
      cfg.command = "run";
      Trace tr = execute_run(cfg);
      write_output(cfg, [&](std::ostream& os) { emit_trace(tr, os); });
    } else if (cmd_sim->parsed()) {
      cfg.command = "simulate";
      Trajectory traj = execute_simulation(cfg);
      write_output(cfg, [&](std::ostream& os) { emit_trajectory(traj, os); });
    } else if (cmd_sweep->parsed()) {
      cfg.command = "sweep";
      if (cfg.lambdas.empty()) cfg.lambdas = {0.0, 0.5, 1.0, 1.5, 2.0};
      validate_config(cfg);
      std::vector<SweepRow> rows = sweep_lambda(cfg, cfg.lambdas);
      for (const SweepRow& row : rows) {
        if (row.failed) {
          std::cerr << "sweep: lambda=" << format_double(row.lambda)
                    << " failed: " << row.error << "\n";
        }
      }
      write_output(cfg, [&](std::ostream& os) { emit_sweep(rows, os); });
    } else if (cmd_check->parsed()) {
      int failures = run_checks(cfg.suite, std::cout);
      return failures == 0 ? 0 : 3;
    }
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace gmom
