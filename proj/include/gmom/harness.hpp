#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gmom/diagnostics.hpp"
#include "gmom/dynamics.hpp"
#include "gmom/methods.hpp"

namespace gmom {

/** Flat experiment configuration shared by the CLI and the config-file
 * parser. Every field has a documented default so a minimal file like
 * {method: gmd_f, lambda: 1, c: 0.5, problem: quadratic, iters: 100}
 * is complete. */
struct CliConfig {
  std::string command = "run";  // run | simulate | sweep | check

  std::string method = "gmd_f";  // gmd_f | gmd | gmd_b | baseline_gd
  double lambda = 1.0;
  double c = 0.5;
  double mu = 1.0;
  std::string mirror = "euclidean";  // euclidean | ball | entropy | pnorm
  double radius = 1.0;               // ball
  double p = 1.5;                    // pnorm

  std::string problem = "quadratic";  // quadratic | logistic | double_well |
                                      // styblinski_tang
  int dim = 10;
  double kappa = 100.0;
  int samples = 200;    // logistic data rows
  double ridge = 1e-3;  // logistic regularizer

  int iters = 1000;
  std::uint64_t seed = 0;
  std::string out;
  bool diag_ck = false;
  int history_cap = 2000;

  std::string dynamics = "mod";      // simulate: hd | ad | mod
  std::string tscale = "polynomial"; // simulate: polynomial | exponential
  double power = 2.0;                // polynomial alpha = (1 + t)^power
  double eta = 1.0;                  // exponential alpha = exp(eta t)
  double dt = 1e-3;
  double tmax = 10.0;

  std::vector<double> lambdas;  // sweep targets
  std::string suite = "all";    // check selector
};

/** Parse a flat {key: value, ...} document (quoted or bare scalars; JSON
 * object syntax accepted). Unknown keys raise ConfigError naming the key. */
CliConfig parse_config_text(const std::string& text);

CliConfig load_config_file(const std::string& path);

/** Canonical text form; parse_config_text(serialize_config(c)) == c. */
std::string serialize_config(const CliConfig& cfg);

/** Reject invalid combinations with the defining constraint in the message,
 * e.g. lambda = 0 with c*mu/L >= 1, or gmd on a constrained mirror map. */
void validate_config(const CliConfig& cfg);

/** Build the objective, mirror map, and seeded starting point. All
 * randomness flows from cfg.seed through the documented generator, so equal
 * configs give byte-identical traces. */
ProblemInstance make_problem_from_config(const CliConfig& cfg);

MirrorMap make_mirror_from_config(const CliConfig& cfg);
Objective make_objective_from_config(const CliConfig& cfg);

/** Run the configured discrete method (or the gradient-descent baseline). */
Trace execute_run(const CliConfig& cfg);

/** Plain gradient descent x_{k+1} = x_k - (1/L) grad f(x_k), emitted in the
 * same trace schema (schedule columns empty). Unconstrained Euclidean only. */
Trace baseline_gd(const ProblemInstance& problem, int steps);

/** CSV with header k,f_y,f_x,grad_norm_dual,min_grad_sq,gap,A,H,B,C_f,E.
 * Doubles print with 17 significant digits; absent values print as empty
 * fields, so re-parsing reproduces the trace bit for bit. */
void emit_trace(const Trace& tr, std::ostream& os);
void emit_trace_file(const Trace& tr, const std::string& path);

/** Parsed CSV columns; empty fields come back as NaN. */
struct TraceTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // one vector per header entry
};

TraceTable parse_trace_csv(std::istream& is);

struct SweepRow {
  double lambda = 0.0;
  bool failed = false;
  std::string error;
  std::optional<double> slope_gap;
  std::optional<double> slope_min_grad_sq;
  std::optional<double> final_gap;
  std::optional<double> final_min_grad_sq;
};

/** One run per lambda; failures are recorded in the row and the sweep
 * continues. */
std::vector<SweepRow> sweep_lambda(const CliConfig& base,
                                   const std::vector<double>& lambdas);

/** CSV header lambda,slope_gap,slope_min_grad_sq,final_gap,final_min_grad_sq. */
void emit_sweep(const std::vector<SweepRow>& rows, std::ostream& os);

/** Continuous-time simulation configured by cfg (command "simulate");
 * emits t,f_x,conserved,energy columns to cfg.out when set. */
Trajectory execute_simulation(const CliConfig& cfg);

void emit_trajectory(const Trajectory& traj, std::ostream& os);

/** Run the named invariant suite (spaces, objectives, schedules, discrete,
 * continuous, diagnostics, or all), printing one line with measured slack
 * per check. Returns the number of failures. */
int run_checks(const std::string& suite, std::ostream& os);

/** Full command-line entry point. Exit codes: 0 success, 1 configuration
 * error, 2 divergence, 3 check failure. */
int cli_main(int argc, const char* const* argv);

}  // namespace gmom
