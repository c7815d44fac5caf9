#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gmom/errors.hpp"
#include "gmom/harness.hpp"

using namespace gmom;

namespace {

int cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"gmom"};
  argv.insert(argv.end(), args.begin(), args.end());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text parsing") {
  CliConfig cfg = parse_config_text(
      "{method: gmd, lambda: 0.5, c: 0.25, problem: double_well, iters: 42, "
      "seed: 7, diag_ck: true, lambdas: [0, 1, 2]}");
  CHECK(cfg.method == "gmd");
  CHECK(cfg.lambda == doctest::Approx(0.5));
  CHECK(cfg.c == doctest::Approx(0.25));
  CHECK(cfg.problem == "double_well");
  CHECK(cfg.iters == 42);
  CHECK(cfg.seed == 7);
  CHECK(cfg.diag_ck);
  REQUIRE(cfg.lambdas.size() == 3);
  CHECK(cfg.lambdas[1] == doctest::Approx(1.0));

  // Quoted (strict JSON) form parses to the same config.
  CliConfig quoted = parse_config_text(
      "{\"method\": \"gmd\", \"lambda\": 0.5, \"c\": 0.25, "
      "\"problem\": \"double_well\", \"iters\": 42, \"seed\": 7, "
      "\"diag_ck\": true, \"lambdas\": [0, 1, 2]}");
  CHECK(serialize_config(quoted) == serialize_config(cfg));

  CHECK_THROWS_WITH_AS(parse_config_text("{methd: gmd}"),
                       doctest::Contains("unknown config key"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("{iters: banana}"), ConfigError);
}

TEST_CASE("serialize/parse round trip") {
  CliConfig cfg;
  cfg.command = "sweep";
  cfg.method = "gmd_b";
  cfg.lambda = 1.25;
  cfg.c = 0.75;
  cfg.mu = 2.0;
  cfg.mirror = "pnorm";
  cfg.p = 1.5;
  cfg.problem = "logistic";
  cfg.dim = 7;
  cfg.samples = 55;
  cfg.ridge = 1e-2;
  cfg.iters = 321;
  cfg.seed = 99;
  cfg.diag_ck = true;
  cfg.history_cap = 123;
  cfg.lambdas = {0.0, 0.5, 2.0};

  CliConfig back = parse_config_text(serialize_config(cfg));
  CHECK(serialize_config(back) == serialize_config(cfg));
  CHECK(back.method == cfg.method);
  CHECK(back.lambdas == cfg.lambdas);
  CHECK(back.history_cap == cfg.history_cap);
}

TEST_CASE("config validation messages") {
  CliConfig cfg;
  cfg.command = "run";

  cfg.method = "gmd_f";
  cfg.lambda = 1.5;
  CHECK_THROWS_WITH_AS(validate_config(cfg),
                       doctest::Contains("lambda in [0, 1]"), ConfigError);

  cfg.lambda = 0.0;
  cfg.c = 1.0;
  cfg.mu = 1.0;  // c*mu/L = 1 on the unit-smoothness quadratic
  CHECK_THROWS_WITH_AS(validate_config(cfg),
                       doctest::Contains("λ=0 requires cμ/L < 1"),
                       ConfigError);

  cfg.lambda = 2.5;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg.lambda = 1.0;
  cfg.c = 0.5;
  cfg.method = "gmd";
  cfg.mirror = "entropy";
  CHECK_THROWS_WITH_AS(validate_config(cfg),
                       doctest::Contains("unconstrained mirror map"),
                       ConfigError);

  cfg.method = "baseline_gd";
  CHECK_THROWS_WITH_AS(
      validate_config(cfg),
      doctest::Contains("baseline_gd requires an unconstrained Euclidean"),
      ConfigError);

  cfg.method = "nope";
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg.method = "gmd";
  cfg.mirror = "euclidean";
  cfg.iters = -1;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.iters = 10;
  cfg.c = 1.5;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.c = 0.5;
  CHECK_NOTHROW(validate_config(cfg));

  CliConfig sim;
  sim.command = "simulate";
  sim.dynamics = "warp";
  CHECK_THROWS_AS(validate_config(sim), ConfigError);
  sim.dynamics = "mod";
  sim.dt = 0.0;
  CHECK_THROWS_AS(validate_config(sim), ConfigError);
}

TEST_CASE("seeded starting points are feasible and seed-dependent") {
  CliConfig cfg;
  cfg.problem = "quadratic";
  cfg.dim = 6;

  cfg.mirror = "entropy";
  cfg.method = "gmd_f";
  ProblemInstance ent = make_problem_from_config(cfg);
  CHECK(ent.x0.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ent.x0.minCoeff() > 0.0);
  // z0 round-trips back to x0 through the mirror map
  CHECK((ent.mirror.conjugate_grad(ent.z0) - ent.x0)
            .lpNorm<Eigen::Infinity>() <= 1e-9);

  cfg.mirror = "ball";
  cfg.radius = 0.7;
  ProblemInstance ball = make_problem_from_config(cfg);
  CHECK(ball.x0.norm() <= 0.9 * 0.7 + 1e-12);

  cfg.mirror = "euclidean";
  cfg.problem = "double_well";
  cfg.dim = 2;
  ProblemInstance dw0 = make_problem_from_config(cfg);
  CHECK(dw0.objective.in_box(dw0.x0));
  CHECK(dw0.x0.lpNorm<Eigen::Infinity>() <= 1.5 + 1e-12);
  cfg.seed = 1;
  ProblemInstance dw1 = make_problem_from_config(cfg);
  CHECK((dw0.x0 - dw1.x0).norm() > 0.0);
}

TEST_CASE("trace CSV round trips bit for bit") {
  CliConfig cfg;
  cfg.method = "gmd_f";
  cfg.lambda = 1.0;
  cfg.c = 0.5;
  cfg.iters = 7;
  cfg.diag_ck = true;
  Trace tr = execute_run(cfg);

  std::ostringstream os;
  emit_trace(tr, os);
  std::istringstream is(os.str());
  TraceTable table = parse_trace_csv(is);

  REQUIRE(table.header.size() == 11);
  CHECK(table.header[0] == "k");
  CHECK(table.header[10] == "E");
  REQUIRE(table.columns[0].size() == 8);
  for (int k = 0; k <= 7; ++k) {
    CHECK(table.columns[1][k] == tr.f_y[k]);  // exact, 17 digits round trip
    CHECK(table.columns[5][k] == tr.gap[k]);
    CHECK(table.columns[9][k] == tr.c_f[k]);
  }
  // E is undefined at k = 0: emitted empty, parsed back as NaN.
  CHECK(std::isnan(table.columns[10][0]));
  CHECK(table.columns[10][3] == tr.e[3]);
}

TEST_CASE("identical configs emit byte-identical CSV") {
  CliConfig cfg;
  cfg.method = "gmd";
  cfg.iters = 40;
  cfg.seed = 12;
  std::ostringstream a, b;
  emit_trace(execute_run(cfg), a);
  emit_trace(execute_run(cfg), b);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("k,f_y,f_x,grad_norm_dual,min_grad_sq,gap,A,H,B,C_f,E",
                      0) == 0);
}

TEST_CASE("baseline runs in the same schema") {
  CliConfig cfg;
  cfg.method = "baseline_gd";
  cfg.iters = 100;
  Trace tr = execute_run(cfg);
  CHECK(tr.method == Method::Baseline);
  CHECK_FALSE(tr.schedule.has_value());
  CHECK(tr.f_y[100] < tr.f_y[0]);
  CHECK(tr.gap[100] >= 0.0);
  std::ostringstream os;
  emit_trace(tr, os);
  std::istringstream is(os.str());
  TraceTable table = parse_trace_csv(is);
  CHECK(std::isnan(table.columns[6][0]));  // no schedule: A column empty
}

TEST_CASE("sweep rows agree with single runs") {
  CliConfig base;
  base.command = "sweep";
  base.method = "gmd";
  base.iters = 400;
  base.seed = 3;
  std::vector<SweepRow> rows = sweep_lambda(base, {0.5, 1.0});
  REQUIRE(rows.size() == 2);

  for (const SweepRow& row : rows) {
    CHECK_FALSE(row.failed);
    CliConfig single = base;
    single.command = "run";
    single.lambda = row.lambda;
    Trace tr = execute_run(single);
    REQUIRE(row.final_gap.has_value());
    CHECK(*row.final_gap == tr.gap[400]);
    REQUIRE(row.final_min_grad_sq.has_value());
    CHECK(*row.final_min_grad_sq == tr.min_grad_sq[400]);
  }

  // A failing lambda is reported in its row, not thrown.
  std::vector<SweepRow> with_bad = sweep_lambda(base, {0.0, 1.0});
  // lambda = 0 with default c = 0.5 is fine; force failure via c*mu/L = 1.
  CliConfig tight = base;
  tight.c = 1.0;
  std::vector<SweepRow> bad = sweep_lambda(tight, {0.0, 1.0});
  REQUIRE(bad.size() == 2);
  CHECK(bad[0].failed);
  CHECK(bad[0].error.find("λ=0") != std::string::npos);
  CHECK_FALSE(bad[1].failed);
  CHECK(with_bad[0].failed == false);

  std::ostringstream os;
  emit_sweep(bad, os);
  CHECK(os.str().rfind("lambda,slope_gap,slope_min_grad_sq,final_gap,"
                       "final_min_grad_sq",
                       0) == 0);
}

TEST_CASE("cli end to end: run, config file precedence, exit codes") {
  const char* cfg_path = "/tmp/gmom_test_cfg.txt";
  {
    std::ofstream out(cfg_path);
    out << "{method: gmd, lambda: 1, c: 0.5, iters: 5, seed: 4}\n";
  }
  const char* out_path = "/tmp/gmom_test_out.csv";

  // Config file supplies defaults; explicit flags win.
  CHECK(cli({"run", "--config", cfg_path, "--iters", "9", "--out",
             out_path}) == 0);
  std::string text = slurp(out_path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);  // header + 10 rows

  // Plain run to stdout.
  CHECK(cli({"run", "--iters", "3"}) == 0);

  // Unknown flag and bad config both exit 1.
  CHECK(cli({"run", "--no-such-flag"}) == 1);
  CHECK(cli({"run", "--method", "gmd", "--mirror", "entropy"}) == 1);
  CHECK(cli({"check", "--suite", "nonsense"}) == 1);

  // A check suite passes with exit 0.
  CHECK(cli({"check", "--suite", "spaces"}) == 0);

  // Unstable integration reports divergence with exit 2.
  CHECK(cli({"simulate", "--dynamics", "hd", "--problem", "quadratic",
             "--kappa", "1", "--dim", "4", "--dt", "500", "--tmax",
             "100000"}) == 2);

  // Sweep writes rows for every lambda.
  const char* sweep_path = "/tmp/gmom_test_sweep.csv";
  CHECK(cli({"sweep", "--lambdas", "0.5,1", "--iters", "50", "--out",
             sweep_path}) == 0);
  std::string sweep_text = slurp(sweep_path);
  CHECK(std::count(sweep_text.begin(), sweep_text.end(), '\n') == 3);

  std::remove(cfg_path);
  std::remove(out_path);
  std::remove(sweep_path);
}

TEST_CASE("simulate emits the trajectory schema") {
  CliConfig cfg;
  cfg.command = "simulate";
  cfg.dynamics = "mod";
  cfg.tscale = "polynomial";
  cfg.power = 2.0;
  cfg.lambda = 1.0;
  cfg.dt = 0.01;
  cfg.tmax = 1.0;
  cfg.dim = 3;
  Trajectory traj = execute_simulation(cfg);
  CHECK(traj.samples() == 101);

  std::ostringstream os;
  emit_trajectory(traj, os);
  CHECK(os.str().rfind("t,f_x,conserved,energy", 0) == 0);
  std::string first_data = os.str().substr(os.str().find('\n') + 1);
  CHECK(first_data.substr(0, 2) == "0,");
}
