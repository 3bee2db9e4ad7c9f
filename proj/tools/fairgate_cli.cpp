// Command-line front end. Exit codes: 0 success, 1 validation error, 2 I/O error.
#include <fmt/format.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairgate/demo.hpp"
#include "fairgate/dynamics.hpp"
#include "fairgate/genlab.hpp"
#include "fairgate/ingest.hpp"
#include "fairgate/io.hpp"
#include "fairgate/static_solver.hpp"

using namespace fairgate;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    write_file_atomic(path, content);
  }
}

Penalty penalty_from(const std::string& spec) {
  Penalty g = Penalty::parse(spec);
  validate_penalty(g);
  return g;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError(fmt::format("invalid grid entry '{}'", item));
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty grid");
  return out;
}

struct LambdaGrid {
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;
};

LambdaGrid parse_lambda_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    std::size_t used = 0;
    try {
      parts.push_back(std::stod(item, &used));
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValidationError(fmt::format("invalid lambda grid '{}'", text));
  }
  if (parts.size() != 3) throw ValidationError("lambda grid must be start:stop:step");
  if (!(parts[2] > 0.0)) throw ValidationError("lambda grid step must be > 0");
  if (parts[0] < 0.0) throw ValidationError("lambda must be >= 0");
  return {parts[0], parts[1], parts[2]};
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError(fmt::format("lambda must be finite and >= 0, got {}", lambda));
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FAIRGATE_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError(fmt::format("FAIRGATE_SEED is not an unsigned integer: '{}'", env));
    }
  }
  return 0;
}

void write_manifest(const std::string& path, RunManifest& m) {
  if (!path.empty()) write_json_atomic(path, m.to_json());
}

std::string threshold_text(double v) { return std::isfinite(v) ? format_number(v) : std::string("inf"); }

// ---- solve ----------------------------------------------------------------

struct SolveArgs {
  std::string population;
  std::string penalty = "linear";
  double lambda = 0.0;
  std::string output;
  std::string manifest;
};

void run_solve(const SolveArgs& a) {
  check_lambda(a.lambda);
  const PopulationState s = population_from_json(read_json(a.population));
  const Penalty g = penalty_from(a.penalty);
  const StaticSolution sol = solve_penalized(s, g, a.lambda);

  std::string summary = fmt::format("delta {}\nobjective {}\n", format_number(sol.delta), format_number(sol.objective));
  if (has_tension(sol.delta_um)) {
    summary += fmt::format("beta_e {}\nbeta_s {}\neffective {}\nfully_satisfactory {}\n", format_number(beta_e(s)),
                           format_number(beta_s(s)), is_effective(s, g, a.lambda),
                           is_fully_satisfactory(s, g, a.lambda));
    summary += fmt::format("min_lambda_effective {}\nmin_lambda_satisfactory {}\n",
                           threshold_text(min_lambda_effective(s, g)), threshold_text(min_lambda_satisfactory(s, g)));
  } else {
    summary += "beta_e n/a\nbeta_s n/a\neffective false\nfully_satisfactory true\n";
  }
  std::cout << summary;
  if (!a.output.empty()) write_json_atomic(a.output, to_json(sol));

  RunManifest m;
  m.command = "solve";
  m.parameters = {{"penalty", g.describe()}, {"lambda", a.lambda}};
  if (!a.manifest.empty()) m.add_input(a.population);
  if (!a.output.empty()) m.outputs.push_back(a.output);
  write_manifest(a.manifest, m);
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string population;
  std::string penalty = "linear";
  std::string grid;
  std::string output;
  std::string manifest;
};

void run_sweep(const SweepArgs& a) {
  const LambdaGrid lg = parse_lambda_grid(a.grid);
  const PopulationState s = population_from_json(read_json(a.population));
  const Penalty g = penalty_from(a.penalty);
  std::vector<SweepRow> rows;
  // index-based so the grid does not accumulate rounding drift
  for (long k = 0;; ++k) {
    const double lambda = lg.start + static_cast<double>(k) * lg.step;
    if (lambda > lg.stop + 1e-9 * lg.step) break;
    const StaticSolution sol = solve_penalized(s, g, lambda);
    rows.push_back({lambda, sol.delta, sol.objective});
  }
  emit(a.output, sweep_table(rows));

  RunManifest m;
  m.command = "sweep";
  m.parameters = {{"penalty", g.describe()}, {"lambda_grid", a.grid}};
  if (!a.manifest.empty()) m.add_input(a.population);
  if (!a.output.empty()) m.outputs.push_back(a.output);
  write_manifest(a.manifest, m);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string population;
  std::string kernel;
  std::string penalty = "linear";
  double lambda = 0.0;
  int t_max = 1000;
  double tol = 0.0;
  std::string output;
  std::string final_state;
  std::string manifest;
};

void run_simulate(const SimulateArgs& a) {
  check_lambda(a.lambda);
  if (a.t_max < 0) throw ValidationError("t-max must be >= 0");
  const PopulationState s = population_from_json(read_json(a.population));
  const DynamicsKernel k = kernel_from_json(read_json(a.kernel));
  if (!(s.grid == k.grid)) throw ValidationError("grid mismatch between population and kernel");
  const Penalty g = penalty_from(a.penalty);
  const TrajectoryRecord rec = simulate(s, k, g, a.lambda, {a.t_max, a.tol, 0});
  emit(a.output, trajectory_table(rec));
  if (!a.final_state.empty()) write_json_atomic(a.final_state, to_json(rec.final_state));

  RunManifest m;
  m.command = "simulate";
  m.parameters = {{"penalty", g.describe()}, {"lambda", a.lambda}, {"t_max", a.t_max}, {"tol", a.tol}};
  if (!a.manifest.empty()) {
    m.add_input(a.population);
    m.add_input(a.kernel);
  }
  for (const std::string& p : {a.output, a.final_state}) {
    if (!p.empty()) m.outputs.push_back(p);
  }
  write_manifest(a.manifest, m);
}

// ---- stationary -----------------------------------------------------------

std::string vector_text(const Vector& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_number(v[i]);
  return out + "]";
}

void run_stationary(const std::string& kernel_path) {
  const DynamicsKernel k = kernel_from_json(read_json(kernel_path));
  const ContractionInfo c = contraction_factor(k);
  const BirthDeathCheck bd = check_birth_death(k);
  std::string out = fmt::format("alpha {}\nfactor {}\nguaranteed {}\n", format_number(c.alpha), format_number(c.factor),
                                c.guaranteed);
  out += fmt::format("band_ok {}\nmonotone_ok {}\nunique_stationary {}\ngrowth_condition {}\n", bd.band_ok,
                     bd.monotone_ok, bd.unique_stationary, check_growth_condition(k));
  const auto candidates = stationary_candidates(k);
  out += fmt::format("candidates {}\n", candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    out += fmt::format("candidate {} {} residual {}\n", i, vector_text(candidates[i].distribution),
                       format_number(candidates[i].residual));
  }
  std::cout << out;
}

// ---- gen ------------------------------------------------------------------

struct GenArgs {
  std::optional<std::uint64_t> band;
  std::optional<std::uint64_t> random;
  std::optional<std::uint64_t> random_band;
  std::string perturb;
  double sigma = 0.0;
  std::optional<std::uint64_t> seed;
  std::string grid;
  std::string output;
};

void run_gen(const GenArgs& a) {
  const int modes = a.band.has_value() + a.random.has_value() + a.random_band.has_value() + !a.perturb.empty();
  if (modes != 1) throw ValidationError("choose exactly one of --band, --random, --random-band, --perturb");

  RunManifest m;
  m.command = "gen";
  DynamicsKernel k;
  if (a.perturb.empty()) {
    if (a.grid.empty()) throw ValidationError("--grid is required unless perturbing an existing kernel");
    const QualificationGrid grid(parse_list(a.grid));
    m.parameters["grid"] = grid.values();
    if (a.band) {
      const BandKernelParams params = sample_band_params(*a.band);
      k = band_kernel(params, grid);
      m.parameters["mode"] = "band";
      m.parameters["band_params"] = to_json(params);
      m.seeds = {*a.band};
    } else if (a.random) {
      k = random_kernel(*a.random, grid);
      m.parameters["mode"] = "random";
      m.seeds = {*a.random};
    } else {
      k = random_band_kernel(*a.random_band, grid);
      m.parameters["mode"] = "random-band";
      m.seeds = {*a.random_band};
    }
  } else {
    const std::uint64_t seed = a.seed ? *a.seed : default_seed();
    k = perturb_kernel(kernel_from_json(read_json(a.perturb)), a.sigma, seed);
    m.add_input(a.perturb);
    m.parameters["mode"] = "perturb";
    m.parameters["sigma"] = a.sigma;
    m.seeds = {seed};
  }
  const std::string text = to_json(k).dump(2) + "\n";
  emit(a.output, text);
  if (!a.output.empty()) {
    m.outputs.push_back(a.output);
    write_json_atomic(a.output + ".manifest.json", m.to_json());
  }
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string csv;
  IngestConfig config;
  std::vector<std::string> group_a;
  std::vector<std::string> group_b;
  std::string zero_policy = "error";
  std::string output;
  std::string manifest;
};

void run_ingest(IngestArgs a) {
  a.config.group_a_values = {a.group_a.begin(), a.group_a.end()};
  a.config.group_b_values = {a.group_b.begin(), a.group_b.end()};
  if (a.zero_policy == "error") {
    a.config.zero_policy = ZeroPolicy::Error;
  } else if (a.zero_policy == "nudge") {
    a.config.zero_policy = ZeroPolicy::Nudge;
  } else {
    throw ValidationError(fmt::format("zero policy must be 'error' or 'nudge', got '{}'", a.zero_policy));
  }
  const PopulationState s = load_population(a.csv, a.config);
  emit(a.output, to_json(s).dump(2) + "\n");

  RunManifest m;
  m.command = "ingest";
  m.parameters = {{"group_column", a.config.group_column}, {"group_a_values", a.group_a},
                  {"group_b_values", a.group_b},           {"value_column", a.config.value_column},
                  {"offset", a.config.offset},             {"bin_width", a.config.bin_width},
                  {"zero_policy", a.zero_policy},          {"nudge_epsilon", a.config.nudge_epsilon}};
  if (!a.manifest.empty()) m.add_input(a.csv);
  if (!a.output.empty()) m.outputs.push_back(a.output);
  write_manifest(a.manifest, m);
}

// ---- example --------------------------------------------------------------

void run_example(const std::string& population, const std::string& kernel) {
  if (population.empty() && kernel.empty()) {
    Json j;
    j["population"] = to_json(demo::three_level_population());
    j["kernel"] = to_json(demo::three_level_kernel());
    std::cout << j.dump(2) << "\n";
    return;
  }
  if (!population.empty()) write_json_atomic(population, to_json(demo::three_level_population()));
  if (!kernel.empty()) write_json_atomic(kernel, to_json(demo::three_level_kernel()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selection policies under a demographic-parity penalty"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Solve the penalized static problem for one population");
  solve_cmd->add_option("population", solve_args.population, "Population JSON")->required();
  solve_cmd->add_option("--penalty", solve_args.penalty, "linear | quadratic | power:P | hinge:D | exp");
  solve_cmd->add_option("--lambda", solve_args.lambda, "Penalty weight")->required();
  solve_cmd->add_option("-o,--output", solve_args.output, "Write the solution JSON here");
  solve_cmd->add_option("--manifest", solve_args.manifest, "Write a run manifest here");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate disparity and objective over a lambda grid");
  sweep_cmd->add_option("population", sweep_args.population, "Population JSON")->required();
  sweep_cmd->add_option("--penalty", sweep_args.penalty, "Penalty spec");
  sweep_cmd->add_option("--lambda-grid", sweep_args.grid, "start:stop:step")->required();
  sweep_cmd->add_option("-o,--output", sweep_args.output, "Table path (stdout if omitted)");
  sweep_cmd->add_option("--manifest", sweep_args.manifest, "Write a run manifest here");

  SimulateArgs sim_args;
  auto* sim_cmd = app.add_subcommand("simulate", "Run myopic re-optimization dynamics");
  sim_cmd->add_option("population", sim_args.population, "Population JSON")->required();
  sim_cmd->add_option("kernel", sim_args.kernel, "Kernel JSON")->required();
  sim_cmd->add_option("--penalty", sim_args.penalty, "Penalty spec");
  sim_cmd->add_option("--lambda", sim_args.lambda, "Penalty weight")->required();
  sim_cmd->add_option("--t-max", sim_args.t_max, "Number of steps");
  sim_cmd->add_option("--tol", sim_args.tol, "Stop early once both groups move less than this");
  sim_cmd->add_option("-o,--output", sim_args.output, "Trajectory table path (stdout if omitted)");
  sim_cmd->add_option("--final-state", sim_args.final_state, "Write the final population JSON here");
  sim_cmd->add_option("--manifest", sim_args.manifest, "Write a run manifest here");

  std::string stationary_kernel;
  auto* stat_cmd = app.add_subcommand("stationary", "Report contraction, birth-death and stationary-state diagnostics");
  stat_cmd->add_option("kernel", stationary_kernel, "Kernel JSON")->required();

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a kernel");
  gen_cmd->add_option("--band", gen_args.band, "Band kernel from this seed");
  gen_cmd->add_option("--random", gen_args.random, "Fully random kernel from this seed");
  gen_cmd->add_option("--random-band", gen_args.random_band, "Random tridiagonal kernel from this seed");
  gen_cmd->add_option("--perturb", gen_args.perturb, "Perturb this kernel JSON");
  gen_cmd->add_option("--sigma", gen_args.sigma, "Noise standard deviation for --perturb");
  gen_cmd->add_option("--seed", gen_args.seed, "Seed for --perturb (default FAIRGATE_SEED or 0)");
  gen_cmd->add_option("--grid", gen_args.grid, "Comma-separated qualification levels");
  gen_cmd->add_option("-o,--output", gen_args.output, "Kernel path; a manifest is written next to it");

  IngestArgs ing_args;
  auto* ing_cmd = app.add_subcommand("ingest", "Build a population from a CSV table");
  ing_cmd->add_option("csv", ing_args.csv, "Input CSV")->required();
  ing_cmd->add_option("--group-column", ing_args.config.group_column, "Group label column");
  ing_cmd->add_option("--group-a", ing_args.group_a, "Label(s) mapped to group A")->required()->delimiter(',');
  ing_cmd->add_option("--group-b", ing_args.group_b, "Label(s) mapped to group B (default: all others)")
      ->delimiter(',');
  ing_cmd->add_option("--value-column", ing_args.config.value_column, "Raw score column");
  ing_cmd->add_option("--offset", ing_args.config.offset, "Subtracted from raw scores");
  ing_cmd->add_option("--bin-width", ing_args.config.bin_width, "Qualification bin width");
  ing_cmd->add_option("--zero-policy", ing_args.zero_policy, "error | nudge");
  ing_cmd->add_option("--nudge-epsilon", ing_args.config.nudge_epsilon, "Magnitude for nudged zeros");
  ing_cmd->add_option("-o,--output", ing_args.output, "Population JSON path (stdout if omitted)");
  ing_cmd->add_option("--manifest", ing_args.manifest, "Write a run manifest here");

  std::string example_population;
  std::string example_kernel;
  auto* ex_cmd = app.add_subcommand("example", "Emit the three-level example population and kernel");
  ex_cmd->add_option("--population", example_population, "Write the population JSON here");
  ex_cmd->add_option("--kernel", example_kernel, "Write the kernel JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*solve_cmd) run_solve(solve_args);
    if (*sweep_cmd) run_sweep(sweep_args);
    if (*sim_cmd) run_simulate(sim_args);
    if (*stat_cmd) run_stationary(stationary_kernel);
    if (*gen_cmd) run_gen(gen_args);
    if (*ing_cmd) run_ingest(ing_args);
    if (*ex_cmd) run_example(example_population, example_kernel);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return 0;
}
