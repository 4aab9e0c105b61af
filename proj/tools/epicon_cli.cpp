// Command-line front end for the consensus simulator.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "epicon/bounds.hpp"
#include "epicon/harness.hpp"

namespace fs = std::filesystem;
using namespace epicon;

namespace {

struct SimulateOptions {
  std::size_t n = 1000;
  std::size_t w0 = 40;
  std::size_t w1 = 50;
  std::string variant = "basic";
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;
  double epsilon = 1e-3;
  unsigned k1 = 2;
  unsigned k2 = 2;
  bool trace = false;
  std::string schedule = "async";
  std::string out;
  std::string format = "csv";
  std::size_t workers = 0;
};

struct PopulationOptions {
  std::size_t n = 100;
  std::size_t w0 = 40;
  std::size_t w1 = 50;
  std::string format = "text";
};

std::ofstream open_for_write(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "'");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

TrialConfig make_config(const SimulateOptions& o) {
  TrialConfig cfg;
  cfg.n = o.n;
  cfg.pop = Population(o.w0, o.w1);
  cfg.variant = Variant::parse(o.variant, o.epsilon, o.k1, o.k2);
  cfg.max_big_steps = o.max_steps;
  cfg.record_trajectory = o.trace;
  cfg.schedule = parse_schedule(o.schedule);
  cfg.validate();
  return cfg;
}

void print_summary(std::ostream& os, const ConfigReport& c) {
  os << c.label << ": n=" << c.config.n << " w0=" << c.config.pop.w0()
     << " w1=" << c.config.pop.w1() << " variant=" << c.config.variant.name()
     << " trials=" << c.results.size() << "\n  big steps mean=" << c.steps.mean
     << " median=" << c.steps.median << " sd=" << c.steps.stddev << " min=" << c.steps.min
     << " max=" << c.steps.max << "\n  decided 0: " << c.freq_zero << "  1: " << c.freq_one
     << "  timeout: " << c.freq_timeout << '\n';
}

void run_simulate(const SimulateOptions& o) {
  const TrialConfig cfg = make_config(o);
  if (o.trials < 1) throw ConfigError("--trials must be at least 1");
  const Format format = parse_format(o.format);

  auto results = run_batch(cfg, o.seed, o.trials, o.workers);
  const ConfigReport rep = summarize_batch("simulate", cfg, o.seed, std::move(results));
  print_summary(std::cout, rep);

  if (o.out.empty()) return;
  const fs::path path(o.out);
  auto out = open_for_write(path);
  if (format == Format::Json) out << report_json({"simulate", {rep}}) << '\n';
  else write_trials_csv(out, rep.results);
  finish(out, path);

  if (o.trace) {
    fs::path trace_path = path;
    trace_path.replace_filename(path.stem().string() + "_trajectory.csv");
    auto tout = open_for_write(trace_path);
    if (rep.results.size() == 1) {
      write_trajectory_csv(tout, std::span<const StepMetrics>(rep.results.front().trajectory));
    } else {
      write_trajectory_csv(tout, std::span<const AveragedStep>(rep.trajectory));
    }
    finish(tout, trace_path);
  }
}

void run_sweep(const std::string& config_path, const std::string& out_dir,
               const std::string& format) {
  const ExperimentSpec spec = load_experiment_spec(config_path);
  const ExperimentReport report = run_experiment(spec);
  for (const auto& c : report.configs) print_summary(std::cout, c);
  write_artifacts(spec, report, out_dir, parse_format(format));
}

void run_bounds(const PopulationOptions& o) {
  const BoundsRow row = bounds_row(o.w0, o.w1, o.n);
  if (o.format == "csv") write_bounds_csv(std::cout, std::span<const BoundsRow>(&row, 1));
  else if (o.format == "text") write_bounds_text(std::cout, row);
  else throw ConfigError("--format must be text or csv");
}

void run_oracle(const PopulationOptions& o, std::optional<std::size_t> start) {
  const OracleTable table = oracle_table(o.w0, o.w1, o.n, start);
  if (o.format == "csv") write_oracle_csv(std::cout, table);
  else if (o.format == "text") write_oracle_text(std::cout, table);
  else throw ConfigError("--format must be text or csv");
}

void run_compare(const SimulateOptions& o) {
  SimulateOptions b = o;
  b.variant = "basic";
  b.trace = false;
  SimulateOptions w = b;
  w.variant = "waiting";
  const Comparison cmp =
      compare_variants(make_config(b), make_config(w), o.seed, o.trials, o.workers);
  std::cout << "basic mean=" << cmp.basic_mean << " waiting mean=" << cmp.waiting_mean
            << " difference=" << cmp.mean_difference << '\n'
            << "waiting faster: " << cmp.waiting_faster << "  basic faster: " << cmp.basic_faster
            << "  ties: " << cmp.ties << "  sign test p=" << cmp.sign_test_p << '\n';
  if (o.out.empty()) return;
  const fs::path path(o.out);
  auto out = open_for_write(path);
  write_comparison_csv(out, cmp);
  finish(out, path);
}

void add_population(CLI::App* cmd, std::size_t& n, std::size_t& w0, std::size_t& w1) {
  cmd->add_option("--n", n, "strand length")->capture_default_str();
  cmd->add_option("--w0", w0, "number of 0-writers")->capture_default_str();
  cmd->add_option("--w1", w1, "number of 1-writers")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized consensus on a shared strand of tri-state cells"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "run seeded trials of one configuration");
  add_population(simulate, sim.n, sim.w0, sim.w1);
  simulate->add_option("--variant", sim.variant,
                       "naive, basic, waiting, self-stabilizing or active-inactive")
      ->capture_default_str();
  simulate->add_option("--trials", sim.trials)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "seed of the first trial")->capture_default_str();
  simulate->add_option("--max-steps", sim.max_steps, "big-step cap (0 = 100 n^2)")
      ->capture_default_str();
  simulate->add_option("--epsilon", sim.epsilon)->capture_default_str();
  simulate->add_option("--k1", sim.k1)->capture_default_str();
  simulate->add_option("--k2", sim.k2)->capture_default_str();
  simulate->add_flag("--trace", sim.trace, "also write <stem>_trajectory.csv");
  simulate->add_option("--schedule", sim.schedule, "async or rounds")->capture_default_str();
  simulate->add_option("--out", sim.out, "output file");
  simulate->add_option("--format", sim.format, "csv or json")->capture_default_str();
  simulate->add_option("--workers", sim.workers, "worker threads (0 = all cores)");

  std::string config_path, out_dir = ".", sweep_format = "csv";
  auto* sweep = app.add_subcommand("sweep", "run a declarative experiment file");
  sweep->add_option("--config", config_path, "experiment file")->required();
  sweep->add_option("--out-dir", out_dir)->capture_default_str();
  sweep->add_option("--format", sweep_format, "csv or json")->capture_default_str();

  PopulationOptions bnd;
  bnd.n = 1000;
  auto* bounds = app.add_subcommand("bounds", "print the analytic bounds for a population");
  add_population(bounds, bnd.n, bnd.w0, bnd.w1);
  bounds->add_option("--format", bnd.format, "text or csv")->capture_default_str();

  PopulationOptions orc;
  std::optional<std::size_t> start;
  auto* oracle = app.add_subcommand("oracle", "solve the absorbing chain exactly");
  add_population(oracle, orc.n, orc.w0, orc.w1);
  oracle->add_option("--start", start, "report a single start state");
  oracle->add_option("--format", orc.format, "text or csv")->capture_default_str();

  SimulateOptions cmp;
  cmp.trials = 300;
  auto* compare = app.add_subcommand("compare", "paired-seed basic vs waiting comparison");
  add_population(compare, cmp.n, cmp.w0, cmp.w1);
  compare->add_option("--trials", cmp.trials)->capture_default_str();
  compare->add_option("--seed", cmp.seed)->capture_default_str();
  compare->add_option("--max-steps", cmp.max_steps)->capture_default_str();
  compare->add_option("--schedule", cmp.schedule)->capture_default_str();
  compare->add_option("--out", cmp.out, "comparison CSV");
  compare->add_option("--workers", cmp.workers);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) run_simulate(sim);
    else if (*sweep) run_sweep(config_path, out_dir, sweep_format);
    else if (*bounds) run_bounds(bnd);
    else if (*oracle) run_oracle(orc, start);
    else if (*compare) run_compare(cmp);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
