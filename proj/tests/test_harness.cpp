#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "epicon/harness.hpp"

using namespace epicon;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

TrialConfig small_config(std::size_t w0 = 3, std::size_t w1 = 5) {
  TrialConfig c;
  c.n = 30;
  c.pop = Population(w0, w1);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("epicon_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("experiment file parsing") {
  std::istringstream in(R"(# two presets
name = demo
trials = 4
seed_base = 100
n = 40
outputs = trials, histogram , trajectory
workers = 2

[low]
w0 = 32
w1 = 50
[high]   # trailing comment
w0 = 40
w1 = 50
variant = waiting
seed_base = 7
)");
  const ExperimentSpec spec = parse_experiment_spec(in);
  CHECK(spec.name == "demo");
  CHECK(spec.trials == 4);
  CHECK(spec.workers == 2);
  REQUIRE(spec.configs.size() == 2);
  CHECK(spec.configs[0].label == "low");
  CHECK(spec.configs[0].config.n == 40);
  CHECK(spec.configs[0].config.pop == Population(32, 50));
  CHECK(spec.configs[0].seed_base == 100);
  CHECK(spec.configs[1].config.variant == Variant::waiting());
  CHECK(spec.configs[1].seed_base == 7);
  CHECK(spec.wants(Artifact::Histogram));
  CHECK(spec.wants(Artifact::Trajectory));
  CHECK_FALSE(spec.wants(Artifact::Comparison));
}

TEST_CASE("configurations get disjoint seed ranges by default") {
  std::istringstream in("trials = 3\nseed_base = 5\n[a]\n[b]\n[c]\n");
  const ExperimentSpec spec = parse_experiment_spec(in);
  REQUIRE(spec.configs.size() == 3);
  CHECK(spec.configs[0].seed_base == 5);
  CHECK(spec.configs[1].seed_base == 1000005);
  CHECK(spec.configs[2].seed_base == 2000005);
}

TEST_CASE("experiment file errors") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_experiment_spec(in);
  };
  CHECK_THROWS_AS(parse("trials = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("trials = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse("trials = many\n"), ConfigError);
  CHECK_THROWS_AS(parse("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse("[broken\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nn = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nw0 = 0\nw1 = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nvariant = lazy\n"), ConfigError);
  CHECK_THROWS_AS(parse("[a]\nepsilon = 2\nvariant = self-stabilizing\n"), ConfigError);
  CHECK_THROWS_AS(parse("outputs = pictures\n"), ConfigError);
  CHECK_THROWS_AS(load_experiment_spec("/nonexistent/epicon.cfg"), IoError);
}

TEST_CASE("summaries and histograms") {
  const std::vector<double> xs{1, 2, 3, 4, 10};
  const Summary s = summarize(xs);
  CHECK(s.mean == Approx(4.0));
  CHECK(s.median == Approx(3.0));
  CHECK(s.min == 1.0);
  CHECK(s.max == 10.0);
  CHECK(s.stddev == Approx(std::sqrt(12.5)));

  const Histogram h = make_histogram(xs, 3);
  CHECK(h.counts == std::vector<std::size_t>{3, 1, 1});  // bins [1,4) [4,7) [7,10]
  CHECK(h.lo == 1.0);
  CHECK(h.width == Approx(3.0));
  const Histogram flat = make_histogram(std::vector<double>{5, 5}, 30);
  CHECK(flat.counts.size() == 30);
  CHECK(flat.counts[0] == 2);
}

TEST_CASE("trajectory averaging pads short trials") {
  std::vector<TrialResult> rs(2);
  rs[0].trajectory = {{1, 0, 3, 0}, {2, 1, 1, 1}};
  rs[1].trajectory = {{0, 2, 2, 0}, {0, 3, 1, 0}, {0, 4, 0, 0}};
  const auto mean = average_trajectories(rs);
  REQUIRE(mean.size() == 3);
  CHECK(mean[0].zeros == Approx(0.5));
  CHECK(mean[2].zeros == Approx(1.0));  // padded with the final (2,1,1,1)
  CHECK(mean[2].ones == Approx(2.5));
  CHECK(mean[2].collisions == Approx(0.5));
}

TEST_CASE("a single trial is its own report") {
  const TrialConfig c = small_config();
  TrialConfig one = c;
  one.seed = 42;
  const TrialResult r = run_trial(one);
  const ConfigReport rep = summarize_batch("x", c, 42, run_batch(c, 42, 1));
  REQUIRE(rep.results.size() == 1);
  CHECK(rep.results[0] == r);
  CHECK(rep.steps.mean == static_cast<double>(r.big_steps));
  CHECK(rep.steps.median == static_cast<double>(r.big_steps));
  CHECK(rep.steps.stddev == 0.0);
  CHECK(rep.freq_zero + rep.freq_one + rep.freq_timeout == Approx(1.0));
  CHECK((r.decision == Decision::One ? rep.freq_one : rep.freq_zero) == 1.0);
}

TEST_CASE("batches keep seed order whatever the worker count") {
  const TrialConfig c = small_config();
  const auto a = run_batch(c, 10, 12, 1);
  const auto b = run_batch(c, 10, 12, 4);
  CHECK(a == b);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].seed == 10 + k);
}

TEST_CASE("decision frequencies sum to one") {
  TrialConfig c = small_config(4, 5);
  c.max_big_steps = 40;  // force some timeouts
  const ConfigReport rep = summarize_batch("x", c, 0, run_batch(c, 0, 50));
  CHECK(rep.freq_zero + rep.freq_one + rep.freq_timeout == Approx(1.0));
  CHECK(rep.timeouts > 0);
}

TEST_CASE("sign test") {
  CHECK(sign_test_p_value(10, 0) == Approx(2.0 * std::pow(0.5, 10)));
  CHECK(sign_test_p_value(0, 10) == Approx(2.0 * std::pow(0.5, 10)));
  CHECK(sign_test_p_value(5, 5) == 1.0);
  CHECK(sign_test_p_value(0, 0) == 1.0);
  // P(X <= 2 | n = 10) = 56 / 1024.
  CHECK(sign_test_p_value(8, 2) == Approx(2.0 * 56.0 / 1024.0));
}

TEST_CASE("comparing a variant with itself") {
  const TrialConfig c = small_config();
  const Comparison cmp = compare_variants(c, c, 0, 25);
  CHECK(cmp.rows.size() == 25);
  CHECK(cmp.mean_difference == 0.0);
  CHECK(cmp.ties == 25);
  CHECK(cmp.sign_test_p == 1.0);

  TrialConfig other = c;
  other.n = 31;
  CHECK_THROWS_AS(compare_variants(c, other, 0, 5), ConfigError);
  other = c;
  other.pop = Population(3, 6);
  CHECK_THROWS_AS(compare_variants(c, other, 0, 5), ConfigError);
  CHECK_THROWS_AS(compare_variants(c, c, 0, 0), ConfigError);
}

TEST_CASE("pearson correlation") {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9}, z{4, 3, 2, 1};
  CHECK(pearson(x, y) == Approx(1.0));
  CHECK(pearson(x, z) == Approx(-1.0));
}

TEST_CASE("trajectory experiment ends at consensus") {
  TrialConfig c = small_config(3, 6);
  c.n = 80;
  const TrajectoryReport rep = trajectory_experiment(c, 3, 8);
  REQUIRE_FALSE(rep.mean.empty());
  const AveragedStep& last = rep.mean.back();
  CHECK(last.zeros * last.ones == 0.0);
  CHECK(last.collisions == 0.0);
  CHECK(rep.early_phase_end <= rep.mean.size());
}

TEST_CASE("self-stabilization experiment") {
  TrialConfig c = small_config(2, 6);
  c.variant = Variant::self_stabilizing(0.01);
  const Strand zeros = Strand::parse(std::string(30, '0'));
  const SelfStabilizationReport rep = self_stabilization_experiment(c, zeros, 0, 10);
  CHECK(rep.target == Value::One);
  CHECK(rep.reached == 10);
  CHECK(rep.reached_fraction() == 1.0);

  // Already at the majority value: done immediately.
  const SelfStabilizationReport stay =
      self_stabilization_experiment(c, Strand::parse(std::string(30, '1')), 0, 5);
  CHECK(stay.reached == 5);

  TrialConfig basic = small_config(2, 6);
  CHECK_THROWS_AS(self_stabilization_experiment(basic, zeros, 0, 1), ConfigError);
  CHECK_THROWS_AS(self_stabilization_experiment(c, Strand(5), 0, 1), ConfigError);
}

TEST_CASE("oracle table") {
  const OracleTable t = oracle_table(10, 30, 20);
  CHECK(t.rows.size() == 21);
  CHECK(t.rows[0].absorption_prob == 0.0);
  CHECK(t.rows[20].absorption_prob == 1.0);
  bool flagged = false;
  for (const auto& r : t.rows) {
    CHECK(std::abs(r.absorption_prob - r.closed_form_prob) < 1e-9);
    flagged = flagged || r.time_discrepancy;
  }
  CHECK(flagged);  // ties present, so the closed-form time differs
  CHECK(oracle_table(10, 30, 20, 4).rows.size() == 1);
  CHECK_THROWS_AS(oracle_table(5, 5, 20), ConfigError);
  CHECK_THROWS_AS(oracle_table(1, 3, 5000), ConfigError);
  CHECK_THROWS_AS(oracle_table(1, 3, 10, 11), ConfigError);
}

TEST_CASE("bounds rows") {
  const BoundsRow r = bounds_row(10, 30, 1000);
  REQUIRE(r.theorem3);
  CHECK(*r.theorem3 == Approx(6.4e6));
  REQUIRE(r.corollary1);
  REQUIRE(r.exact_decision);
  CHECK_FALSE(bounds_row(50, 40, 10).theorem2);
  CHECK_FALSE(bounds_row(40, 40, 10).exact_decision);
}

TEST_CASE("csv layouts") {
  const TrialConfig c = small_config();
  TrialConfig traced = c;
  traced.record_trajectory = true;
  const auto results = run_batch(traced, 0, 3);

  std::ostringstream trials, traj, avg, cmp, hist, bnd, orc;
  write_trials_csv(trials, results);
  write_trajectory_csv(traj, std::span<const StepMetrics>(results[0].trajectory));
  const auto mean = average_trajectories(results);
  write_trajectory_csv(avg, std::span<const AveragedStep>(mean));
  write_comparison_csv(cmp, compare_variants(c, c, 0, 4));
  write_histogram_csv(hist, make_histogram(std::vector<double>{1, 2, 3}));
  const BoundsRow row = bounds_row(40, 50, 100);
  write_bounds_csv(bnd, std::span<const BoundsRow>(&row, 1));
  write_oracle_csv(orc, oracle_table(1, 3, 5));

  CHECK(first_line(trials.str()) == "seed,decision,big_steps");
  CHECK(first_line(traj.str()) == "step,zeros,ones,empties,collisions");
  CHECK(first_line(avg.str()) == "step,zeros,ones,empties,collisions");
  CHECK(first_line(cmp.str()) == "seed,basic_steps,waiting_steps");
  CHECK(first_line(hist.str()) == "bin_lo,bin_hi,count");
  CHECK(first_line(bnd.str()).rfind("n,w0,w1,P,Q,R", 0) == 0);
  CHECK(first_line(orc.str()) == "i,h,f_closed,t,e_closed,time_discrepancy");

  // One data row per trial / step / comparison pair.
  auto rows = [](const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')) - 1;
  };
  CHECK(rows(trials.str()) == 3);
  CHECK(rows(traj.str()) == results[0].big_steps);
  CHECK(rows(cmp.str()) == 4);
  CHECK(rows(hist.str()) == 30);

  std::istringstream line(trials.str());
  std::string header, first;
  std::getline(line, header);
  std::getline(line, first);
  CHECK(first == "0," + std::string(to_string(results[0].decision)) + "," +
                     std::to_string(results[0].big_steps));
}

TEST_CASE("reruns produce identical files") {
  std::istringstream in(
      "name = rerun\ntrials = 5\nn = 30\n"
      "outputs = trials, histogram, trajectory, comparison, bounds-table\n"
      "[low]\nw0 = 2\nw1 = 5\n[high]\nw0 = 4\nw1 = 5\n");
  const ExperimentSpec spec = parse_experiment_spec(in);
  const fs::path a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  write_artifacts(spec, run_experiment(spec), a, Format::Json);
  ExperimentSpec threaded = spec;
  threaded.workers = 3;
  write_artifacts(threaded, run_experiment(threaded), b, Format::Json);

  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    ++files;
    const fs::path twin = b / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(slurp(entry.path()) == slurp(twin));
  }
  CHECK(files == 10);  // 4 per config, the bounds table and the json report
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unwritable output is an I/O error") {
  std::istringstream in("trials = 1\nn = 10\n[a]\n");
  const ExperimentSpec spec = parse_experiment_spec(in);
  const ExperimentReport rep = run_experiment(spec);
  CHECK_THROWS_AS(write_artifacts(spec, rep, "/proc/epicon/nope", Format::Csv), IoError);
}

TEST_CASE("json report") {
  std::istringstream in("name = j\ntrials = 2\nn = 20\n[only]\nw0 = 3\nw1 = 9\n");
  const ExperimentSpec spec = parse_experiment_spec(in);
  const std::string json = report_json(run_experiment(spec));
  CHECK(json.find("\"label\": \"only\"") != std::string::npos);
  CHECK(json.find("\"p\": 0.75") != std::string::npos);
  CHECK(json.find("\"majority_frequency\"") != std::string::npos);
}
