#include "epicon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "epicon/chain_oracle.hpp"

namespace epicon {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || value.front() == '-') throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + value + "'");
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
  }
}

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
  std::size_t w = requested == 0 ? std::thread::hardware_concurrency() : requested;
  return std::clamp<std::size_t>(w, 1, std::max<std::size_t>(jobs, 1));
}

// Runs job(k) for k in [0, count) on a small pool; job writes its own slot.
template <typename Job>
void parallel_for(std::size_t count, std::size_t workers, Job job) {
  const std::size_t pool = resolve_workers(workers, count);
  if (pool == 1) {
    for (std::size_t k = 0; k < count; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  threads.reserve(pool);
  for (std::size_t t = 0; t < pool; ++t) {
    threads.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) job(k);
    });
  }
  for (auto& th : threads) th.join();
}

// Shortest round-trip representation keeps CSV output byte-stable.
std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::vector<double> step_counts(std::span<const TrialResult> results) {
  std::vector<double> xs;
  xs.reserve(results.size());
  for (const auto& r : results) xs.push_back(static_cast<double>(r.big_steps));
  return xs;
}

void apply_key(TrialConfig& cfg, std::size_t& w0, std::size_t& w1, std::string& variant,
               double& epsilon, unsigned& k1, unsigned& k2, const std::string& key,
               const std::string& value) {
  if (key == "n") cfg.n = parse_uint(key, value);
  else if (key == "w0") w0 = parse_uint(key, value);
  else if (key == "w1") w1 = parse_uint(key, value);
  else if (key == "variant") variant = value;
  else if (key == "epsilon") epsilon = parse_real(key, value);
  else if (key == "k1") k1 = static_cast<unsigned>(parse_uint(key, value));
  else if (key == "k2") k2 = static_cast<unsigned>(parse_uint(key, value));
  else if (key == "max_big_steps") cfg.max_big_steps = parse_uint(key, value);
  else if (key == "schedule") {
    try {
      cfg.schedule = parse_schedule(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "record_trajectory") {
    cfg.record_trajectory = value == "true" || value == "1";
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

Artifact parse_artifact(std::string_view name) {
  if (name == "trials") return Artifact::Trials;
  if (name == "histogram") return Artifact::Histogram;
  if (name == "trajectory") return Artifact::Trajectory;
  if (name == "comparison") return Artifact::Comparison;
  if (name == "bounds-table") return Artifact::BoundsTable;
  throw ConfigError("unknown output '" + std::string(name) + "'");
}

const char* to_string(Artifact a) noexcept {
  switch (a) {
    case Artifact::Trials:
      return "trials";
    case Artifact::Histogram:
      return "histogram";
    case Artifact::Trajectory:
      return "trajectory";
    case Artifact::Comparison:
      return "comparison";
    case Artifact::BoundsTable:
      return "bounds-table";
  }
  return "unknown";
}

Format parse_format(std::string_view name) {
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

void ExperimentSpec::validate() const {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (configs.empty()) throw ConfigError("experiment '" + name + "' has no configurations");
  for (const auto& c : configs) {
    try {
      c.config.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config '" + c.label + "': " + e.what());
    }
  }
}

bool ExperimentSpec::wants(Artifact a) const {
  return std::find(outputs.begin(), outputs.end(), a) != outputs.end();
}

ExperimentSpec parse_experiment_spec(std::istream& in) {
  ExperimentSpec spec;
  spec.configs.clear();
  std::map<std::string, std::string> globals;
  struct Section {
    std::string label;
    std::vector<std::pair<std::string, std::string>> keys;
  };
  std::vector<Section> sections;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string text = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']' || text.size() < 3) {
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      }
      sections.push_back({trim(std::string_view(text).substr(1, text.size() - 2)), {}});
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(std::string_view(text).substr(0, eq));
    std::string value = trim(std::string_view(text).substr(eq + 1));
    if (sections.empty()) globals[key] = value;
    else sections.back().keys.emplace_back(std::move(key), std::move(value));
  }

  std::uint64_t seed_base = 0;
  std::map<std::string, std::string> defaults;
  for (const auto& [key, value] : globals) {
    if (key == "name") spec.name = value;
    else if (key == "trials") spec.trials = parse_uint(key, value);
    else if (key == "seed_base") seed_base = parse_uint(key, value);
    else if (key == "workers") spec.workers = parse_uint(key, value);
    else if (key == "outputs") {
      spec.outputs.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!trim(item).empty()) spec.outputs.push_back(parse_artifact(trim(item)));
      }
    } else {
      defaults[key] = value;  // per-config defaults such as n or variant
    }
  }
  if (sections.empty()) sections.push_back({spec.name, {}});

  for (std::size_t idx = 0; idx < sections.size(); ++idx) {
    const Section& sec = sections[idx];
    TrialConfig cfg;
    std::size_t w0 = 40, w1 = 50;
    std::string variant = "basic";
    double epsilon = 1e-3;
    unsigned k1 = 2, k2 = 2;
    // Independent seed ranges per configuration unless a section sets its own.
    std::uint64_t config_seed = seed_base + idx * 1'000'000ULL;
    auto apply = [&](const std::string& key, const std::string& value) {
      if (key == "seed_base") config_seed = parse_uint(key, value);
      else apply_key(cfg, w0, w1, variant, epsilon, k1, k2, key, value);
    };
    for (const auto& [key, value] : defaults) apply(key, value);
    for (const auto& [key, value] : sec.keys) apply(key, value);
    try {
      cfg.pop = Population(w0, w1);
      cfg.variant = Variant::parse(variant, epsilon, k1, k2);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config '" + sec.label + "': " + e.what());
    }
    spec.configs.push_back({sec.label, cfg, config_seed});
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  try {
    return parse_experiment_spec(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

Summary summarize(std::span<const double> xs) {
  Summary s;
  if (xs.empty()) return s;
  const double count = static_cast<double>(xs.size());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / count;
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  s.min = sorted.front();
  s.max = sorted.back();
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (count - 1.0));
  }
  return s;
}

Histogram make_histogram(std::span<const double> xs, std::size_t bins) {
  Histogram h;
  h.counts.assign(bins, 0);
  if (xs.empty() || bins == 0) return h;
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  h.lo = *lo;
  h.width = *hi > *lo ? (*hi - *lo) / static_cast<double>(bins) : 1.0;
  for (double x : xs) {
    auto b = static_cast<std::size_t>((x - h.lo) / h.width);
    h.counts[std::min(b, bins - 1)]++;
  }
  return h;
}

std::vector<AveragedStep> average_trajectories(std::span<const TrialResult> results) {
  std::size_t longest = 0;
  for (const auto& r : results) longest = std::max(longest, r.trajectory.size());
  std::vector<AveragedStep> mean(longest);
  std::size_t contributing = 0;
  for (const auto& r : results) {
    if (r.trajectory.empty()) continue;
    ++contributing;
    for (std::size_t k = 0; k < longest; ++k) {
      const StepMetrics& m = r.trajectory[std::min(k, r.trajectory.size() - 1)];
      mean[k].zeros += static_cast<double>(m.zeros);
      mean[k].ones += static_cast<double>(m.ones);
      mean[k].empties += static_cast<double>(m.empties);
      mean[k].collisions += static_cast<double>(m.collisions);
    }
  }
  if (contributing > 0) {
    const double c = static_cast<double>(contributing);
    for (auto& m : mean) {
      m.zeros /= c;
      m.ones /= c;
      m.empties /= c;
      m.collisions /= c;
    }
  }
  return mean;
}

BoundsRow bounds_row(std::size_t w0, std::size_t w1, std::size_t n) {
  BoundsRow row{n, w0, w1, update_step_probs(w0, w1), {}, {}, {}, {}};
  if (w1 > w0) {
    if (w0 > 0) {
      const MajorityBound mb = majority_prob_lower_bound(w0, w1, n);
      row.theorem2 = mb.theorem2;
      row.corollary1 = mb.corollary1;
    }
    if (n >= 2) row.theorem3 = expected_steps_upper_bound(w0, w1, n);
  }
  if (w0 != w1 && n <= kMaxOracleStates) row.exact_decision = exact_decision_prob(w0, w1, n);
  return row;
}

std::vector<TrialResult> run_batch(const TrialConfig& config, std::uint64_t seed_base,
                                   std::size_t trials, std::size_t workers) {
  std::vector<TrialResult> results(trials);
  parallel_for(trials, workers, [&](std::size_t k) {
    TrialConfig c = config;
    c.seed = seed_base + k;
    results[k] = run_trial(c);
  });
  return results;
}

ConfigReport summarize_batch(std::string label, const TrialConfig& config,
                             std::uint64_t seed_base, std::vector<TrialResult> results) {
  ConfigReport rep;
  rep.label = std::move(label);
  rep.config = config;
  rep.seed_base = seed_base;
  const std::vector<double> steps = step_counts(results);
  rep.steps = summarize(steps);
  rep.histogram = make_histogram(steps);
  std::size_t zeros = 0, ones = 0;
  for (const auto& r : results) {
    if (r.decision == Decision::Zero) ++zeros;
    else if (r.decision == Decision::One) ++ones;
    else ++rep.timeouts;
  }
  const double total = results.empty() ? 1.0 : static_cast<double>(results.size());
  rep.freq_zero = static_cast<double>(zeros) / total;
  rep.freq_one = static_cast<double>(ones) / total;
  rep.freq_timeout = static_cast<double>(rep.timeouts) / total;
  if (config.record_trajectory) rep.trajectory = average_trajectories(results);
  rep.requirements = check_requirements(results, config.pop, config.n);
  rep.bounds = bounds_row(config.pop.w0(), config.pop.w1(), config.n);
  rep.results = std::move(results);
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentReport report{spec.name, {}};
  for (const ConfigTemplate& tmpl : spec.configs) {
    TrialConfig cfg = tmpl.config;
    if (spec.wants(Artifact::Trajectory)) cfg.record_trajectory = true;
    auto results = run_batch(cfg, tmpl.seed_base, spec.trials, spec.workers);
    report.configs.push_back(summarize_batch(tmpl.label, cfg, tmpl.seed_base, std::move(results)));
  }
  return report;
}

double sign_test_p_value(std::size_t successes, std::size_t failures) {
  const std::size_t m = successes + failures;
  if (m == 0) return 1.0;
  const std::size_t k = std::min(successes, failures);
  const double log_half = static_cast<double>(m) * std::log(0.5);
  const double lg_m = std::lgamma(static_cast<double>(m) + 1.0);
  double tail = 0.0;
  for (std::size_t j = 0; j <= k; ++j) {
    const double jj = static_cast<double>(j);
    tail += std::exp(lg_m - std::lgamma(jj + 1.0) -
                     std::lgamma(static_cast<double>(m) - jj + 1.0) + log_half);
  }
  return std::min(1.0, 2.0 * tail);
}

Comparison compare_variants(const TrialConfig& basic, const TrialConfig& waiting,
                            std::uint64_t seed_base, std::size_t trials, std::size_t workers) {
  if (basic.n != waiting.n || !(basic.pop == waiting.pop) ||
      basic.schedule != waiting.schedule || basic.step_cap() != waiting.step_cap()) {
    throw ConfigError("compared configurations must share n, population, schedule and step cap");
  }
  if (trials < 1) throw ConfigError("trials must be at least 1");

  const auto a = run_batch(basic, seed_base, trials, workers);
  const auto b = run_batch(waiting, seed_base, trials, workers);

  Comparison cmp;
  cmp.rows.reserve(trials);
  double sum_a = 0.0, sum_b = 0.0;
  for (std::size_t k = 0; k < trials; ++k) {
    cmp.rows.push_back({a[k].seed, a[k].big_steps, b[k].big_steps});
    sum_a += static_cast<double>(a[k].big_steps);
    sum_b += static_cast<double>(b[k].big_steps);
    if (b[k].big_steps < a[k].big_steps) ++cmp.waiting_faster;
    else if (b[k].big_steps > a[k].big_steps) ++cmp.basic_faster;
    else ++cmp.ties;
  }
  const double count = static_cast<double>(trials);
  cmp.basic_mean = sum_a / count;
  cmp.waiting_mean = sum_b / count;
  cmp.mean_difference = cmp.waiting_mean - cmp.basic_mean;
  cmp.sign_test_p = sign_test_p_value(cmp.waiting_faster, cmp.basic_faster);
  return cmp;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t m = std::min(x.size(), y.size());
  if (m < 2) return 0.0;
  const double mx = std::accumulate(x.begin(), x.begin() + m, 0.0) / static_cast<double>(m);
  const double my = std::accumulate(y.begin(), y.begin() + m, 0.0) / static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

TrajectoryReport trajectory_experiment(const TrialConfig& config, std::uint64_t seed_base,
                                       std::size_t trials, std::size_t workers) {
  TrialConfig cfg = config;
  cfg.record_trajectory = true;
  const auto results = run_batch(cfg, seed_base, trials, workers);

  TrajectoryReport rep;
  rep.mean = average_trajectories(results);
  const std::size_t len = rep.mean.size();
  const double n = static_cast<double>(cfg.n);

  // Early phase: from the first step with (on average) under 1% empties
  // until mean collisions fall below half their post-fill peak.
  std::size_t begin = 0;
  while (begin < len && rep.mean[begin].empties > 0.01 * n) ++begin;
  double peak = 0.0;
  for (std::size_t k = begin; k < len; ++k) peak = std::max(peak, rep.mean[k].collisions);
  std::size_t end = begin;
  while (end < len && rep.mean[end].collisions >= 0.5 * peak) ++end;
  std::vector<double> zs, cs;
  for (std::size_t k = begin; k < end; ++k) {
    zs.push_back(rep.mean[k].zeros);
    cs.push_back(rep.mean[k].collisions);
  }
  rep.early_phase_end = end;
  rep.early_correlation = pearson(zs, cs);

  // Searched only after the fill, where few collisions actually means something.
  for (std::size_t k = begin; k < len; ++k) {
    const AveragedStep& m = rep.mean[k];
    if (m.zeros > 0.05 * n && m.collisions < 0.1 * m.zeros) {
      rep.low_collision_step = k + 1;
      break;
    }
  }
  return rep;
}

SelfStabilizationReport self_stabilization_experiment(const TrialConfig& config,
                                                      const Strand& initial,
                                                      std::uint64_t seed_base,
                                                      std::size_t trials,
                                                      std::size_t workers) {
  if (config.variant.kind != VariantKind::SelfStabilizing) {
    throw ConfigError("self-stabilization experiment needs the self-stabilizing variant");
  }
  if (initial.size() != config.n) throw ConfigError("initial strand length does not match n");
  if (config.pop.w0() == config.pop.w1()) {
    throw ConfigError("self-stabilization target needs a writer majority");
  }
  SelfStabilizationReport rep;
  rep.target = config.pop.w1() > config.pop.w0() ? Value::One : Value::Zero;
  rep.trials = trials;
  rep.results.resize(trials);
  parallel_for(trials, workers, [&](std::size_t k) {
    TrialConfig c = config;
    c.seed = seed_base + k;
    Trial trial(c, initial);
    rep.results[k] = trial.run_until(rep.target);
  });
  for (const auto& r : rep.results) {
    if (r.decision == decision_of(rep.target)) ++rep.reached;
  }
  return rep;
}

OracleTable oracle_table(std::size_t w0, std::size_t w1, std::size_t n,
                         std::optional<std::size_t> start) {
  if (w0 == w1) throw ConfigError("oracle needs w0 != w1");
  if (w0 == 0 || w1 == 0) throw ConfigError("oracle needs both writer kinds present");
  if (n < 1 || n > kMaxOracleStates) {
    throw ConfigError("oracle needs 1 <= n <= " + std::to_string(kMaxOracleStates));
  }
  if (start && *start > n) throw ConfigError("start exceeds n");

  const BirthDeathChain chain = BirthDeathChain::for_population(w0, w1, n);
  const ChainParams cp = update_step_probs(w0, w1);
  const GamblerParams gp(cp.P, cp.Q, cp.R);
  const auto probs = absorption_probs(chain).values;
  const auto times = absorption_times(chain).values;

  OracleTable table{n, w0, w1, cp, {}, exact_decision_prob(w0, w1, n)};
  const std::size_t lo = start ? *start : 0;
  const std::size_t hi = start ? *start : n;
  for (std::size_t i = lo; i <= hi; ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    const double t = times(idx);
    const double e = gambler_expected_time(i, n, gp);
    const bool gap = std::abs(t - e) > 1e-9 * std::max(1.0, std::abs(t));
    table.rows.push_back({i, probs(idx), lemma3_prob(i, n, w0, w1), t, e, gap});
  }
  return table;
}

void write_trials_csv(std::ostream& out, std::span<const TrialResult> results) {
  out << "seed,decision,big_steps\n";
  for (const auto& r : results) {
    out << r.seed << ',' << to_string(r.decision) << ',' << r.big_steps << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const StepMetrics> steps) {
  out << "step,zeros,ones,empties,collisions\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& m = steps[k];
    out << k + 1 << ',' << m.zeros << ',' << m.ones << ',' << m.empties << ',' << m.collisions
        << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, std::span<const AveragedStep> steps) {
  out << "step,zeros,ones,empties,collisions\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& m = steps[k];
    out << k + 1 << ',' << fmt(m.zeros) << ',' << fmt(m.ones) << ',' << fmt(m.empties) << ','
        << fmt(m.collisions) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const Comparison& cmp) {
  out << "seed,basic_steps,waiting_steps\n";
  for (const auto& r : cmp.rows) {
    out << r.seed << ',' << r.basic_steps << ',' << r.waiting_steps << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double lo = h.lo + h.width * static_cast<double>(b);
    out << fmt(lo) << ',' << fmt(lo + h.width) << ',' << h.counts[b] << '\n';
  }
}

void write_bounds_csv(std::ostream& out, std::span<const BoundsRow> rows) {
  out << "n,w0,w1,P,Q,R,theorem2,corollary1,theorem3,exact_decision\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.w0 << ',' << r.w1 << ',' << fmt(r.chain.P) << ',' << fmt(r.chain.Q)
        << ',' << fmt(r.chain.R) << ',' << fmt_opt(r.theorem2) << ',' << fmt_opt(r.corollary1)
        << ',' << fmt_opt(r.theorem3) << ',' << fmt_opt(r.exact_decision) << '\n';
  }
}

void write_oracle_csv(std::ostream& out, const OracleTable& t) {
  out << "i,h,f_closed,t,e_closed,time_discrepancy\n";
  for (const auto& r : t.rows) {
    out << r.i << ',' << fmt(r.absorption_prob) << ',' << fmt(r.closed_form_prob) << ','
        << fmt(r.absorption_time) << ',' << fmt(r.closed_form_time) << ','
        << (r.time_discrepancy ? 1 : 0) << '\n';
  }
}

void write_bounds_text(std::ostream& out, const BoundsRow& r) {
  auto line = [&](const char* label, const std::string& value) {
    out << std::left << std::setw(34) << label << (value.empty() ? "n/a" : value) << '\n';
  };
  line("n", std::to_string(r.n));
  line("w0 / w1", std::to_string(r.w0) + " / " + std::to_string(r.w1));
  line("update-step P / Q / R",
       fmt(r.chain.P) + " / " + fmt(r.chain.Q) + " / " + fmt(r.chain.R));
  line("majority lower bound", fmt_opt(r.theorem2));
  line("strong-majority bound (ratio>=3)", fmt_opt(r.corollary1));
  line("expected big steps upper bound", fmt_opt(r.theorem3));
  line("exact decision prob (oracle)", fmt_opt(r.exact_decision));
}

void write_oracle_text(std::ostream& out, const OracleTable& t) {
  out << "n=" << t.n << " w0=" << t.w0 << " w1=" << t.w1 << " P=" << fmt(t.chain.P)
      << " Q=" << fmt(t.chain.Q) << " R=" << fmt(t.chain.R) << '\n';
  out << "exact decision prob: " << fmt(t.exact_decision) << "\n\n";
  out << std::setw(6) << "i" << std::setw(18) << "h (solve)" << std::setw(18) << "f (closed)"
      << std::setw(18) << "t (solve)" << std::setw(18) << "E (closed)" << "  flag\n";
  std::size_t flagged = 0;
  for (const auto& r : t.rows) {
    out << std::setw(6) << r.i << std::setw(18) << fmt(r.absorption_prob) << std::setw(18)
        << fmt(r.closed_form_prob) << std::setw(18) << fmt(r.absorption_time) << std::setw(18)
        << fmt(r.closed_form_time) << (r.time_discrepancy ? "  *" : "") << '\n';
    if (r.time_discrepancy) ++flagged;
  }
  if (flagged > 0) {
    out << "\n* closed-form expected time differs from the linear solve by the factor 1/(P+Q) = "
        << fmt(1.0 / (t.chain.P + t.chain.Q)) << '\n';
  }
}

std::string report_json(const ExperimentReport& report, bool include_trials) {
  using nlohmann::json;
  json j;
  j["name"] = report.name;
  j["configs"] = json::array();
  for (const auto& c : report.configs) {
    json jc;
    jc["label"] = c.label;
    jc["n"] = c.config.n;
    jc["w0"] = c.config.pop.w0();
    jc["w1"] = c.config.pop.w1();
    jc["p"] = std::round(100.0 * static_cast<double>(c.config.pop.w1()) /
                         static_cast<double>(c.config.pop.w0() + c.config.pop.w1())) /
              100.0;
    jc["variant"] = c.config.variant.name();
    jc["schedule"] = to_string(c.config.schedule);
    jc["seed_base"] = c.seed_base;
    jc["trials"] = c.results.size();
    jc["big_steps"] = {{"mean", c.steps.mean},     {"median", c.steps.median},
                       {"stddev", c.steps.stddev}, {"min", c.steps.min},
                       {"max", c.steps.max}};
    jc["decision_frequency"] = {
        {"0", c.freq_zero}, {"1", c.freq_one}, {"timeout", c.freq_timeout}};
    jc["validity_violations"] = c.requirements.validity_violations;
    if (c.requirements.majority_frequency) {
      jc["majority_frequency"] = *c.requirements.majority_frequency;
    }
    json jb;
    jb["P"] = c.bounds.chain.P;
    jb["Q"] = c.bounds.chain.Q;
    jb["R"] = c.bounds.chain.R;
    if (c.bounds.theorem2) jb["majority_lower_bound"] = *c.bounds.theorem2;
    if (c.bounds.corollary1) jb["strong_majority_bound"] = *c.bounds.corollary1;
    if (c.bounds.theorem3) jb["expected_steps_upper_bound"] = *c.bounds.theorem3;
    if (c.bounds.exact_decision) jb["exact_decision_prob"] = *c.bounds.exact_decision;
    jc["bounds"] = jb;
    jc["histogram"] = {{"lo", c.histogram.lo},
                       {"width", c.histogram.width},
                       {"counts", c.histogram.counts}};
    if (include_trials) {
      json jt = json::array();
      for (const auto& r : c.results) {
        jt.push_back({{"seed", r.seed}, {"decision", to_string(r.decision)},
                      {"big_steps", r.big_steps}});
      }
      jc["results"] = jt;
    }
    if (!c.trajectory.empty()) {
      json tr = json::array();
      for (std::size_t k = 0; k < c.trajectory.size(); ++k) {
        const auto& m = c.trajectory[k];
        tr.push_back({{"step", k + 1},
                      {"zeros", m.zeros},
                      {"ones", m.ones},
                      {"empties", m.empties},
                      {"collisions", m.collisions}});
      }
      jc["trajectory"] = tr;
    }
    j["configs"].push_back(jc);
  }
  return j.dump(2);
}

void write_artifacts(const ExperimentSpec& spec, const ExperimentReport& report,
                     const std::filesystem::path& dir, Format format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());

  auto emit = [&](const std::string& file, auto&& body) {
    const auto path = dir / file;
    auto out = open_output(path);
    body(out);
    check_written(out, path);
  };

  std::vector<BoundsRow> bounds;
  for (std::size_t idx = 0; idx < report.configs.size(); ++idx) {
    const ConfigReport& c = report.configs[idx];
    if (spec.wants(Artifact::Trials)) {
      emit(c.label + "_trials.csv", [&](std::ostream& o) { write_trials_csv(o, c.results); });
    }
    if (spec.wants(Artifact::Histogram)) {
      emit(c.label + "_histogram.csv",
           [&](std::ostream& o) { write_histogram_csv(o, c.histogram); });
    }
    if (spec.wants(Artifact::Trajectory) && !c.trajectory.empty()) {
      emit(c.label + "_trajectory.csv", [&](std::ostream& o) {
        write_trajectory_csv(o, std::span<const AveragedStep>(c.trajectory));
      });
    }
    if (spec.wants(Artifact::Comparison)) {
      TrialConfig basic = c.config;
      basic.variant = Variant::basic();
      basic.record_trajectory = false;
      TrialConfig waiting = basic;
      waiting.variant = Variant::waiting();
      const Comparison cmp =
          compare_variants(basic, waiting, c.seed_base, c.results.size(), spec.workers);
      emit(c.label + "_comparison.csv",
           [&](std::ostream& o) { write_comparison_csv(o, cmp); });
    }
    bounds.push_back(c.bounds);
  }
  if (spec.wants(Artifact::BoundsTable)) {
    emit(report.name + "_bounds.csv", [&](std::ostream& o) { write_bounds_csv(o, bounds); });
  }
  if (format == Format::Json) {
    emit(report.name + ".json", [&](std::ostream& o) { o << report_json(report) << '\n'; });
  }
}

}  // namespace epicon
