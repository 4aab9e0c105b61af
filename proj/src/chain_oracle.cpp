#include "epicon/chain_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "epicon/rng.hpp"

namespace epicon {

namespace {

using Eigen::Index;
using Eigen::VectorXd;

struct InteriorSystem {
  VectorXd lower, diag, upper;
};

// Rows for interior states 1..n-1 of (up+down) x_i - up x_{i+1} - down x_{i-1}.
InteriorSystem interior_system(const BirthDeathChain& c) {
  const Index m = static_cast<Index>(c.n) - 1;
  InteriorSystem s{VectorXd::Constant(m, -c.down), VectorXd::Constant(m, c.up + c.down),
                   VectorXd::Constant(m, -c.up)};
  return s;
}

double residual_of(const InteriorSystem& s, const VectorXd& x, const VectorXd& b) {
  const Index m = s.diag.size();
  if (m == 0) return 0.0;
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * m));
  for (Index k = 0; k < m; ++k) {
    entries.emplace_back(k, k, s.diag(k));
    if (k > 0) entries.emplace_back(k, k - 1, s.lower(k));
    if (k + 1 < m) entries.emplace_back(k, k + 1, s.upper(k));
  }
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(entries.begin(), entries.end());
  return (a * x - b).cwiseAbs().maxCoeff();
}

ChainSolution embed(const VectorXd& interior, double low, double high, double residual) {
  const Index m = interior.size();
  ChainSolution out;
  out.values.resize(m + 2);
  out.values(0) = low;
  out.values.segment(1, m) = interior;
  out.values(m + 1) = high;
  out.residual = residual;
  return out;
}

void require_solvable(const BirthDeathChain& c) {
  if (c.n > kMaxOracleStates) {
    throw std::invalid_argument("oracle supports n <= " + std::to_string(kMaxOracleStates));
  }
  if (c.up == 0.0 && c.down == 0.0) {
    throw DegenerateChainError("chain never leaves its start state (up = down = 0)");
  }
}

}  // namespace

BirthDeathChain::BirthDeathChain(std::size_t n_, double up_, double down_, double stay_)
    : n(n_), up(up_), down(down_), stay(stay_) {
  if (n < 1) throw std::invalid_argument("chain needs at least states 0 and 1");
  if (up < 0.0 || down < 0.0 || stay < 0.0) {
    throw std::invalid_argument("chain probabilities must be nonnegative");
  }
  if (std::abs(up + down + stay - 1.0) > 1e-12) {
    throw std::invalid_argument("chain probabilities must sum to 1");
  }
}

BirthDeathChain BirthDeathChain::for_population(std::size_t w0, std::size_t w1,
                                                std::size_t n) {
  if (w0 + w1 == 0) throw std::invalid_argument("population needs at least one writer");
  const double total = static_cast<double>(w0 + w1);
  const double a = static_cast<double>(w1) / total;
  const double b = static_cast<double>(w0) / total;
  return {n, a * a, b * b, 1.0 - a * a - b * b};
}

ChainSolution absorption_probs(const BirthDeathChain& c) {
  require_solvable(c);
  const Index m = static_cast<Index>(c.n) - 1;
  // A one-sided chain is forced toward the side it can move to.
  if (c.down == 0.0) return embed(VectorXd::Ones(m), 0.0, 1.0, 0.0);
  if (c.up == 0.0) return embed(VectorXd::Zero(m), 0.0, 1.0, 0.0);

  const InteriorSystem s = interior_system(c);
  VectorXd b = VectorXd::Zero(m);
  if (m > 0) b(m - 1) = c.up;  // h_n = 1
  const VectorXd x = solve_tridiagonal<double>(s.lower, s.diag, s.upper, b);
  return embed(x, 0.0, 1.0, residual_of(s, x, b));
}

ChainSolution absorption_times(const BirthDeathChain& c) {
  require_solvable(c);
  const Index m = static_cast<Index>(c.n) - 1;
  if (c.degenerate()) {
    VectorXd t(m);
    for (Index k = 0; k < m; ++k) {
      const double i = static_cast<double>(k + 1);
      t(k) = c.down == 0.0 ? (static_cast<double>(c.n) - i) / c.up : i / c.down;
    }
    return embed(t, 0.0, 0.0, 0.0);
  }
  const InteriorSystem s = interior_system(c);
  const VectorXd b = VectorXd::Ones(m);
  const VectorXd x = solve_tridiagonal<double>(s.lower, s.diag, s.upper, b);
  return embed(x, 0.0, 0.0, residual_of(s, x, b));
}

double absorption_prob(const BirthDeathChain& chain, std::size_t i) {
  if (i > chain.n) throw std::invalid_argument("start state exceeds n");
  if (i == 0) return 0.0;
  if (i == chain.n) return 1.0;
  return absorption_probs(chain).values(static_cast<Index>(i));
}

double absorption_time(const BirthDeathChain& chain, std::size_t i) {
  if (i > chain.n) throw std::invalid_argument("start state exceeds n");
  if (i == 0 || i == chain.n) return 0.0;
  return absorption_times(chain).values(static_cast<Index>(i));
}

double exact_decision_prob(std::size_t w0, std::size_t w1, std::size_t n) {
  if (w0 == w1) throw std::invalid_argument("exact_decision_prob requires w0 != w1");
  if (n > kMaxOracleStates) {
    throw std::invalid_argument("oracle supports n <= " + std::to_string(kMaxOracleStates));
  }
  if (w0 == 0) return 1.0;
  if (w1 == 0) return 0.0;

  // Accumulate Pr(decide 0) instead: 1 - h_i cancels badly when h_i is near
  // 1, and the lgamma weights only sum to 1 up to ~1e-13. Absorption at 0
  // from i is absorption at n from n - i in the mirrored chain.
  const BirthDeathChain chain = BirthDeathChain::for_population(w0, w1, n);
  const VectorXd g =
      absorption_probs(BirthDeathChain(n, chain.down, chain.up, chain.stay)).values;
  const double p1 = static_cast<double>(w1) / static_cast<double>(w0 + w1);
  const double m = static_cast<double>(n);
  const double log_p = std::log(p1);
  const double log_q = std::log1p(-p1);
  const double log_nfact = std::lgamma(m + 1);

  double lose = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double k = static_cast<double>(i);
    const double log_w =
        log_nfact - std::lgamma(k + 1) - std::lgamma(m - k + 1) + k * log_p + (m - k) * log_q;
    lose += std::exp(log_w) * g(static_cast<Index>(n - i));
  }
  return std::clamp(1.0 - lose, 0.0, 1.0);
}

ChainSimulation simulate_chain(const BirthDeathChain& c, std::size_t start, std::uint64_t seed,
                               std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("simulate_chain needs at least one trial");
  if (start > c.n) throw std::invalid_argument("start state exceeds n");
  require_solvable(c);

  Rng rng = make_stream(seed, Stream::Variant);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double hits = 0.0;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t state = start;
    double steps = 0.0;
    while (state != 0 && state != c.n) {
      const double u = unit(rng);
      if (u < c.up) ++state;
      else if (u < c.up + c.down) --state;
      steps += 1.0;
    }
    if (state == c.n) hits += 1.0;
    sum += steps;
    sum_sq += steps * steps;
  }

  const double count = static_cast<double>(trials);
  ChainSimulation out;
  out.trials = trials;
  out.absorbed_high = hits / count;
  out.absorbed_high_se = std::sqrt(out.absorbed_high * (1.0 - out.absorbed_high) / count);
  out.mean_steps = sum / count;
  const double var = trials > 1 ? (sum_sq - count * out.mean_steps * out.mean_steps) / (count - 1)
                                : 0.0;
  out.mean_steps_se = std::sqrt(std::max(var, 0.0) / count);
  return out;
}

}  // namespace epicon
