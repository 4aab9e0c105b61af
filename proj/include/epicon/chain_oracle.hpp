#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

namespace epicon {

/// Walk on 0..n absorbing at both ends; from an interior state it moves up
/// w.p. `up`, down w.p. `down` and stays w.p. `stay`.
struct BirthDeathChain {
  std::size_t n;
  double up;
  double down;
  double stay;

  /// Validates up + down + stay = 1 (within 1e-12), nonnegative entries, n >= 1.
  BirthDeathChain(std::size_t n, double up, double down, double stay);

  /// The update-step walk of a population: up = (w1/(w0+w1))^2, down = (w0/(w0+w1))^2.
  static BirthDeathChain for_population(std::size_t w0, std::size_t w1, std::size_t n);

  bool degenerate() const noexcept { return up == 0.0 || down == 0.0; }
};

/// Raised when neither drift direction has positive probability.
class DegenerateChainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Solves a tridiagonal system by forward elimination and back substitution.
/// `lower(k)` couples row k to row k-1 (lower(0) unused), `upper(k)` couples
/// row k to row k+1 (upper(last) unused).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve_tridiagonal(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& lower,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& diag,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& upper,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& rhs) {
  const Eigen::Index m = diag.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> c(m), d(m);
  if (m == 0) return d;
  c(0) = upper(0) / diag(0);
  d(0) = rhs(0) / diag(0);
  for (Eigen::Index k = 1; k < m; ++k) {
    const Scalar denom = diag(k) - lower(k) * c(k - 1);
    c(k) = k + 1 < m ? upper(k) / denom : Scalar(0);
    d(k) = (rhs(k) - lower(k) * d(k - 1)) / denom;
  }
  for (Eigen::Index k = m - 2; k >= 0; --k) d(k) -= c(k) * d(k + 1);
  return d;
}

/// Solution over all states 0..n plus the interior residual max |A x - b|.
struct ChainSolution {
  Eigen::VectorXd values;
  double residual = 0.0;
};

/// h_i = Pr(absorb at n | start i) for every i, by linear solve.
ChainSolution absorption_probs(const BirthDeathChain& chain);
/// t_i = expected steps (ties included) to absorption for every i.
ChainSolution absorption_times(const BirthDeathChain& chain);

double absorption_prob(const BirthDeathChain& chain, std::size_t i);
double absorption_time(const BirthDeathChain& chain, std::size_t i);

/// Pr(decide 1) in the update-step abstraction: the absorption probability
/// mixed over Binomial(n, w1/(w0+w1)) initial ones. Requires w0 != w1, n <= 2000.
double exact_decision_prob(std::size_t w0, std::size_t w1, std::size_t n);

struct ChainSimulation {
  std::size_t trials = 0;
  double absorbed_high = 0.0;  // frequency of ending at n
  double absorbed_high_se = 0.0;
  double mean_steps = 0.0;
  double mean_steps_se = 0.0;
};

/// Monte Carlo of the same walk.
ChainSimulation simulate_chain(const BirthDeathChain& chain, std::size_t start,
                               std::uint64_t seed, std::size_t trials);

constexpr std::size_t kMaxOracleStates = 2000;

}  // namespace epicon
