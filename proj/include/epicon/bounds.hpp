#pragma once

#include <cstddef>
#include <optional>

namespace epicon {

/// One play of a gambler's-ruin game: win w.p. p, lose w.p. q, tie w.p. r.
struct GamblerParams {
  double p;
  double q;
  double r;

  /// Validates p + q + r = 1 (within 1e-12), p, q in (0, 1) and r in [0, 1).
  GamblerParams(double p, double q, double r);
  /// r = 1 - p - q.
  static GamblerParams without_ties(double p) { return {p, 1.0 - p, 0.0}; }
};

/// Win/lose/tie probabilities of one erase-then-write update at a collision.
struct ChainParams {
  double P;
  double Q;
  double R;
};

ChainParams update_step_probs(std::size_t w0, std::size_t w1);

/// First-write census: each cell's first mark is 1 independently with
/// probability p1 = w1 / (w0 + w1).
struct InitialWriteModel {
  std::size_t n;
  double p1;
  double mu0;  // expected initial zeros

  double expected_ones() const noexcept { return static_cast<double>(n) * p1; }
  /// log Pr(X1 = ones) under Binomial(n, p1).
  double log_pmf(std::size_t ones) const noexcept;
};

InitialWriteModel initial_write_model(std::size_t w0, std::size_t w1, std::size_t n);

/// Probability that a fortune starting at i reaches n before 0. Uses i/n when
/// p and q coincide (to within 1e-9 in ratio).
double gambler_ruin_prob(std::size_t i, std::size_t n, const GamblerParams& gp);

/// Expected number of plays before absorption, evaluated exactly as the
/// textbook closed form with its trailing 1/(p+q) factor:
///
///   E_i = (n/(p-q) * f_i - i/(p-q)) / (p+q)
///
/// At p = q the continuous limit i(n-i)/(p+q)^2 is returned, which is i(n-i)
/// without ties. With r > 0 this differs from the expected number of plays
/// counted by first-step analysis (see `gambler_expected_plays`) by exactly
/// the factor 1/(p+q).
double gambler_expected_time(std::size_t i, std::size_t n, const GamblerParams& gp);

/// Expected total plays including ties, from first-step analysis:
/// (n f_i - i)/(p - q), or i(n-i)/(p+q) at p = q.
double gambler_expected_plays(std::size_t i, std::size_t n, const GamblerParams& gp);

/// exp(-delta^2 mu / (2 + delta)), an upper bound on Pr(X >= (1+delta) mu).
double chernoff_upper(double mu, double delta);

/// Absorption-at-n probability of the update-step walk in closed form,
/// (1 - (w0/w1)^{2i}) / (1 - (w0/w1)^{2n}). Requires w0 != w1.
double lemma3_prob(std::size_t i, std::size_t n, std::size_t w0, std::size_t w1);

struct MajorityBound {
  double theorem2;
  /// (1 - 3^-n)(1 - e^{-n/12}); present when w1 >= 3 w0.
  std::optional<double> corollary1;
};

/// Lower bound on the probability of deciding 1. Requires w1 > w0 > 0.
MajorityBound majority_prob_lower_bound(std::size_t w0, std::size_t w1, std::size_t n);

double corollary1_bound(std::size_t n);

/// 2 (w0+w1)^4 n^2 / (w1^4 - w0^4). Requires w1 > w0.
double expected_steps_upper_bound(std::size_t w0, std::size_t w1, std::size_t n);

/// (w0+w1)^4 (n-i) / (w1^4 - w0^4). Requires w1 > w0.
double update_steps_upper_bound(std::size_t i, std::size_t n, std::size_t w0, std::size_t w1);

/// Worst start over i in 1..n-1, i.e. the per-start bound at i = 1.
double max_update_steps_bound(std::size_t n, std::size_t w0, std::size_t w1);

/// Update-step bound times the 2(n-1) walk cost, plus n for the first writes.
double composed_steps_bound(std::size_t n, std::size_t w0, std::size_t w1);

}  // namespace epicon
