#include "epicon/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace epicon {

namespace {

constexpr double kRatioTolerance = 1e-9;

double as_double(std::size_t x) { return static_cast<double>(x); }

void require_start(std::size_t i, std::size_t n) {
  if (n == 0) throw std::invalid_argument("target n must be positive");
  if (i > n) {
    throw std::invalid_argument("start " + std::to_string(i) + " exceeds target " +
                                std::to_string(n));
  }
}

void require_majority_of_ones(std::size_t w0, std::size_t w1) {
  if (w1 <= w0) throw std::invalid_argument("requires w1 > w0");
}

// (1 - x^i) / (1 - x^n) with log_x = ln x, evaluated without overflow for
// large exponents on either side of x = 1.
double ratio_form(double i, double n, double log_x) {
  if (log_x < 0.0) return std::expm1(i * log_x) / std::expm1(n * log_x);
  // x > 1: rewrite as x^{i-n} (1 - x^{-i}) / (1 - x^{-n}).
  return std::exp((i - n) * log_x) * std::expm1(-i * log_x) / std::expm1(-n * log_x);
}

// w1^4 - w0^4 and (w0+w1)^4 as doubles; the ratio is all that is used.
double quartic_ratio(std::size_t w0, std::size_t w1) {
  const double a = as_double(w0);
  const double b = as_double(w1);
  return std::pow(a + b, 4) / (std::pow(b, 4) - std::pow(a, 4));
}

}  // namespace

GamblerParams::GamblerParams(double p_, double q_, double r_) : p(p_), q(q_), r(r_) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("gambler p and q must lie in (0, 1)");
  }
  if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("gambler r must lie in [0, 1)");
  if (std::abs(p + q + r - 1.0) > 1e-12) {
    throw std::invalid_argument("gambler p + q + r must equal 1");
  }
}

ChainParams update_step_probs(std::size_t w0, std::size_t w1) {
  if (w0 + w1 == 0) throw std::invalid_argument("population needs at least one writer");
  const double total = as_double(w0 + w1);
  const double up = as_double(w1) / total;
  const double down = as_double(w0) / total;
  const double P = up * up;
  const double Q = down * down;
  return {P, Q, 1.0 - P - Q};
}

double InitialWriteModel::log_pmf(std::size_t ones) const noexcept {
  if (ones > n) return -INFINITY;
  const double k = as_double(ones);
  const double m = as_double(n);
  // Degenerate p1 puts all mass at one end.
  if (p1 <= 0.0) return ones == 0 ? 0.0 : -INFINITY;
  if (p1 >= 1.0) return ones == n ? 0.0 : -INFINITY;
  return std::lgamma(m + 1) - std::lgamma(k + 1) - std::lgamma(m - k + 1) + k * std::log(p1) +
         (m - k) * std::log1p(-p1);
}

InitialWriteModel initial_write_model(std::size_t w0, std::size_t w1, std::size_t n) {
  if (w0 + w1 == 0) throw std::invalid_argument("population needs at least one writer");
  const double total = as_double(w0 + w1);
  return {n, as_double(w1) / total, as_double(w0) * as_double(n) / total};
}

double gambler_ruin_prob(std::size_t i, std::size_t n, const GamblerParams& gp) {
  require_start(i, n);
  if (i == 0) return 0.0;
  if (i == n) return 1.0;
  const double x = gp.q / gp.p;
  if (std::abs(1.0 - x) < kRatioTolerance) return as_double(i) / as_double(n);
  return ratio_form(as_double(i), as_double(n), std::log(x));
}

double gambler_expected_plays(std::size_t i, std::size_t n, const GamblerParams& gp) {
  require_start(i, n);
  if (i == 0 || i == n) return 0.0;
  const double x = gp.q / gp.p;
  if (std::abs(1.0 - x) < kRatioTolerance) {
    return as_double(i) * as_double(n - i) / (gp.p + gp.q);
  }
  const double f = gambler_ruin_prob(i, n, gp);
  return (as_double(n) * f - as_double(i)) / (gp.p - gp.q);
}

double gambler_expected_time(std::size_t i, std::size_t n, const GamblerParams& gp) {
  require_start(i, n);
  if (i == 0 || i == n) return 0.0;
  const double x = gp.q / gp.p;
  if (std::abs(1.0 - x) < kRatioTolerance) {
    const double s = gp.p + gp.q;
    if (gp.r == 0.0) return as_double(i) * as_double(n - i);
    return as_double(i) * as_double(n - i) / (s * s);
  }
  const double f = gambler_ruin_prob(i, n, gp);
  const double d = gp.p - gp.q;
  return ((as_double(n) / d) * f - as_double(i) / d) * (1.0 / (gp.p + gp.q));
}

double chernoff_upper(double mu, double delta) {
  if (!(mu > 0.0) || !(delta > 0.0)) {
    throw std::invalid_argument("chernoff bound needs mu > 0 and delta > 0");
  }
  return std::exp(-delta * delta * mu / (2.0 + delta));
}

double lemma3_prob(std::size_t i, std::size_t n, std::size_t w0, std::size_t w1) {
  require_start(i, n);
  if (w0 == w1) throw std::invalid_argument("lemma3_prob requires w0 != w1");
  if (i == n) return 1.0;
  if (i == 0) return 0.0;
  if (w0 == 0) return 1.0;
  if (w1 == 0) return 0.0;
  const double log_x = 2.0 * std::log(as_double(w0) / as_double(w1));
  return ratio_form(as_double(i), as_double(n), log_x);
}

double corollary1_bound(std::size_t n) {
  const double m = as_double(n);
  return -std::expm1(-m * std::log(3.0)) * -std::expm1(-m / 12.0);
}

MajorityBound majority_prob_lower_bound(std::size_t w0, std::size_t w1, std::size_t n) {
  require_majority_of_ones(w0, w1);
  if (w0 == 0) throw std::invalid_argument("majority bound requires w0 > 0");
  const double a = as_double(w0);
  const double b = as_double(w1);
  const double m = as_double(n);
  const double mu0 = a * m / (a + b);

  MajorityBound out;
  // (1 - (w0/w1)^{4 mu0}) (1 - e^{-mu0/3})
  out.theorem2 = -std::expm1(4.0 * mu0 * std::log(a / b)) * -std::expm1(-mu0 / 3.0);
  if (w1 >= 3 * w0) out.corollary1 = corollary1_bound(n);
  return out;
}

double expected_steps_upper_bound(std::size_t w0, std::size_t w1, std::size_t n) {
  require_majority_of_ones(w0, w1);
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  const double m = as_double(n);
  return 2.0 * quartic_ratio(w0, w1) * m * m;
}

double update_steps_upper_bound(std::size_t i, std::size_t n, std::size_t w0, std::size_t w1) {
  require_majority_of_ones(w0, w1);
  require_start(i, n);
  return quartic_ratio(w0, w1) * as_double(n - i);
}

double max_update_steps_bound(std::size_t n, std::size_t w0, std::size_t w1) {
  return update_steps_upper_bound(1, n, w0, w1);
}

double composed_steps_bound(std::size_t n, std::size_t w0, std::size_t w1) {
  const double m = as_double(n);
  return max_update_steps_bound(n, w0, w1) * 2.0 * (m - 1.0) + m;
}

}  // namespace epicon
