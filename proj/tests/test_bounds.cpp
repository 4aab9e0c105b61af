#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "epicon/bounds.hpp"

using namespace epicon;
using doctest::Approx;

namespace {

// Dense Gaussian elimination with partial pivoting; small systems only.
std::vector<double> dense_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t m = b.size();
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < m; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t r = m; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < m; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

// First-step equations of the walk on 0..n. Returns (win probability, expected plays) per state.
std::pair<std::vector<double>, std::vector<double>> walk_by_elimination(std::size_t n, double p,
                                                                        double q) {
  const std::size_t m = n - 1;
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<double> bh(m, 0.0), bt(m, 1.0);
  for (std::size_t k = 0; k < m; ++k) {
    a[k][k] = p + q;
    if (k > 0) a[k][k - 1] = -q;
    if (k + 1 < m) a[k][k + 1] = -p;
  }
  bh[m - 1] = p;
  auto h = dense_solve(a, bh);
  auto t = dense_solve(a, bt);
  h.insert(h.begin(), 0.0);
  h.push_back(1.0);
  t.insert(t.begin(), 0.0);
  t.push_back(0.0);
  return {h, t};
}

}  // namespace

TEST_CASE("gambler parameters are validated") {
  CHECK_NOTHROW(GamblerParams(0.3, 0.2, 0.5));
  CHECK_THROWS_AS(GamblerParams(0.0, 0.5, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(GamblerParams(0.5, 0.5, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GamblerParams(0.5, 0.6, -0.1), std::invalid_argument);
  const GamblerParams g = GamblerParams::without_ties(0.7);
  CHECK(g.q == Approx(0.3));
  CHECK(g.r == 0.0);
}

TEST_CASE("ruin probability examples") {
  const GamblerParams fair = GamblerParams::without_ties(0.5);
  CHECK(gambler_ruin_prob(0, 10, fair) == 0.0);
  CHECK(gambler_ruin_prob(10, 10, fair) == 1.0);
  CHECK(gambler_ruin_prob(3, 10, fair) == Approx(0.3).epsilon(1e-15));
  // q/p = 1/9: (1 - 1/9) / (1 - 1/81) = (8/9) (81/80) = 9/10.
  CHECK(gambler_ruin_prob(1, 2, GamblerParams(0.9, 0.1, 0.0)) == Approx(0.9).epsilon(1e-14));
  // Ties only slow the walk down.
  CHECK(gambler_ruin_prob(1, 2, GamblerParams(0.45, 0.05, 0.5)) == Approx(0.9).epsilon(1e-14));
  CHECK(gambler_ruin_prob(4, 10, GamblerParams(0.25, 0.25, 0.5)) == Approx(0.4));
  CHECK_THROWS_AS(gambler_ruin_prob(11, 10, fair), std::invalid_argument);
}

TEST_CASE("ruin probability matches elimination on small walks") {
  const double ps[][2] = {{0.6, 0.4}, {0.3, 0.2}, {0.1, 0.5}, {0.5625, 0.0625}};
  for (const auto& pq : ps) {
    const GamblerParams g(pq[0], pq[1], 1.0 - pq[0] - pq[1]);
    for (std::size_t n : {2u, 5u, 17u, 30u}) {
      const auto [h, t] = walk_by_elimination(n, g.p, g.q);
      for (std::size_t i = 0; i <= n; ++i) {
        CHECK(gambler_ruin_prob(i, n, g) == Approx(h[i]).epsilon(1e-10));
        CHECK(gambler_expected_plays(i, n, g) == Approx(t[i]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("expected time examples") {
  const GamblerParams fair = GamblerParams::without_ties(0.5);
  CHECK(gambler_expected_time(0, 10, fair) == 0.0);
  CHECK(gambler_expected_time(10, 10, fair) == 0.0);
  CHECK(gambler_expected_time(3, 10, fair) == 21.0);
  for (std::size_t n = 2; n <= 100; ++n) {
    for (std::size_t i = 0; i <= n; ++i) {
      CHECK(gambler_expected_time(i, n, fair) == static_cast<double>(i * (n - i)));
      CHECK(gambler_ruin_prob(i, n, fair) ==
            Approx(static_cast<double>(i) / static_cast<double>(n)).epsilon(1e-15));
    }
  }
  // Far from the lower wall the walk drifts up at speed 2p - 1.
  const GamblerParams up = GamblerParams::without_ties(0.6);
  const double e = gambler_expected_time(5000, 10000, up);
  CHECK(e / (5000.0 / 0.2) == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("closed-form time carries an extra 1/(p+q) when ties exist") {
  const GamblerParams g(0.3, 0.2, 0.5);
  for (std::size_t i = 1; i < 20; ++i) {
    const double plays = gambler_expected_plays(i, 20, g);
    CHECK(gambler_expected_time(i, 20, g) == Approx(plays / 0.5).epsilon(1e-12));
  }
  // Without ties the two agree.
  const GamblerParams h = GamblerParams::without_ties(0.7);
  for (std::size_t i = 1; i < 20; ++i) {
    CHECK(gambler_expected_time(i, 20, h) == Approx(gambler_expected_plays(i, 20, h)));
  }
  // Symmetric walk with ties: plays = i(n-i)/(p+q).
  const GamblerParams s(0.25, 0.25, 0.5);
  CHECK(gambler_expected_plays(3, 10, s) == Approx(42.0));
  CHECK(gambler_expected_time(3, 10, s) == Approx(84.0));
}

TEST_CASE("ruin probability stays finite for long walks") {
  for (double p : {0.9999, 0.99, 0.6, 0.5000000001, 0.4, 0.01}) {
    const GamblerParams g = GamblerParams::without_ties(p);
    double prev = 0.0;
    for (std::size_t i = 0; i <= 2000; i += 50) {
      const double f = gambler_ruin_prob(i, 2000, g);
      CHECK(std::isfinite(f));
      CHECK(f >= prev);
      CHECK(f <= 1.0);
      prev = f;
    }
  }
}

TEST_CASE("chernoff bound") {
  CHECK(chernoff_upper(3.0, 1.0) == Approx(std::exp(-1.0)));
  CHECK(chernoff_upper(3.0, 1e-9) == Approx(1.0));
  CHECK(chernoff_upper(10.0, 0.5) < chernoff_upper(5.0, 0.5));
  CHECK_THROWS_AS(chernoff_upper(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(chernoff_upper(1.0, -1.0), std::invalid_argument);
}

TEST_CASE("chernoff bound holds empirically") {
  const double n = 100.0, p0 = 40.0 / 90.0;
  const double mu0 = n * p0;
  std::mt19937_64 rng(7);
  std::binomial_distribution<int> x0(100, p0);
  // Tail at a smaller deviation too, where the event is not vanishingly rare.
  for (double delta : {0.1, 0.2, 1.0}) {
    const int trials = 100000;
    int hits = 0;
    for (int k = 0; k < trials; ++k) {
      if (x0(rng) >= (1.0 + delta) * mu0) ++hits;
    }
    const double freq = static_cast<double>(hits) / trials;
    const double bound = chernoff_upper(mu0, delta);
    const double sigma = std::sqrt(bound * (1.0 - bound) / trials);
    CHECK(freq <= bound + 3.0 * sigma);
  }
}

TEST_CASE("update-step probabilities") {
  const ChainParams c = update_step_probs(40, 50);
  CHECK(c.P == Approx(25.0 / 81.0).epsilon(1e-15));
  CHECK(c.Q == Approx(16.0 / 81.0).epsilon(1e-15));
  CHECK(c.R == Approx(40.0 / 81.0).epsilon(1e-15));
  CHECK(c.P == Approx(0.30864).epsilon(1e-5));
  CHECK(c.Q == Approx(0.19753).epsilon(1e-5));
  CHECK(c.R == Approx(0.49383).epsilon(1e-5));

  const ChainParams one = update_step_probs(0, 7);
  CHECK(one.P == 1.0);
  CHECK(one.Q == 0.0);
  CHECK(one.R == 0.0);
  const ChainParams tie = update_step_probs(9, 9);
  CHECK(tie.P == 0.25);
  CHECK(tie.Q == 0.25);
  CHECK(tie.R == 0.5);
  CHECK_THROWS_AS(update_step_probs(0, 0), std::invalid_argument);
}

TEST_CASE("initial write model") {
  const InitialWriteModel m = initial_write_model(40, 50, 1000);
  CHECK(m.mu0 + m.expected_ones() == Approx(1000.0));
  CHECK(m.mu0 == Approx(40000.0 / 90.0));
  double total = 0.0;
  for (std::size_t k = 0; k <= 1000; ++k) total += std::exp(m.log_pmf(k));
  CHECK(total == Approx(1.0).epsilon(1e-12));
  const InitialWriteModel all = initial_write_model(0, 3, 10);
  CHECK(all.log_pmf(10) == 0.0);
  CHECK(std::isinf(all.log_pmf(9)));
}

TEST_CASE("lemma 3 probability") {
  CHECK(lemma3_prob(7, 7, 10, 30) == 1.0);
  CHECK(lemma3_prob(0, 7, 10, 30) == 0.0);
  CHECK(lemma3_prob(1, 2, 1, 3) == Approx(0.9).epsilon(1e-14));
  CHECK(lemma3_prob(1, 2, 10, 30) == Approx(0.9).epsilon(1e-14));
  CHECK_THROWS_AS(lemma3_prob(1, 5, 4, 4), std::invalid_argument);

  const std::size_t pops[][2] = {{1, 3}, {10, 30}, {32, 50}, {40, 50}, {50, 40}, {7, 2}};
  for (const auto& w : pops) {
    const ChainParams c = update_step_probs(w[0], w[1]);
    const GamblerParams g(c.P, c.Q, c.R);
    for (std::size_t n : {2u, 10u, 100u, 1000u}) {
      double prev = -1.0;
      for (std::size_t i = 0; i <= n; ++i) {
        const double f = lemma3_prob(i, n, w[0], w[1]);
        CHECK(f == Approx(gambler_ruin_prob(i, n, g)).epsilon(1e-12));
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(f >= prev);
        // Strict in exact arithmetic; values saturate at 0 and 1 in doubles.
        if (prev > 1e-300 && f < 1.0 - 1e-12) CHECK(f > prev);
        prev = f;
      }
    }
  }
  // Stronger majorities win more often from the same start.
  double prev = 0.0;
  for (std::size_t w1 = 41; w1 < 200; w1 += 7) {
    const double f = lemma3_prob(20, 100, 40, w1);
    CHECK(f >= prev);
    if (f < 1.0 - 1e-12) CHECK(f > prev);
    prev = f;
  }
}

TEST_CASE("majority lower bound") {
  // (1 - 3^-12)(1 - e^-1).
  const MajorityBound b = majority_prob_lower_bound(1, 3, 12);
  CHECK(b.theorem2 == Approx(0.6321).epsilon(1e-4));
  CHECK(b.theorem2 == Approx((1.0 - std::pow(3.0, -12)) * (1.0 - std::exp(-1.0))));
  REQUIRE(b.corollary1);
  CHECK(*b.corollary1 == Approx(b.theorem2).epsilon(1e-14));

  CHECK(corollary1_bound(100) == Approx(0.99976).epsilon(1e-5));
  CHECK_FALSE(majority_prob_lower_bound(10, 20, 100).corollary1);
  CHECK_THROWS_AS(majority_prob_lower_bound(3, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(majority_prob_lower_bound(4, 3, 10), std::invalid_argument);
  CHECK_THROWS_AS(majority_prob_lower_bound(0, 3, 10), std::invalid_argument);

  for (std::size_t w1 : {11u, 15u, 30u, 90u}) {
    double prev = 0.0;
    for (std::size_t n = 2; n <= 2000; n *= 2) {
      const double v = majority_prob_lower_bound(10, w1, n).theorem2;
      CHECK(v <= 1.0);
      CHECK(v > 0.0);
      CHECK(v >= prev);
      if (v < 1.0 - 1e-12) CHECK(v > prev);
      prev = v;
    }
    CHECK(majority_prob_lower_bound(10, w1, 100000).theorem2 == Approx(1.0));
  }
}

TEST_CASE("expected steps upper bound") {
  // 2 * 40^4 * 10^6 / (30^4 - 10^4) = 2 * 2560000 * 10^6 / 800000.
  CHECK(expected_steps_upper_bound(10, 30, 1000) == Approx(6.4e6).epsilon(1e-14));
  CHECK(expected_steps_upper_bound(1, 3, 50) == Approx(6.4 * 2500.0));
  CHECK(expected_steps_upper_bound(0, 5, 37) == Approx(2.0 * 37 * 37));
  CHECK(expected_steps_upper_bound(40, 50, 200) / expected_steps_upper_bound(40, 50, 100) ==
        Approx(4.0));
  CHECK_THROWS_AS(expected_steps_upper_bound(5, 5, 10), std::invalid_argument);
  CHECK_THROWS_AS(expected_steps_upper_bound(1, 5, 1), std::invalid_argument);
}

TEST_CASE("update-step bounds compose into the runtime bound") {
  CHECK(update_steps_upper_bound(10, 10, 1, 3) == 0.0);
  CHECK(max_update_steps_bound(50, 1, 3) == update_steps_upper_bound(1, 50, 1, 3));
  CHECK_THROWS_AS(update_steps_upper_bound(1, 10, 3, 3), std::invalid_argument);
  const std::size_t pops[][2] = {{0, 1}, {1, 3}, {10, 30}, {32, 50}, {40, 50}, {99, 100}};
  for (const auto& w : pops) {
    for (std::size_t n : {2u, 3u, 10u, 100u, 1000u, 5000u}) {
      double prev = INFINITY;
      for (std::size_t i = 0; i <= n; i += std::max<std::size_t>(1, n / 20)) {
        const double u = update_steps_upper_bound(i, n, w[0], w[1]);
        CHECK(u >= 0.0);
        CHECK(u < prev);
        prev = u;
      }
      CHECK(composed_steps_bound(n, w[0], w[1]) <= expected_steps_upper_bound(w[0], w[1], n));
    }
  }
}
