#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ccopf/smoothing.hpp"

using namespace ccopf::smoothing;

TEST_CASE("indicator is the right-continuous step") {
  CHECK(indicator(0.0) == 1.0);
  CHECK(indicator(-3.0) == 0.0);
  CHECK(indicator(2.0) == 1.0);
}

TEST_CASE("theta matches direct evaluation") {
  SmoothingParams p{0.1, 0.9, 0.9};
  CHECK(theta(p, 0.0) == 1.0);  // numerator equals denominator bitwise
  CHECK(theta(p, 10.0) == doctest::Approx(1.09).epsilon(0).scale(1).epsilon(1e-12));
  CHECK(std::abs(theta(p, 10.0) - 1.09) < 1e-6);

  SmoothingParams q{0.5, 1.0, 1.0};
  const double oracle = 1.5 / (1.0 + 0.5 * std::exp(-1.0));
  CHECK(std::abs(theta(q, 0.5) - oracle) < 1e-5);
}

TEST_CASE("theta saturates and stays within its open bounds") {
  SmoothingParams p{0.05, 1.5, 1.0};
  for (double s : {-30.0, -3.0, -0.2, 0.0, 0.2, 3.0, 30.0}) {
    const double v = theta(p, s);
    CHECK(v > 0.0);
    CHECK(v < 1.0 + p.m1 * p.tau + 1e-15);
  }
  CHECK(theta(p, -1e6) <= 1e-300);
}

TEST_CASE("theta_ds is the exact derivative") {
  SmoothingParams p{0.5, 1.0, 1.0};
  const double h = 1e-6;
  for (double s : {0.5, -0.7, 0.0, 2.0}) {
    const double fd = (theta(p, s + h) - theta(p, s - h)) / (2.0 * h);
    const double an = theta_ds(p, s);
    CHECK(std::abs(an - fd) / std::max(std::abs(fd), 1e-12) < 1e-6);
  }
  CHECK(theta_ds(p, -1e6) <= 1e-12);
}

TEST_CASE("theta_ds peak lies in the predicted bracket") {
  SmoothingParams p{0.1, 0.9, 0.9};
  double best_s = 0.0, best = -1.0;
  for (double s = -2.0; s <= 2.0; s += 1e-4) {
    const double d = theta_ds(p, s);
    if (d > best) {
      best = d;
      best_s = s;
    }
  }
  const double bound = p.tau * std::abs(std::log(p.m2 * p.tau)) + p.tau;
  CHECK(std::abs(best_s) <= bound);
}

TEST_CASE("theta is strictly increasing") {
  std::mt19937_64 gen(42);
  std::uniform_real_distribution<double> taus(0.01, 0.99), ms(0.1, 3.0), ss(-40.0, 40.0);
  for (int trial = 0; trial < 200; ++trial) {
    SmoothingParams p{taus(gen), ms(gen), ms(gen)};
    CHECK(theta_ds(p, ss(gen)) > 0.0);
  }
}

TEST_CASE("pointwise limit: theta approaches the indicator as tau decreases") {
  for (double s : {1.0, 0.3, -0.3, -1.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (double tau : {0.5, 0.25, 0.1, 0.05, 0.01}) {
      SmoothingParams p{tau, 1.0, 1.0};
      const double gap = std::abs(theta(p, s) - indicator(s));
      CHECK(gap < prev);
      prev = gap;
    }
    CHECK(prev < 0.02);
  }
}

TEST_CASE("majorant check over the default grid") {
  CHECK(check_majorant({0.1, 1.0, 1.0}).holds);
  CHECK(theta({0.1, 1.0, 1.0}, 0.0) == 1.0);

  const auto bad = check_majorant({0.5, 0.5, 1.0});
  CHECK_FALSE(bad.holds);
  CHECK(bad.worst_margin < 0.0);
  CHECK(theta({0.5, 0.5, 1.0}, 0.0) == doctest::Approx(1.25 / 1.5));

  const auto good = check_majorant({0.3, 2.0, 1.0});
  CHECK(good.holds);
  CHECK(theta({0.3, 2.0, 1.0}, 0.0) > 1.0);
}

TEST_CASE("majorant property holds whenever m1 >= m2") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> taus(0.01, 0.99), ms(0.05, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    double m1 = ms(gen), m2 = ms(gen);
    if (m1 < m2) std::swap(m1, m2);
    SmoothingParams p{taus(gen), m1, m2};
    const auto res = check_majorant(p);
    CHECK(res.holds);
  }
}

TEST_CASE("majorant grid preconditions are enforced") {
  SmoothingParams p{0.1, 1.0, 1.0};
  std::vector<double> narrow{-0.1, 0.0, 0.1};
  CHECK_THROWS_AS((void)check_majorant(p, narrow), std::invalid_argument);
  CHECK_THROWS_AS((void)check_majorant({0.0, 1.0, 1.0}), std::invalid_argument);
}
