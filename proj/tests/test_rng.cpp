#include <doctest.h>

#include <cmath>
#include <vector>

#include "mevsim/rng.hpp"

using namespace mevsim;

TEST_CASE("identical (seed, stream) reproduces the sequence") {
  SeededRng a(42, 7);
  SeededRng b(42, 7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
}

TEST_CASE("distinct streams differ") {
  SeededRng a(42, 0);
  SeededRng b(42, 1);
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    same += a.next_u64() == b.next_u64() ? 1 : 0;
  }
  CHECK(same == 0);
}

TEST_CASE("split derives independent reproducible streams") {
  SeededRng parent(9, 3);
  SeededRng c1 = parent.split(11);
  SeededRng c2 = parent.split(11);
  CHECK(c1.next_u64() == c2.next_u64());
  CHECK(parent.split(11).next_u64() != parent.split(12).next_u64());
}

TEST_CASE("uniform_below stays in range and covers values") {
  SeededRng rng(1, 0);
  std::vector<int> counts(10, 0);
  for (int i = 0; i < 10'000; ++i) {
    const std::uint64_t v = rng.uniform_below(10);
    REQUIRE(v < 10);
    ++counts[static_cast<int>(v)];
  }
  for (int c : counts) {
    CHECK(c > 800);  // ~1000 expected each
    CHECK(c < 1200);
  }
}

TEST_CASE("bernoulli respects exact rational probabilities") {
  SeededRng rng(5, 0);
  int hits = 0;
  const Rational p(1, 4);
  for (int i = 0; i < 20'000; ++i) {
    hits += rng.bernoulli(p) ? 1 : 0;
  }
  CHECK(hits > 4'700);
  CHECK(hits < 5'300);
  SeededRng z(5, 1);
  CHECK_FALSE(z.bernoulli(Rational(0)));
  CHECK(z.bernoulli(Rational(1)));
}

TEST_CASE("binomial draws match mean and variance at BTRS sizes") {
  SeededRng rng(123, 0);
  const std::uint64_t n = 50'400;
  const double p = 0.13;
  const int draws = 4'000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < draws; ++i) {
    const auto k = static_cast<double>(binomial_draw(rng, n, p));
    sum += k;
    sumsq += k * k;
  }
  const double mean = sum / draws;
  const double var = sumsq / draws - mean * mean;
  CHECK(std::abs(mean - 6552.0) < 10.0);          // sigma_mean ~ 1.2
  CHECK(std::abs(var - 5700.2) < 5700.2 * 0.15);  // n p (1-p)
}

TEST_CASE("binomial small-n and sparse paths stay exact in expectation") {
  SeededRng rng(77, 0);
  double sum = 0;
  for (int i = 0; i < 20'000; ++i) {
    sum += static_cast<double>(binomial_draw(rng, 40, 0.1));
  }
  CHECK(std::abs(sum / 20'000 - 4.0) < 0.1);

  double sparse = 0;
  for (int i = 0; i < 2'000; ++i) {
    sparse += static_cast<double>(binomial_draw(rng, 1'000'000, 2e-6));
  }
  CHECK(std::abs(sparse / 2'000 - 2.0) < 0.25);

  CHECK(binomial_draw(rng, 100, 0.0) == 0);
  CHECK(binomial_draw(rng, 100, 1.0) == 100);
  CHECK(binomial_draw(rng, 0, 0.5) == 0);
}
