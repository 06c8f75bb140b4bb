#include "mevsim/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mevsim {

std::uint64_t SeededRng::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("uniform_below(0)");
  }
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = -n % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

namespace {

// ln(k!) minus the Stirling approximation; exact table through k = 9,
// truncated series beyond.
double stirling_tail(double k) {
  static const double kTable[] = {
      0.0810614667953272,  0.0413406959554092,  0.0276779256849983,
      0.02079067210376509, 0.0166446911898211,  0.0138761288230707,
      0.0118967099458917,  0.0104112652619720,  0.00925546218271273,
      0.00833056343336287};
  if (k <= 9.0) {
    return kTable[static_cast<int>(k)];
  }
  const double kp1sq = (k + 1) * (k + 1);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1);
}

// Hormann's transformed rejection sampler; requires p <= 0.5, n*p >= 10.
std::uint64_t binomial_btrs(SeededRng& rng, std::uint64_t n, double p) {
  const double count = static_cast<double>(n);
  const double stddev = std::sqrt(count * p * (1 - p));
  const double b = 1.15 + 2.53 * stddev;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = count * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1 - p);
  const double alpha = (2.83 + 5.1 / b) * stddev;
  const double m = std::floor((count + 1) * p);
  for (;;) {
    const double u = rng.next_unit() - 0.5;
    double v = rng.next_unit_open();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + c);
    if (k < 0 || k > count) {
      continue;
    }
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::uint64_t>(k);
    }
    v = std::log(v * alpha / (a / (us * us) + b));
    const double upper =
        (m + 0.5) * std::log((m + 1) / (r * (count - m + 1))) +
        (count + 1) * std::log((count - m + 1) / (count - k + 1)) +
        (k + 0.5) * std::log(r * (count - k + 1) / (k + 1)) +
        stirling_tail(m) + stirling_tail(count - m) - stirling_tail(k) -
        stirling_tail(count - k);
    if (v <= upper) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

std::uint64_t binomial_bernoulli_sum(SeededRng& rng, std::uint64_t n, double p) {
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    hits += rng.next_unit() < p ? 1 : 0;
  }
  return hits;
}

// Counts successes by jumping over geometric failure gaps; exact and cheap
// when n*p is small but n itself is large.
std::uint64_t binomial_geometric(SeededRng& rng, std::uint64_t n, double p) {
  const double log_q = std::log1p(-p);
  std::uint64_t hits = 0;
  double position = 0;
  for (;;) {
    position += std::floor(std::log(rng.next_unit_open()) / log_q) + 1;
    if (position > static_cast<double>(n)) {
      return hits;
    }
    ++hits;
  }
}

}  // namespace

std::uint64_t binomial_draw(SeededRng& rng, std::uint64_t n, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial probability outside [0, 1]");
  }
  if (n == 0 || p == 0.0) {
    return 0;
  }
  if (p == 1.0) {
    return n;
  }
  if (p > 0.5) {
    return n - binomial_draw(rng, n, 1.0 - p);
  }
  const double np = static_cast<double>(n) * p;
  if (np >= 10.0) {
    return binomial_btrs(rng, n, p);
  }
  if (n <= 4096) {
    return binomial_bernoulli_sum(rng, n, p);
  }
  return binomial_geometric(rng, n, p);
}

}  // namespace mevsim
