#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mevsim/errors.hpp"
#include "mevsim/numeric.hpp"
#include "mevsim/rng.hpp"

namespace mevsim {

struct NonFiniteSample : std::invalid_argument {
  explicit NonFiniteSample(const std::string& what) : std::invalid_argument(what) {}
};

struct QuantileOutOfRange : std::invalid_argument {
  explicit QuantileOutOfRange(const std::string& what) : std::invalid_argument(what) {}
};

struct QuantileSummary {
  Rational q25, q50, q95;
};

/// Nearest-rank index into a sorted sample of size n: ceil(q*n) - 1,
/// clamped so q = 0 selects the minimum.
std::size_t nearest_rank_index(const Rational& q, std::size_t n);

/// Sorted empirical distribution with optional positive weights.
/// CDF(x) = weight(samples <= x) / total; quantiles are nearest-rank;
/// sampling inverts the CDF exactly, so draws are always sample members.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;

  static EmpiricalDistribution from_samples(std::vector<Rational> samples);
  static EmpiricalDistribution from_doubles(const std::vector<double>& samples);
  static EmpiricalDistribution from_weighted(std::vector<Rational> samples,
                                             std::vector<Rational> weights);
  static EmpiricalDistribution point_mass(Rational value);

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const std::vector<Rational>& samples() const { return samples_; }
  bool weighted() const { return !weights_.empty(); }
  const std::vector<Rational>& weights() const { return weights_; }

  const Rational& min() const;
  const Rational& max() const;

  Rational cdf(const Rational& x) const;
  const Rational& quantile(const Rational& q) const;
  QuantileSummary summarize() const;

  /// Inverse-CDF draw: u = k/2^64 uniform, smallest sample with CDF >= u.
  const Rational& sample(SeededRng& rng) const;
  std::size_t sample_index(SeededRng& rng) const;

  /// Interquartile width, a spread measure for reports.
  Rational iq_width() const;

 private:
  void ensure_nonempty(const char* op) const;

  std::vector<Rational> samples_;       // ascending
  std::vector<Rational> weights_;       // empty => uniform
  std::vector<Rational> cum_weights_;   // prefix sums, weighted case only
  Rational total_weight_{0};
};

/// ECDF cache file: a text table of sorted samples under a small header
/// (count, units, source fingerprint). Format documented in the README.
struct EcdfCacheMeta {
  std::string units;   // e.g. "ms", "wei", "fraction"
  std::string source;  // e.g. "fnv1a64:<hex>" of the originating input
};

void write_ecdf_cache(std::ostream& out, const EmpiricalDistribution& dist,
                      const EcdfCacheMeta& meta);
void write_ecdf_cache_file(const std::filesystem::path& path,
                           const EmpiricalDistribution& dist, const EcdfCacheMeta& meta);

std::pair<EmpiricalDistribution, EcdfCacheMeta> read_ecdf_cache(std::istream& in);
std::pair<EmpiricalDistribution, EcdfCacheMeta> read_ecdf_cache_file(
    const std::filesystem::path& path);

}  // namespace mevsim
