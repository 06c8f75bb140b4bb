#include "mevsim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mevsim {

std::size_t nearest_rank_index(const Rational& q, std::size_t n) {
  if (q < 0 || q > 1) {
    throw QuantileOutOfRange("quantile must lie in [0, 1], got " + rational_to_decimal(q));
  }
  if (n == 0) {
    throw EmptyInput("quantile of an empty sample");
  }
  BigInt num = numerator(q) * BigInt(static_cast<unsigned long long>(n));
  BigInt den = denominator(q);
  BigInt rank = num / den;
  if (rank * den != num) {
    ++rank;  // ceil
  }
  if (rank < 1) rank = 1;
  return rank.convert_to<std::size_t>() - 1;
}

EmpiricalDistribution EmpiricalDistribution::from_samples(std::vector<Rational> samples) {
  if (samples.empty()) {
    throw EmptyInput("empirical distribution needs at least one sample");
  }
  std::sort(samples.begin(), samples.end());
  EmpiricalDistribution dist;
  dist.samples_ = std::move(samples);
  dist.total_weight_ = Rational(static_cast<unsigned long long>(dist.samples_.size()));
  return dist;
}

EmpiricalDistribution EmpiricalDistribution::from_doubles(const std::vector<double>& samples) {
  std::vector<Rational> exact;
  exact.reserve(samples.size());
  for (double x : samples) {
    if (!std::isfinite(x)) {
      throw NonFiniteSample("non-finite sample in empirical distribution input");
    }
    exact.emplace_back(x);  // dyadic, exact
  }
  return from_samples(std::move(exact));
}

EmpiricalDistribution EmpiricalDistribution::from_weighted(std::vector<Rational> samples,
                                                           std::vector<Rational> weights) {
  if (samples.empty()) {
    throw EmptyInput("empirical distribution needs at least one sample");
  }
  if (samples.size() != weights.size()) {
    throw std::invalid_argument("weights must match samples in length");
  }
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });

  EmpiricalDistribution dist;
  dist.samples_.reserve(samples.size());
  dist.weights_.reserve(samples.size());
  dist.cum_weights_.reserve(samples.size());
  Rational running(0);
  for (std::size_t idx : order) {
    if (weights[idx] <= 0) {
      throw std::invalid_argument("weights must be strictly positive");
    }
    running += weights[idx];
    dist.samples_.push_back(std::move(samples[idx]));
    dist.weights_.push_back(std::move(weights[idx]));
    dist.cum_weights_.push_back(running);
  }
  dist.total_weight_ = running;
  return dist;
}

EmpiricalDistribution EmpiricalDistribution::point_mass(Rational value) {
  return from_samples({std::move(value)});
}

void EmpiricalDistribution::ensure_nonempty(const char* op) const {
  if (samples_.empty()) {
    throw EmptyInput(std::string(op) + " on an empty distribution");
  }
}

const Rational& EmpiricalDistribution::min() const {
  ensure_nonempty("min");
  return samples_.front();
}

const Rational& EmpiricalDistribution::max() const {
  ensure_nonempty("max");
  return samples_.back();
}

Rational EmpiricalDistribution::cdf(const Rational& x) const {
  ensure_nonempty("cdf");
  auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  const std::size_t below_or_equal = static_cast<std::size_t>(it - samples_.begin());
  if (below_or_equal == 0) {
    return Rational(0);
  }
  if (weights_.empty()) {
    return Rational(BigInt(static_cast<unsigned long long>(below_or_equal)),
                    BigInt(static_cast<unsigned long long>(samples_.size())));
  }
  return cum_weights_[below_or_equal - 1] / total_weight_;
}

const Rational& EmpiricalDistribution::quantile(const Rational& q) const {
  ensure_nonempty("quantile");
  if (q < 0 || q > 1) {
    throw QuantileOutOfRange("quantile must lie in [0, 1], got " + rational_to_decimal(q));
  }
  if (weights_.empty()) {
    return samples_[nearest_rank_index(q, samples_.size())];
  }
  const Rational target = q * total_weight_;
  auto it = std::lower_bound(cum_weights_.begin(), cum_weights_.end(), target);
  if (it == cum_weights_.end()) {
    return samples_.back();
  }
  return samples_[static_cast<std::size_t>(it - cum_weights_.begin())];
}

QuantileSummary EmpiricalDistribution::summarize() const {
  ensure_nonempty("summarize");
  return QuantileSummary{quantile(Rational(1, 4)), quantile(Rational(1, 2)),
                         quantile(Rational(19, 20))};
}

std::size_t EmpiricalDistribution::sample_index(SeededRng& rng) const {
  ensure_nonempty("sample");
  const std::uint64_t k = rng.next_u64();
  if (weights_.empty()) {
    // smallest i with (i+1)/n >= k/2^64, i.e. i = ceil(k*n / 2^64) - 1
    const auto n = static_cast<unsigned __int128>(samples_.size());
    const unsigned __int128 prod = static_cast<unsigned __int128>(k) * n;
    unsigned __int128 rank = prod >> 64;
    if ((prod & (~static_cast<unsigned __int128>(0) >> 64)) != 0) {
      ++rank;
    }
    if (rank == 0) {
      return 0;
    }
    return static_cast<std::size_t>(rank - 1);
  }
  // smallest i with cum_i / total >= k / 2^64
  const Rational u(BigInt(k), BigInt(1) << 64);
  const Rational target = u * total_weight_;
  auto it = std::lower_bound(cum_weights_.begin(), cum_weights_.end(), target);
  if (it == cum_weights_.end()) {
    return samples_.size() - 1;
  }
  return static_cast<std::size_t>(it - cum_weights_.begin());
}

const Rational& EmpiricalDistribution::sample(SeededRng& rng) const {
  return samples_[sample_index(rng)];
}

Rational EmpiricalDistribution::iq_width() const {
  ensure_nonempty("iq_width");
  return quantile(Rational(3, 4)) - quantile(Rational(1, 4));
}

namespace {

std::string rational_text(const Rational& r) {
  std::ostringstream os;
  os << r;
  return os.str();
}

}  // namespace

void write_ecdf_cache(std::ostream& out, const EmpiricalDistribution& dist,
                      const EcdfCacheMeta& meta) {
  if (dist.empty()) {
    throw EmptyInput("refusing to write an empty ECDF cache");
  }
  out << "# mevsim ecdf v1\n";
  out << "count=" << dist.size() << "\n";
  out << "units=" << meta.units << "\n";
  out << "source=" << meta.source << "\n";
  out << "weighted=" << (dist.weighted() ? 1 : 0) << "\n";
  for (std::size_t i = 0; i < dist.size(); ++i) {
    out << rational_text(dist.samples()[i]);
    if (dist.weighted()) {
      out << ' ' << rational_text(dist.weights()[i]);
    }
    out << '\n';
  }
}

void write_ecdf_cache_file(const std::filesystem::path& path,
                           const EmpiricalDistribution& dist, const EcdfCacheMeta& meta) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open ECDF cache for writing: " + path.string());
  }
  write_ecdf_cache(out, dist, meta);
  if (!out) {
    throw std::runtime_error("failed writing ECDF cache: " + path.string());
  }
}

std::pair<EmpiricalDistribution, EcdfCacheMeta> read_ecdf_cache(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "# mevsim ecdf v1") {
    throw std::runtime_error("not an ECDF cache (missing magic header)");
  }
  auto read_kv = [&](const std::string& key) {
    if (!std::getline(in, line) || line.rfind(key + "=", 0) != 0) {
      throw std::runtime_error("ECDF cache missing header field '" + key + "'");
    }
    return line.substr(key.size() + 1);
  };
  const std::size_t count = std::stoull(read_kv("count"));
  EcdfCacheMeta meta;
  meta.units = read_kv("units");
  meta.source = read_kv("source");
  const bool weighted = read_kv("weighted") == "1";

  std::vector<Rational> samples;
  std::vector<Rational> weights;
  samples.reserve(count);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string sample_text, weight_text;
    row >> sample_text;
    samples.push_back(parse_rational(sample_text));
    if (weighted) {
      if (!(row >> weight_text)) {
        throw std::runtime_error("weighted ECDF cache row without a weight");
      }
      weights.push_back(parse_rational(weight_text));
    }
  }
  if (samples.size() != count) {
    throw std::runtime_error("ECDF cache row count does not match header count");
  }
  if (!std::is_sorted(samples.begin(), samples.end())) {
    throw std::runtime_error("ECDF cache samples are not sorted");
  }
  auto dist = weighted ? EmpiricalDistribution::from_weighted(std::move(samples), std::move(weights))
                       : EmpiricalDistribution::from_samples(std::move(samples));
  return {std::move(dist), std::move(meta)};
}

std::pair<EmpiricalDistribution, EcdfCacheMeta> read_ecdf_cache_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open ECDF cache: " + path.string());
  }
  return read_ecdf_cache(in);
}

}  // namespace mevsim
