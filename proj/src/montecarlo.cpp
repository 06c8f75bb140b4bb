#include "mevsim/montecarlo.hpp"

#include <algorithm>
#include <optional>

#include "mevsim/parallel.hpp"

namespace mevsim::mc {

void VotingPower::validate() const {
  if (fraction < 0 || fraction > 1) {
    throw std::invalid_argument("voting power must lie in [0, 1]");
  }
}

void RewardModel::validate() const {
  if (per_block_mev.empty()) {
    throw EmptyInput("reward model needs a per-block MEV distribution");
  }
  if (uplift.empty()) {
    throw EmptyInput("reward model needs an uplift distribution");
  }
  if (slots_per_week == 0) {
    throw std::invalid_argument("slots_per_week must be positive");
  }
  if (el_share <= 0 || el_share >= 1) {
    throw std::invalid_argument("el_share must lie in (0, 1)");
  }
}

std::uint64_t proposals_in_period(const VotingPower& vp, std::uint64_t n_slots, SeededRng& rng) {
  vp.validate();
  return binomial_draw(rng, n_slots, to_double(vp.fraction));
}

Rational weighted_percentage_uplift(std::span<const std::pair<Rational, Rational>> pairs) {
  if (pairs.empty()) {
    throw EmptyInput("weighted_percentage_uplift needs at least one pair");
  }
  Rational weighted(0);
  Rational total(0);
  for (const auto& [mev, uplift] : pairs) {
    weighted += mev * uplift;
    total += mev;
  }
  if (total == 0) {
    throw std::invalid_argument("total MEV weight is zero");
  }
  return weighted / total;
}

namespace {

PeriodUpliftResult period_uplift_impl(const VotingPower& vp, const RewardModel& model,
                                      std::uint64_t n_runs, std::uint64_t n_slots,
                                      const SeededRng& base_rng) {
  vp.validate();
  model.validate();
  if (n_runs < 1) {
    throw std::invalid_argument("n_runs must be at least 1");
  }

  // A constant per-block uplift is scale-free: the weighted average equals
  // the constant whenever at least one proposal lands.
  const bool constant_uplift = model.uplift.min() == model.uplift.max();
  const double p = to_double(vp.fraction);

  // Hot path runs on doubles; sample exactness is preserved by drawing
  // indices and looking values up in these caches.
  std::vector<double> mev_cache(model.per_block_mev.size());
  for (std::size_t i = 0; i < mev_cache.size(); ++i) {
    mev_cache[i] = to_double(model.per_block_mev.samples()[i]);
  }
  std::vector<double> uplift_cache(model.uplift.size());
  for (std::size_t i = 0; i < uplift_cache.size(); ++i) {
    uplift_cache[i] = to_double(model.uplift.samples()[i]);
  }

  std::vector<std::optional<Rational>> results(n_runs);
  parallel_for(n_runs, [&](std::size_t run) {
    SeededRng rng = base_rng.split(run);
    const std::uint64_t proposals = binomial_draw(rng, n_slots, p);
    if (proposals == 0) {
      return;  // degenerate: nothing proposed this period
    }
    if (constant_uplift) {
      results[run] = model.uplift.min();
      return;
    }
    double weighted = 0;
    double total = 0;
    for (std::uint64_t k = 0; k < proposals; ++k) {
      const double mev = mev_cache[model.per_block_mev.sample_index(rng)];
      const double uplift = uplift_cache[model.uplift.sample_index(rng)];
      weighted += mev * uplift;
      total += mev;
    }
    if (total <= 0) {
      return;  // degenerate: all drawn blocks carried zero MEV
    }
    results[run] = Rational(weighted / total);
  });

  std::vector<Rational> collected;
  collected.reserve(n_runs);
  std::uint64_t degenerate = 0;
  for (auto& r : results) {
    if (r) {
      collected.push_back(std::move(*r));
    } else {
      ++degenerate;
    }
  }
  if (collected.empty()) {
    throw AllRunsDegenerate("every run drew zero proposals or zero total MEV");
  }
  PeriodUpliftResult out;
  out.runs = n_runs;
  out.degenerate_runs = degenerate;
  out.dist = EmpiricalDistribution::from_samples(std::move(collected));
  return out;
}

}  // namespace

PeriodUpliftResult period_uplift(const VotingPower& vp, const RewardModel& model,
                                 std::uint64_t n_runs, SeededRng& rng) {
  return period_uplift_impl(vp, model, n_runs, model.slots_per_week, rng);
}

AprDelta apr_delta(const Rational& median_uplift, const RewardModel& model) {
  if (median_uplift < 0) {
    throw std::invalid_argument("median uplift must be non-negative");
  }
  AprDelta delta;
  delta.relative = model.el_share * median_uplift;
  delta.absolute = model.base_apr * delta.relative;
  delta.new_apr = model.base_apr + delta.absolute;
  return delta;
}

UpliftReport make_report(Horizon horizon, const PeriodUpliftResult& period,
                         const RewardModel& model) {
  UpliftReport report;
  report.horizon = horizon;
  report.summary = period.dist.summarize();
  report.dist = period.dist;
  report.runs = period.runs;
  report.degenerate_runs = period.degenerate_runs;
  auto scale = [&](const Rational& uplift, bool absolute) {
    const Rational rel = model.el_share * uplift;
    return absolute ? Rational(model.base_apr * rel) : rel;
  };
  report.apr_delta_relative = QuantileSummary{scale(report.summary.q25, false),
                                              scale(report.summary.q50, false),
                                              scale(report.summary.q95, false)};
  report.apr_delta_absolute = QuantileSummary{scale(report.summary.q25, true),
                                              scale(report.summary.q50, true),
                                              scale(report.summary.q95, true)};
  return report;
}

UpliftReport annual_pilot_uplift(const RewardModel& model,
                                 const EmpiricalDistribution& pilot_eligibility,
                                 std::span<const SlotAuction> auctions, const VotingPower& vp,
                                 const sim::SimConfig& config,
                                 const EmpiricalDistribution* baseline_override) {
  config.validate();
  model.validate();
  vp.validate();
  if (pilot_eligibility.empty()) {
    throw EmptyInput("annual_pilot_uplift needs a pilot eligibility distribution");
  }
  if (auctions.empty()) {
    throw EmptyInput("annual_pilot_uplift needs auctions");
  }

  std::vector<SlotAuction> views;
  if (config.supersede) {
    views.reserve(auctions.size());
    for (const SlotAuction& a : auctions) {
      views.push_back(a.with_supersede(true));
    }
  }
  const std::span<const SlotAuction> pool = config.supersede ? std::span<const SlotAuction>(views)
                                                             : auctions;

  // Baseline draws: caller-supplied, or the corpus's own winning-bid
  // eligibility.
  EmpiricalDistribution baseline_dist;
  if (baseline_override != nullptr && !baseline_override->empty()) {
    baseline_dist = *baseline_override;
  } else {
    std::vector<Rational> winners;
    for (const SlotAuction& auction : pool) {
      const BidTrace* winner = auction_winner(auction);
      if (winner != nullptr && !winner->value.is_zero()) {
        winners.emplace_back(winner->eligible_at.ms);
      }
    }
    if (winners.empty()) {
      throw EmptyInput("no auction has a winning bid within the eligibility cutoff");
    }
    baseline_dist = EmpiricalDistribution::from_samples(std::move(winners));
  }

  // Per-block uplift under realized pilot delays; negative when a pilot
  // draw precedes the baseline draw.
  std::vector<std::optional<Rational>> draws(config.n_runs);
  parallel_for(config.n_runs, [&](std::size_t i) {
    SeededRng baseline_rng(config.seed, i * 4 + 0);
    SeededRng auction_rng(config.seed, i * 4 + 1);
    SeededRng delay_rng(config.seed, i * 4 + 2);
    const SlotTimeMs baseline_time = floor_to_ms(baseline_dist.sample(baseline_rng));
    const SlotTimeMs delay_time = floor_to_ms(pilot_eligibility.sample(delay_rng));
    const SlotAuction& auction = pool[auction_rng.uniform_below(pool.size())];
    const BidTrace* baseline =
        best_eligible_bid_ptr(auction, RelayFilter::all(), baseline_time);
    if (baseline == nullptr || baseline->value.is_zero()) {
      return;
    }
    const BidTrace* delayed = best_eligible_bid_ptr(auction, RelayFilter::all(), delay_time);
    if (delayed == nullptr) {
      return;  // pilot selection before the first bid of the auction
    }
    draws[i] = delayed->value.to_rational() / baseline->value.to_rational() - 1;
  });

  std::vector<Rational> uplifts;
  uplifts.reserve(config.n_runs);
  std::uint64_t skipped = 0;
  for (auto& d : draws) {
    if (d) {
      uplifts.push_back(std::move(*d));
    } else {
      ++skipped;
    }
  }
  if (uplifts.empty()) {
    throw sim::AllDrawsSkipped("every pilot draw lacked a usable baseline or selection");
  }

  RewardModel annual_model = model;
  annual_model.uplift = EmpiricalDistribution::from_samples(std::move(uplifts));

  const std::uint64_t annual_slots = model.slots_per_week * 52;
  SeededRng period_rng(config.seed, 0x616E6E75616Cull);  // dedicated stream
  const PeriodUpliftResult period =
      period_uplift_impl(vp, annual_model, config.n_runs, annual_slots, period_rng);

  UpliftReport report = make_report(Horizon::annual, period, model);
  report.skipped_uplift_draws = skipped;
  return report;
}

}  // namespace mevsim::mc
