#include "mevsim/fee_market.hpp"

#include <algorithm>
#include <optional>

#include "mevsim/parallel.hpp"

namespace mevsim::fee {

void FeeMarketState::validate() const {
  if (gas_target == 0 || gas_limit == 0 || adjustment_denominator == 0) {
    throw std::invalid_argument("fee market parameters must be positive");
  }
  if (gas_target != gas_limit / 2) {
    throw std::invalid_argument("gas_target must equal gas_limit / 2");
  }
  if (base_fee_per_gas.is_zero()) {
    throw std::invalid_argument("base fee must be positive");
  }
}

WeiAmount next_base_fee(const FeeMarketState& state, std::uint64_t gas_used) {
  state.validate();
  if (gas_used > state.gas_limit) {
    throw GasAboveLimit("gas_used " + std::to_string(gas_used) + " above limit " +
                        std::to_string(state.gas_limit));
  }
  const Uint256& fee = state.base_fee_per_gas.wei;
  if (gas_used == state.gas_target) {
    return state.base_fee_per_gas;
  }
  if (gas_used > state.gas_target) {
    Uint256 delta =
        fee * (gas_used - state.gas_target) / state.gas_target / state.adjustment_denominator;
    if (delta.is_zero()) {
      delta = 1;  // canonical controller raises by at least one wei
    }
    return WeiAmount(Uint256(fee + delta));
  }
  Uint256 delta =
      fee * (state.gas_target - gas_used) / state.gas_target / state.adjustment_denominator;
  return WeiAmount(Uint256(fee - delta));
}

Rational burn_increase_for_delay(const SlotAuction& auction, SlotTimeMs baseline_time,
                                 SlotTimeMs delay_time, const FeeMarketState& state) {
  if (delay_time < baseline_time) {
    throw std::invalid_argument("delay_time precedes baseline_time");
  }
  const BidTrace* baseline = best_eligible_bid_ptr(auction, RelayFilter::all(), baseline_time);
  if (baseline == nullptr) {
    throw NoBaselineBid("no bid eligible at baseline time in slot " +
                        std::to_string(auction.slot()));
  }
  const BidTrace* delayed = best_eligible_bid_ptr(auction, RelayFilter::all(), delay_time);
  // A live bid always exists at delay_time once one existed at baseline_time.
  const WeiAmount fee_baseline = next_base_fee(state, baseline->gas_used);
  const WeiAmount fee_delayed = next_base_fee(state, delayed->gas_used);
  return fee_delayed.to_rational() / fee_baseline.to_rational() - 1;
}

BurnImpact burn_impact_on_reward(const WeiAmount& mev_reward, const WeiAmount& burnt,
                                 const Rational& burn_increase_pct) {
  const Rational reward = mev_reward.to_rational();
  Rational adjusted = reward - burnt.to_rational() * burn_increase_pct;
  if (adjusted < 0) {
    adjusted = 0;
  }
  BurnImpact impact;
  impact.burn_increase_pct = burn_increase_pct;
  impact.adjusted_reward = WeiAmount(floor_rational(adjusted).convert_to<Uint256>());
  impact.reward_decrease_pct =
      reward > 0 ? (reward - impact.adjusted_reward.to_rational()) / reward : Rational(0);
  return impact;
}

BurnSimulationResult run_burn_simulation(std::span<const SlotAuction> auctions,
                                         const EmpiricalDistribution& baseline_dist,
                                         const sim::SimConfig& config,
                                         const FeeMarketState& state) {
  config.validate();
  state.validate();
  if (auctions.empty()) {
    throw EmptyInput("run_burn_simulation needs at least one auction");
  }
  if (baseline_dist.empty()) {
    throw EmptyInput("run_burn_simulation needs a baseline distribution");
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

  std::vector<std::optional<Rational>> results(config.n_runs);
  parallel_for(config.n_runs, [&](std::size_t i) {
    SeededRng baseline_rng(config.seed, i * 4 + 0);
    SeededRng auction_rng(config.seed, i * 4 + 1);
    const SlotTimeMs baseline_time = floor_to_ms(baseline_dist.sample(baseline_rng));
    const SlotAuction& auction = pool[auction_rng.uniform_below(pool.size())];
    const SlotTimeMs delay_time = std::max(baseline_time, config.delay_threshold);
    try {
      results[i] = burn_increase_for_delay(auction, baseline_time, delay_time, state);
    } catch (const NoBaselineBid&) {
      // counted as skipped below
    }
  });

  std::vector<Rational> collected;
  collected.reserve(config.n_runs);
  std::uint64_t skipped = 0;
  for (auto& r : results) {
    if (r) {
      collected.push_back(std::move(*r));
    } else {
      ++skipped;
    }
  }
  if (collected.empty()) {
    throw sim::AllDrawsSkipped("every burn draw lacked an eligible baseline bid");
  }
  BurnSimulationResult out;
  out.collected_runs = collected.size();
  out.skipped_runs = skipped;
  out.burn_increases = EmpiricalDistribution::from_samples(std::move(collected));
  return out;
}

}  // namespace mevsim::fee
