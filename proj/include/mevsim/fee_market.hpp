#pragma once

#include <cstdint>
#include <span>

#include "mevsim/auction.hpp"
#include "mevsim/errors.hpp"
#include "mevsim/numeric.hpp"
#include "mevsim/timing.hpp"

namespace mevsim::fee {

struct GasAboveLimit : std::invalid_argument {
  explicit GasAboveLimit(const std::string& what) : std::invalid_argument(what) {}
};

/// Base-fee controller state. Mainnet defaults: 15M target, 30M limit,
/// adjustment denominator 8.
struct FeeMarketState {
  WeiAmount base_fee_per_gas{1'000'000'000ull};  // 1 gwei
  std::uint64_t gas_target{15'000'000};
  std::uint64_t gas_limit{30'000'000};
  std::uint64_t adjustment_denominator{8};

  void validate() const;
};

/// Next-slot base fee per the canonical controller, bit-exact integer
/// arithmetic with floor division. Throws GasAboveLimit past the limit.
WeiAmount next_base_fee(const FeeMarketState& state, std::uint64_t gas_used);

/// Fractional increase in next-slot burn caused by delaying the header
/// request: winner gas at `baseline_time` vs `delay_time`, each fed through
/// the controller, next-slot gas held at target (so the burn ratio reduces
/// to the base-fee ratio). Negative values are possible under supersede.
Rational burn_increase_for_delay(const SlotAuction& auction, SlotTimeMs baseline_time,
                                 SlotTimeMs delay_time, const FeeMarketState& state);

struct BurnImpact {
  Rational burn_increase_pct;
  WeiAmount adjusted_reward;
  Rational reward_decrease_pct;
};

/// adjusted = mev_reward - burnt * burn_increase_pct, floored at zero wei;
/// decrease is relative to the original reward (0 when the reward is 0).
BurnImpact burn_impact_on_reward(const WeiAmount& mev_reward, const WeiAmount& burnt,
                                 const Rational& burn_increase_pct);

struct BurnSimulationResult {
  EmpiricalDistribution burn_increases;  // fractions, negative tail possible
  std::uint64_t collected_runs{0};
  std::uint64_t skipped_runs{0};
};

/// Monte Carlo counterpart of burn_increase_for_delay: per run, a baseline
/// eligibility draw and a uniform auction draw, delayed to
/// max(baseline, config.delay_threshold). Same draw streams as
/// run_uplift_simulation, so the two views describe the same runs.
BurnSimulationResult run_burn_simulation(std::span<const SlotAuction> auctions,
                                         const EmpiricalDistribution& baseline_dist,
                                         const sim::SimConfig& config,
                                         const FeeMarketState& state);

}  // namespace mevsim::fee
