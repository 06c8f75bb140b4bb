#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mevsim/distribution.hpp"
#include "mevsim/errors.hpp"
#include "mevsim/rng.hpp"
#include "mevsim/timing.hpp"

namespace mevsim::mc {

struct AllRunsDegenerate : std::runtime_error {
  explicit AllRunsDegenerate(const std::string& what) : std::runtime_error(what) {}
};

/// Operator's fraction of total stake: its per-slot proposal probability.
struct VotingPower {
  Rational fraction{0};

  void validate() const;
};

/// Inputs for reward projections. Defaults: 50,400 slots per week (12 s
/// slots), execution layer carries 30% of rewards, 4.2% base APR.
struct RewardModel {
  EmpiricalDistribution per_block_mev;  // wei
  EmpiricalDistribution uplift;         // fraction per block
  std::uint64_t slots_per_week{50'400};
  Rational el_share{3, 10};
  Rational base_apr{21, 500};

  void validate() const;
};

/// One Binomial(n_slots, voting power) draw.
std::uint64_t proposals_in_period(const VotingPower& vp, std::uint64_t n_slots, SeededRng& rng);

/// MEV-weighted uplift over a set of (mev, uplift) pairs:
/// sum(mev * uplift) / sum(mev). Exact rational arithmetic.
Rational weighted_percentage_uplift(std::span<const std::pair<Rational, Rational>> pairs);

struct PeriodUpliftResult {
  EmpiricalDistribution dist;  // percentage uplift per non-degenerate run
  std::uint64_t runs{0};
  std::uint64_t degenerate_runs{0};  // zero proposals or zero total MEV
};

/// Weekly-horizon Monte Carlo: each run draws a proposal count, then that
/// many independent (mev, uplift) pairs, and records the MEV-weighted
/// percentage uplift. Degenerate runs are counted, not silently dropped.
/// Runs use rng.split(run_index), so execution order never matters.
PeriodUpliftResult period_uplift(const VotingPower& vp, const RewardModel& model,
                                 std::uint64_t n_runs, SeededRng& rng);

struct AprDelta {
  Rational absolute;  // percentage points of APR, as a fraction
  Rational relative;  // share of base APR
  Rational new_apr;
};

/// absolute = base_apr * el_share * median_uplift; relative = el_share *
/// median_uplift.
AprDelta apr_delta(const Rational& median_uplift, const RewardModel& model);

enum class Horizon { weekly, annual };

struct UpliftReport {
  Horizon horizon{Horizon::weekly};
  QuantileSummary summary;             // percentage uplift
  QuantileSummary apr_delta_absolute;  // per-quantile APR delta
  QuantileSummary apr_delta_relative;
  EmpiricalDistribution dist;          // the underlying per-run uplifts
  std::uint64_t runs{0};
  std::uint64_t degenerate_runs{0};
  std::uint64_t skipped_uplift_draws{0};
};

UpliftReport make_report(Horizon horizon, const PeriodUpliftResult& period,
                         const RewardModel& model);

/// Annual projection under realized pilot delays: per-run delay times come
/// from `pilot_eligibility` instead of a fixed threshold, the baseline from
/// `baseline_override` when given (e.g. a delivered-payload eligibility
/// ECDF) or else the corpus's own winning-bid eligibility. Uplifts may be
/// negative when a pilot draw lands before the baseline draw.
UpliftReport annual_pilot_uplift(const RewardModel& model,
                                 const EmpiricalDistribution& pilot_eligibility,
                                 std::span<const SlotAuction> auctions, const VotingPower& vp,
                                 const sim::SimConfig& config,
                                 const EmpiricalDistribution* baseline_override = nullptr);

}  // namespace mevsim::mc
