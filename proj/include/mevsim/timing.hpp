#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mevsim/auction.hpp"
#include "mevsim/distribution.hpp"
#include "mevsim/errors.hpp"
#include "mevsim/rng.hpp"

namespace mevsim::sim {

struct AllDrawsSkipped : std::runtime_error {
  explicit AllDrawsSkipped(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr SlotTimeMs kDefaultDelayThreshold{950};
inline constexpr SlotTimeMs kDefaultDelayCap{1'200};

/// One relay as the proposer sees it: which bids it serves, how long bids
/// lag before becoming eligible, and the artificial getHeader delay applied
/// when querying it. relay_id "*" matches every relay in the trace corpus.
struct RelayConfig {
  std::string relay_id{"*"};
  bool optimistic{false};
  EmpiricalDistribution eligibility_lag;  // ms, samples within [0, 2000]
  SlotTimeMs artificial_delay{0};

  void validate() const;
};

struct ProposerStrategy {
  std::string name;
  std::vector<RelayConfig> relays;

  void validate(SlotTimeMs delay_cap = kDefaultDelayCap) const;
};

/// Receiving-to-eligibility lag estimate: uniform grid over 100..200 ms.
EmpiricalDistribution default_nonoptimistic_lag();
/// Optimistic relays skip full validation before forwarding, halving the lag.
EmpiricalDistribution default_optimistic_lag();

/// The four pilot presets. Delays: benchmark 0, aggressive = threshold,
/// normal 700 ms, moderate = threshold - 100 ms.
ProposerStrategy benchmark_preset();
ProposerStrategy aggressive_preset(SlotTimeMs threshold = kDefaultDelayThreshold);
ProposerStrategy normal_preset();
ProposerStrategy moderate_preset(SlotTimeMs threshold = kDefaultDelayThreshold);
std::vector<ProposerStrategy> default_presets(SlotTimeMs threshold = kDefaultDelayThreshold);

/// Piecewise-linear missed-slot probability over effective query time.
/// Flat before the first knot and after the last. Default: 0 through 950 ms,
/// rising linearly to 0.05 at 2000 ms.
class HazardModel {
 public:
  HazardModel();

  static HazardModel from_knots(std::vector<std::pair<SlotTimeMs, Rational>> knots);
  static HazardModel zero();

  Rational probability_at(SlotTimeMs t) const;
  const std::vector<std::pair<SlotTimeMs, Rational>>& knots() const { return knots_; }

 private:
  std::vector<std::pair<SlotTimeMs, Rational>> knots_;
};

struct SlotOutcome {
  std::uint64_t slot{0};
  std::optional<BidTrace> winning_bid;
  bool missed{false};
  SlotTimeMs effective_query_time{0};
  /// Winner value over the undelayed (t = 0) selection, minus one; zero when
  /// either side is unavailable.
  Rational uplift_vs_baseline{0};
};

struct SimConfig {
  std::uint64_t n_runs{1'000};
  SlotTimeMs delay_threshold{kDefaultDelayThreshold};
  std::uint64_t seed{0};
  bool supersede{false};

  void validate() const;
};

/// value(best at delay_time) / value(best at baseline_time) - 1.
/// Never negative with supersede off. Throws NoBaselineBid when nothing is
/// eligible (or only zero-value bids are) at baseline_time.
Rational uplift_per_block(const SlotAuction& auction, SlotTimeMs baseline_time,
                          SlotTimeMs delay_time, bool supersede);

struct UpliftSimulationResult {
  EmpiricalDistribution uplifts;
  std::uint64_t collected_runs{0};
  std::uint64_t skipped_runs{0};  // draws with no eligible baseline bid
};

/// Monte Carlo over (baseline eligibility draw, uniform auction draw) pairs;
/// each run measures the uplift of delaying to max(baseline, threshold).
/// Runs use per-index rng streams, so results are identical however the
/// loop is scheduled.
UpliftSimulationResult run_uplift_simulation(std::span<const SlotAuction> auctions,
                                             const EmpiricalDistribution& baseline_dist,
                                             const SimConfig& config);

/// One proposal under a strategy: per relay, the effective query time is
/// artificial_delay plus a lag draw (consumed in relay order); the proposer
/// takes the best bid across relays, then a miss is drawn from the hazard at
/// the latest query time. No eligible bid at all means no winner, not a miss.
SlotOutcome simulate_slot(const SlotAuction& auction, const ProposerStrategy& strategy,
                          const HazardModel& hazard, SeededRng& rng);

struct StrategyComparison {
  struct Entry {
    std::string name;
    std::optional<QuantileSummary> winning_eligibility_ms;
    std::optional<QuantileSummary> uplift_vs_benchmark;
    Rational missed_rate{0};
    std::uint64_t slots{0};
    std::uint64_t slots_with_winner{0};
    std::uint64_t uplift_samples{0};
  };
  std::size_t benchmark_index{0};
  std::vector<Entry> entries;
};

/// Runs every strategy over every auction with common random numbers
/// (per-auction streams shared across strategies), and reports winning-bid
/// eligibility quantiles, uplift vs the benchmark entry, and miss rates.
StrategyComparison compare_strategies(std::span<const SlotAuction> auctions,
                                      const std::vector<ProposerStrategy>& strategies,
                                      const HazardModel& hazard, const SimConfig& config);

/// Fills in eligible_at = received_at + lag draw for bids whose traces
/// carried no explicit eligibility; explicit ones pass through verbatim.
std::vector<SlotAuction> synthesize_eligibility(std::span<const SlotAuction> auctions,
                                                const EmpiricalDistribution& lag,
                                                std::uint64_t seed);

/// Declarative strategy/hazard profile, key-value text format (see README).
struct SimProfile {
  std::vector<ProposerStrategy> strategies;
  HazardModel hazard;
};

SimProfile load_sim_profile(std::istream& in);
SimProfile load_sim_profile_file(const std::filesystem::path& path);

}  // namespace mevsim::sim
