#include "mevsim/timing.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include "mevsim/parallel.hpp"

namespace mevsim::sim {

namespace {

// Stream layout for per-run derived rngs; keeps draw kinds decorrelated.
constexpr std::uint64_t kStreamStride = 4;
constexpr std::uint64_t kBaselineDraw = 0;
constexpr std::uint64_t kAuctionDraw = 1;
constexpr std::uint64_t kDelayDraw = 2;

EmpiricalDistribution uniform_grid_ms(std::int64_t lo, std::int64_t hi, std::int64_t step) {
  std::vector<Rational> samples;
  for (std::int64_t v = lo; v <= hi; v += step) {
    samples.emplace_back(v);
  }
  return EmpiricalDistribution::from_samples(std::move(samples));
}

}  // namespace

void RelayConfig::validate() const {
  if (artificial_delay < SlotTimeMs{0}) {
    throw std::invalid_argument("artificial_delay must be non-negative");
  }
  if (eligibility_lag.empty()) {
    throw std::invalid_argument("relay '" + relay_id + "' has no eligibility lag samples");
  }
  if (eligibility_lag.min() < 0 || eligibility_lag.max() > 2000) {
    throw std::invalid_argument("eligibility lag samples must lie within [0, 2000] ms");
  }
}

void ProposerStrategy::validate(SlotTimeMs delay_cap) const {
  if (relays.empty()) {
    throw std::invalid_argument("strategy '" + name + "' needs at least one relay");
  }
  for (const RelayConfig& relay : relays) {
    relay.validate();
    if (relay.artificial_delay > delay_cap) {
      throw std::invalid_argument("strategy '" + name + "' delay exceeds the " +
                                  std::to_string(delay_cap.ms) + " ms cap");
    }
  }
}

EmpiricalDistribution default_nonoptimistic_lag() { return uniform_grid_ms(100, 200, 5); }

EmpiricalDistribution default_optimistic_lag() { return uniform_grid_ms(50, 100, 5); }

ProposerStrategy benchmark_preset() {
  RelayConfig relay{.relay_id = "*",
                    .optimistic = false,
                    .eligibility_lag = default_nonoptimistic_lag(),
                    .artificial_delay = SlotTimeMs{0}};
  return ProposerStrategy{.name = "benchmark", .relays = {relay, relay}};
}

ProposerStrategy aggressive_preset(SlotTimeMs threshold) {
  return ProposerStrategy{
      .name = "aggressive",
      .relays = {RelayConfig{.relay_id = "*",
                             .optimistic = false,
                             .eligibility_lag = default_nonoptimistic_lag(),
                             .artificial_delay = threshold}}};
}

ProposerStrategy normal_preset() {
  return ProposerStrategy{
      .name = "normal",
      .relays = {RelayConfig{.relay_id = "*",
                             .optimistic = true,
                             .eligibility_lag = default_optimistic_lag(),
                             .artificial_delay = SlotTimeMs{700}}}};
}

ProposerStrategy moderate_preset(SlotTimeMs threshold) {
  return ProposerStrategy{
      .name = "moderate",
      .relays = {RelayConfig{.relay_id = "*",
                             .optimistic = true,
                             .eligibility_lag = default_optimistic_lag(),
                             .artificial_delay = SlotTimeMs{threshold.ms - 100}}}};
}

std::vector<ProposerStrategy> default_presets(SlotTimeMs threshold) {
  return {benchmark_preset(), aggressive_preset(threshold), normal_preset(),
          moderate_preset(threshold)};
}

HazardModel::HazardModel()
    : knots_{{SlotTimeMs{950}, Rational(0)}, {SlotTimeMs{2000}, Rational(1, 20)}} {}

HazardModel HazardModel::from_knots(std::vector<std::pair<SlotTimeMs, Rational>> knots) {
  if (knots.empty()) {
    throw EmptyInput("hazard model needs at least one knot");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (knots[i].second < 0 || knots[i].second > 1) {
      throw std::invalid_argument("hazard probabilities must lie in [0, 1]");
    }
    if (i > 0 && knots[i].first <= knots[i - 1].first) {
      throw std::invalid_argument("hazard knots must have strictly increasing times");
    }
    if (i > 0 && knots[i].second < knots[i - 1].second) {
      throw std::invalid_argument("hazard probabilities must be non-decreasing in time");
    }
  }
  HazardModel model;
  model.knots_ = std::move(knots);
  return model;
}

HazardModel HazardModel::zero() {
  return from_knots({{SlotTimeMs{0}, Rational(0)}});
}

Rational HazardModel::probability_at(SlotTimeMs t) const {
  if (t <= knots_.front().first) {
    return knots_.front().second;
  }
  if (t >= knots_.back().first) {
    return knots_.back().second;
  }
  for (std::size_t i = 1; i < knots_.size(); ++i) {
    if (t <= knots_[i].first) {
      const auto& [t0, p0] = knots_[i - 1];
      const auto& [t1, p1] = knots_[i];
      return p0 + (p1 - p0) * Rational(t.ms - t0.ms) / Rational(t1.ms - t0.ms);
    }
  }
  return knots_.back().second;  // unreachable
}

void SimConfig::validate() const {
  if (n_runs < 1) {
    throw std::invalid_argument("n_runs must be at least 1");
  }
  if (delay_threshold < SlotTimeMs{0} || delay_threshold > SlotTimeMs{2000}) {
    throw std::invalid_argument("delay_threshold must lie within [0, 2000] ms");
  }
}

Rational uplift_per_block(const SlotAuction& auction, SlotTimeMs baseline_time,
                          SlotTimeMs delay_time, bool supersede) {
  if (delay_time < baseline_time) {
    throw std::invalid_argument("delay_time must not precede baseline_time");
  }
  const SlotAuction* view = &auction;
  SlotAuction owned;
  if (auction.supersede() != supersede) {
    owned = auction.with_supersede(supersede);
    view = &owned;
  }
  const BidTrace* baseline = best_eligible_bid_ptr(*view, RelayFilter::all(), baseline_time);
  if (baseline == nullptr || baseline->value.is_zero()) {
    throw NoBaselineBid("no usable bid eligible at baseline time in slot " +
                        std::to_string(auction.slot()));
  }
  const BidTrace* delayed = best_eligible_bid_ptr(*view, RelayFilter::all(), delay_time);
  return delayed->value.to_rational() / baseline->value.to_rational() - 1;
}

UpliftSimulationResult run_uplift_simulation(std::span<const SlotAuction> auctions,
                                             const EmpiricalDistribution& baseline_dist,
                                             const SimConfig& config) {
  config.validate();
  if (auctions.empty()) {
    throw EmptyInput("run_uplift_simulation needs at least one auction");
  }
  if (baseline_dist.empty()) {
    throw EmptyInput("run_uplift_simulation needs a baseline distribution");
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
    SeededRng baseline_rng(config.seed, i * kStreamStride + kBaselineDraw);
    SeededRng auction_rng(config.seed, i * kStreamStride + kAuctionDraw);
    const SlotTimeMs baseline_time = floor_to_ms(baseline_dist.sample(baseline_rng));
    const SlotAuction& auction = pool[auction_rng.uniform_below(pool.size())];
    const SlotTimeMs delay_time = std::max(baseline_time, config.delay_threshold);
    try {
      results[i] = uplift_per_block(auction, baseline_time, delay_time, config.supersede);
    } catch (const NoBaselineBid&) {
      // counted as a skipped draw below
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
    throw AllDrawsSkipped("every simulation draw lacked an eligible baseline bid");
  }
  UpliftSimulationResult out;
  out.collected_runs = collected.size();
  out.skipped_runs = skipped;
  out.uplifts = EmpiricalDistribution::from_samples(std::move(collected));
  return out;
}

SlotOutcome simulate_slot(const SlotAuction& auction, const ProposerStrategy& strategy,
                          const HazardModel& hazard, SeededRng& rng) {
  strategy.validate();
  SlotOutcome out;
  out.slot = auction.slot();

  const BidTrace* best = nullptr;
  SlotTimeMs latest{std::numeric_limits<std::int64_t>::min()};
  for (const RelayConfig& relay : strategy.relays) {
    const SlotTimeMs lag = floor_to_ms(relay.eligibility_lag.sample(rng));
    const SlotTimeMs query_time = relay.artificial_delay + lag;
    latest = std::max(latest, query_time);
    const BidTrace* candidate =
        best_eligible_bid_ptr(auction, RelayFilter::only(relay.relay_id), query_time);
    if (candidate != nullptr &&
        (best == nullptr || candidate->value > best->value ||
         (candidate->value == best->value && auction_order(*candidate, *best)))) {
      best = candidate;
    }
  }
  out.effective_query_time = latest;
  if (best == nullptr) {
    return out;  // nothing eligible anywhere: no winner, not a miss
  }
  out.missed = rng.bernoulli(hazard.probability_at(latest));
  if (out.missed) {
    return out;  // forfeits the slot: no winner, zero reward
  }
  out.winning_bid = *best;
  const BidTrace* undelayed = best_eligible_bid_ptr(auction, RelayFilter::all(), SlotTimeMs{0});
  if (undelayed != nullptr && !undelayed->value.is_zero()) {
    out.uplift_vs_baseline = best->value.to_rational() / undelayed->value.to_rational() - 1;
  }
  return out;
}

StrategyComparison compare_strategies(std::span<const SlotAuction> auctions,
                                      const std::vector<ProposerStrategy>& strategies,
                                      const HazardModel& hazard, const SimConfig& config) {
  config.validate();
  if (strategies.empty()) {
    throw EmptyInput("compare_strategies needs at least one strategy");
  }
  if (auctions.empty()) {
    throw EmptyInput("compare_strategies needs at least one auction");
  }
  for (const auto& s : strategies) {
    s.validate();
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

  StrategyComparison comparison;
  auto bench = std::find_if(strategies.begin(), strategies.end(),
                            [](const ProposerStrategy& s) { return s.name == "benchmark"; });
  comparison.benchmark_index =
      bench == strategies.end() ? 0 : static_cast<std::size_t>(bench - strategies.begin());

  // outcomes[s][a]; per-auction rng streams are shared across strategies so
  // lag draws pair up (common random numbers).
  std::vector<std::vector<SlotOutcome>> outcomes(
      strategies.size(), std::vector<SlotOutcome>(pool.size()));
  parallel_for(pool.size(), [&](std::size_t a) {
    for (std::size_t s = 0; s < strategies.size(); ++s) {
      SeededRng rng(config.seed, a * kStreamStride);
      outcomes[s][a] = simulate_slot(pool[a], strategies[s], hazard, rng);
    }
  });

  const auto& bench_outcomes = outcomes[comparison.benchmark_index];
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    StrategyComparison::Entry entry;
    entry.name = strategies[s].name;
    entry.slots = pool.size();

    std::vector<Rational> eligibilities;
    std::vector<Rational> uplifts;
    std::uint64_t missed = 0;
    for (std::size_t a = 0; a < pool.size(); ++a) {
      const SlotOutcome& outcome = outcomes[s][a];
      if (outcome.missed) {
        ++missed;
      }
      if (outcome.winning_bid) {
        eligibilities.emplace_back(outcome.winning_bid->eligible_at.ms);
      }
      const SlotOutcome& reference = bench_outcomes[a];
      if (outcome.winning_bid && reference.winning_bid && !reference.winning_bid->value.is_zero()) {
        uplifts.push_back(outcome.winning_bid->value.to_rational() /
                              reference.winning_bid->value.to_rational() -
                          1);
      }
    }
    entry.slots_with_winner = eligibilities.size();
    entry.uplift_samples = uplifts.size();
    entry.missed_rate = Rational(missed, static_cast<unsigned long long>(pool.size()));
    if (!eligibilities.empty()) {
      entry.winning_eligibility_ms =
          EmpiricalDistribution::from_samples(std::move(eligibilities)).summarize();
    }
    if (!uplifts.empty()) {
      entry.uplift_vs_benchmark =
          EmpiricalDistribution::from_samples(std::move(uplifts)).summarize();
    }
    comparison.entries.push_back(std::move(entry));
  }
  return comparison;
}

std::vector<SlotAuction> synthesize_eligibility(std::span<const SlotAuction> auctions,
                                                const EmpiricalDistribution& lag,
                                                std::uint64_t seed) {
  if (lag.empty()) {
    throw EmptyInput("synthesize_eligibility needs a lag distribution");
  }
  std::vector<SlotAuction> out(auctions.size());
  parallel_for(auctions.size(), [&](std::size_t i) {
    SeededRng rng(seed, i);
    std::vector<BidTrace> bids = auctions[i].bids();
    for (BidTrace& bid : bids) {
      if (!bid.eligible_explicit) {
        bid.eligible_at = bid.received_at + floor_to_ms(lag.sample(rng));
      }
    }
    out[i] = SlotAuction::from_bids(auctions[i].slot(), std::move(bids))
                 .with_supersede(auctions[i].supersede());
  });
  return out;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

// lag specs: "a:b" uniform grid, "ecdf:<path>" cache file, single value
// point mass.
EmpiricalDistribution parse_lag_spec(const std::string& spec) {
  if (spec.rfind("ecdf:", 0) == 0) {
    return read_ecdf_cache_file(spec.substr(5)).first;
  }
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    const std::int64_t lo = std::stoll(spec.substr(0, colon));
    const std::int64_t hi = std::stoll(spec.substr(colon + 1));
    if (hi < lo) {
      throw std::invalid_argument("lag range upper bound below lower bound: " + spec);
    }
    const std::int64_t step = std::max<std::int64_t>(1, (hi - lo) / 20);
    std::vector<Rational> samples;
    for (std::int64_t v = lo; v <= hi; v += step) samples.emplace_back(v);
    if (samples.back() != Rational(hi)) samples.emplace_back(hi);
    return EmpiricalDistribution::from_samples(std::move(samples));
  }
  return EmpiricalDistribution::point_mass(parse_rational(spec));
}

RelayConfig parse_relay_line(const std::string& value, std::size_t line_no) {
  RelayConfig relay;
  relay.eligibility_lag = default_nonoptimistic_lag();
  std::istringstream fields(value);
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                  ": expected key=value, got '" + field + "'");
    }
    const std::string key = field.substr(0, eq);
    const std::string val = field.substr(eq + 1);
    if (key == "id") {
      relay.relay_id = val;
    } else if (key == "optimistic") {
      relay.optimistic = val == "true" || val == "1";
    } else if (key == "delay") {
      relay.artificial_delay = SlotTimeMs{std::stoll(val)};
    } else if (key == "lag") {
      relay.eligibility_lag = parse_lag_spec(val);
    } else {
      throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                  ": unknown relay key '" + key + "'");
    }
  }
  return relay;
}

}  // namespace

SimProfile load_sim_profile(std::istream& in) {
  SimProfile profile;
  std::vector<std::pair<SlotTimeMs, Rational>> hazard_knots;
  std::string section;
  std::string current_strategy;
  std::string line;
  std::size_t line_no = 0;

  auto flush_strategy = [&]() { current_strategy.clear(); };

  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      const std::string header = trim(line.substr(1, line.size() - 2));
      if (header == "hazard") {
        section = "hazard";
        flush_strategy();
      } else if (header.rfind("strategy", 0) == 0) {
        section = "strategy";
        current_strategy = trim(header.substr(8));
        if (current_strategy.empty()) {
          throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                      ": strategy section needs a name");
        }
        profile.strategies.push_back(ProposerStrategy{.name = current_strategy, .relays = {}});
      } else {
        throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                    ": unknown section '" + header + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section == "hazard" && key == "knot") {
      std::istringstream kv(value);
      std::int64_t t_ms = 0;
      std::string prob;
      if (!(kv >> t_ms >> prob)) {
        throw std::invalid_argument("profile line " + std::to_string(line_no) +
                                    ": hazard knot needs '<ms> <probability>'");
      }
      hazard_knots.emplace_back(SlotTimeMs{t_ms}, parse_rational(prob));
    } else if (section == "strategy" && key == "relay") {
      profile.strategies.back().relays.push_back(parse_relay_line(value, line_no));
    } else {
      throw std::invalid_argument("profile line " + std::to_string(line_no) + ": unknown key '" +
                                  key + "' in section '" + section + "'");
    }
  }
  if (!hazard_knots.empty()) {
    profile.hazard = HazardModel::from_knots(std::move(hazard_knots));
  }
  for (const auto& s : profile.strategies) {
    s.validate();
  }
  return profile;
}

SimProfile load_sim_profile_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open simulation profile: " + path.string());
  }
  return load_sim_profile(in);
}

}  // namespace mevsim::sim
