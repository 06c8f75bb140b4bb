// Acceptance suite: one check per criterion, each printed as a single
// pass/fail line with its measured runtime. Exits nonzero on any failure.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <vector>

#include "mevsim/auction.hpp"
#include "mevsim/fee_market.hpp"
#include "mevsim/ingest.hpp"
#include "mevsim/montecarlo.hpp"
#include "mevsim/report.hpp"
#include "mevsim/timing.hpp"
#include "support/synthetic.hpp"

using namespace mevsim;
using namespace testsupport;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass{false};
  std::string detail;
};

int g_failures = 0;

void run_criterion(const std::string& name, double limit_ms,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.pass = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  const bool in_budget = elapsed_ms < limit_ms;
  const bool pass = outcome.pass && in_budget;
  if (!pass) ++g_failures;
  std::ostringstream line;
  line << (pass ? "[PASS] " : "[FAIL] ") << name << " (" << std::fixed << std::setprecision(1)
       << elapsed_ms << " ms";
  if (!in_budget) line << ", over the " << limit_ms << " ms budget";
  line << ")";
  if (!outcome.detail.empty()) line << " - " << outcome.detail;
  std::cout << line.str() << "\n";
}

// ---------------------------------------------------------------------

Outcome r_worked_example() {
  std::vector<BidTrace> bids{make_bid(1, 100, 1, "relay-a", "0xb1"),
                             make_bid(1, 200, 1, "relay-a", "0xb2")};
  bids[0].value = WeiAmount::from_eth(700);
  bids[1].value = WeiAmount::from_eth(770);
  const SlotAuction auction = SlotAuction::from_bids(1, bids);
  const RValue r = compute_r(auction.bids().front(), auction);
  const double err = std::abs(to_double(r.ratio) - 0.909090909090909);
  Outcome out;
  out.pass = err <= 1e-9 && r.ratio == Rational(700, 770);
  out.detail = "R = " + rational_to_decimal(r.ratio, 9);
  return out;
}

Outcome binomial_expectations() {
  SeededRng rng(20'260'810, 0);
  const int draws = 10'000;
  double sum_13 = 0, sum_01 = 0;
  for (int i = 0; i < draws; ++i) {
    sum_13 += static_cast<double>(
        mc::proposals_in_period(mc::VotingPower{Rational(13, 100)}, 50'400, rng));
    sum_01 += static_cast<double>(
        mc::proposals_in_period(mc::VotingPower{Rational(1, 100)}, 50'400, rng));
  }
  const double mean_13 = sum_13 / draws;
  const double mean_01 = sum_01 / draws;
  Outcome out;
  out.pass = std::abs(mean_13 - 6'552.0) < 6'552.0 * 0.01 &&
             std::abs(mean_01 - 504.0) < 504.0 * 0.01;
  std::ostringstream detail;
  detail << "mean(vp=0.13) = " << mean_13 << ", mean(vp=0.01) = " << mean_01;
  out.detail = detail.str();
  return out;
}

Outcome apr_arithmetic() {
  mc::RewardModel model;
  model.per_block_mev = EmpiricalDistribution::point_mass(Rational(1));
  model.uplift = EmpiricalDistribution::point_mass(Rational(0));
  const mc::AprDelta delta = mc::apr_delta(Rational(547, 10'000), model);
  const double new_apr = to_double(delta.new_apr);
  const double relative = to_double(delta.relative);
  Outcome out;
  out.pass = new_apr >= 0.0426 && new_apr <= 0.0428 && relative >= 0.0160 && relative <= 0.0170;
  out.detail = "new APR = " + rational_to_decimal(delta.new_apr * 100, 4) +
               "%, relative uplift = " + rational_to_decimal(delta.relative * 100, 4) + "%";
  return out;
}

Outcome burn_worked_example() {
  const auto impact = fee::burn_impact_on_reward(WeiAmount::parse("77000000000000000"),
                                                 WeiAmount::parse("633000000000000000"),
                                                 Rational(1, 200));
  const double adjusted_eth = impact.adjusted_reward.to_eth();
  const double decrease = to_double(impact.reward_decrease_pct);
  Outcome out;
  out.pass = std::abs(adjusted_eth - 0.074) <= 0.001 && std::abs(decrease - 0.039) <= 0.003;
  std::ostringstream detail;
  detail << "adjusted = " << adjusted_eth << " ETH, decrease = " << decrease * 100 << "%";
  out.detail = detail.str();
  return out;
}

BigInt reference_next_base_fee(const BigInt& parent_fee, std::uint64_t gas_used,
                               std::uint64_t target, std::uint64_t denominator) {
  if (gas_used == target) return parent_fee;
  if (gas_used > target) {
    BigInt delta = parent_fee * (gas_used - target) / target / denominator;
    if (delta < 1) delta = 1;
    return parent_fee + delta;
  }
  return parent_fee - parent_fee * (target - gas_used) / target / denominator;
}

Outcome eip1559_oracle() {
  Outcome out;
  out.pass = true;
  SeededRng rng(1559, 0);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> cases;
  for (std::uint64_t gas : {0ull, 15'000'000ull, 30'000'000ull}) {
    cases.emplace_back(25'000'000'000ull, gas);
  }
  for (int i = 0; i < 100; ++i) {
    cases.emplace_back(1 + rng.uniform_below(500'000'000'000ull),
                       rng.uniform_below(30'000'001ull));
  }
  for (const auto& [fee, gas] : cases) {
    fee::FeeMarketState state;
    state.base_fee_per_gas = WeiAmount(fee);
    const BigInt actual(fee::next_base_fee(state, gas).wei);
    const BigInt expected =
        reference_next_base_fee(BigInt(fee), gas, state.gas_target, state.adjustment_denominator);
    if (actual != expected) {
      out.pass = false;
      out.detail = "mismatch at fee " + std::to_string(fee) + ", gas " + std::to_string(gas);
      return out;
    }
  }

  // ten consecutive full blocks: off by at most one wei per step, compounded
  fee::FeeMarketState state;
  state.base_fee_per_gas = WeiAmount(1'000'000'000ull);
  const Rational start = state.base_fee_per_gas.to_rational();
  Rational factor(1), bound(0);
  for (int k = 1; k <= 10; ++k) {
    state.base_fee_per_gas = fee::next_base_fee(state, 30'000'000);
    factor *= Rational(9, 8);
    bound = bound * Rational(9, 8) + 1;
  }
  const Rational exact = start * factor;
  const Rational actual = state.base_fee_per_gas.to_rational();
  const Rational gap = exact - actual;
  if (!(gap >= 0 && gap <= bound)) {
    out.pass = false;
    out.detail = "1.125^10 drift " + rational_to_decimal(gap, 4) + " wei exceeds " +
                 rational_to_decimal(bound, 4);
    return out;
  }
  out.detail = "103 vectors bit-exact; 10-block drift " + rational_to_decimal(gap, 2) +
               " wei <= " + rational_to_decimal(bound, 2);
  return out;
}

Outcome oracle_equivalence() {
  SeededRng gen(424'242, 0);
  Outcome out;
  out.pass = true;
  int uplift_checked = 0;
  for (int trial = 0; trial < 1'000; ++trial) {
    const SlotAuction auction = random_auction(gen);
    const SlotAuction view = auction.with_supersede(true);
    for (bool supersede : {false, true}) {
      const SlotAuction& a = supersede ? view : auction;
      const std::int64_t t = -2'200 + static_cast<std::int64_t>(gen.uniform_below(4'600));
      RelayFilter filter = gen.uniform_below(2) == 0
                               ? RelayFilter::all()
                               : RelayFilter::only("relay-" + std::to_string(gen.uniform_below(3)));
      const BidTrace* expected =
          brute_force_best(auction.bids(), filter, SlotTimeMs{t}, supersede);
      const BidTrace* actual = best_eligible_bid_ptr(a, filter, SlotTimeMs{t});
      if ((expected == nullptr) != (actual == nullptr) ||
          (expected != nullptr && !(*expected == *actual))) {
        out.pass = false;
        out.detail = "best_eligible_bid mismatch on trial " + std::to_string(trial);
        return out;
      }

      // uplift oracle on the same auction
      const std::int64_t b = -2'000 + static_cast<std::int64_t>(gen.uniform_below(2'500));
      const std::int64_t d = b + static_cast<std::int64_t>(gen.uniform_below(2'000));
      const BidTrace* base =
          brute_force_best(auction.bids(), RelayFilter::all(), SlotTimeMs{b}, supersede);
      const BidTrace* delayed =
          brute_force_best(auction.bids(), RelayFilter::all(), SlotTimeMs{d}, supersede);
      if (base == nullptr || base->value.is_zero()) {
        bool threw = false;
        try {
          sim::uplift_per_block(auction, SlotTimeMs{b}, SlotTimeMs{d}, supersede);
        } catch (const NoBaselineBid&) {
          threw = true;
        }
        if (!threw) {
          out.pass = false;
          out.detail = "missing NoBaselineBid on trial " + std::to_string(trial);
          return out;
        }
      } else {
        const Rational expected_uplift =
            delayed->value.to_rational() / base->value.to_rational() - 1;
        const Rational actual_uplift =
            sim::uplift_per_block(auction, SlotTimeMs{b}, SlotTimeMs{d}, supersede);
        if (actual_uplift != expected_uplift) {
          out.pass = false;
          out.detail = "uplift mismatch on trial " + std::to_string(trial);
          return out;
        }
        ++uplift_checked;
      }
    }
  }
  out.detail = "1000 auctions, " + std::to_string(uplift_checked) + " uplift comparisons";
  return out;
}

Outcome monotonicity_suite() {
  Outcome out;
  out.pass = true;
  SeededRng gen(777, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const SlotAuction auction = random_auction(gen);
    const SlotTimeMs baseline{-1'500};
    if (best_eligible_bid_ptr(auction, RelayFilter::all(), baseline) == nullptr) continue;
    Rational last(-1);
    for (std::int64_t delay = -1'500; delay <= 2'000; delay += 125) {
      const Rational uplift = sim::uplift_per_block(auction, baseline, SlotTimeMs{delay}, false);
      if (uplift < 0 || uplift < last) {
        out.pass = false;
        out.detail = "per-auction monotonicity violated on trial " + std::to_string(trial);
        return out;
      }
      last = uplift;
    }
  }

  const auto corpus = calibrated_corpus(150, 50);
  const auto baseline_dist = EmpiricalDistribution::from_samples(
      {Rational(74), Rational(150), Rational(481, 2), Rational(600), Rational(1410)});
  Rational last_median(-1);
  std::ostringstream medians;
  for (const std::int64_t threshold : {250, 500, 700, 950}) {
    sim::SimConfig config;
    config.n_runs = 1'000;
    config.seed = 2'024;  // identical streams across thresholds
    config.delay_threshold = SlotTimeMs{threshold};
    const auto result = sim::run_uplift_simulation(corpus, baseline_dist, config);
    const Rational median = result.uplifts.quantile(Rational(1, 2));
    if (median < last_median) {
      out.pass = false;
      out.detail = "median uplift decreased at threshold " + std::to_string(threshold);
      return out;
    }
    last_median = median;
    medians << " " << rational_to_decimal(median * 100, 2) << "%";
  }
  out.detail = "medians at 250/500/700/950 ms:" + medians.str();
  return out;
}

Outcome variance_ordering() {
  mc::RewardModel model;
  model.per_block_mev = calibrated_mev_dist();
  model.uplift = calibrated_uplift_dist();
  SeededRng rng_big(31'337, 0), rng_small(31'337, 0);
  const auto big = mc::period_uplift(mc::VotingPower{Rational(13, 100)}, model, 1'000, rng_big);
  const auto small = mc::period_uplift(mc::VotingPower{Rational(1, 100)}, model, 1'000, rng_small);
  const Rational width_big = big.dist.iq_width();
  const Rational width_small = small.dist.iq_width();
  Outcome out;
  out.pass = width_big < width_small;
  out.detail = "IQ width vp=0.13: " + rational_to_decimal(width_big * 100, 3) +
               "%, vp=0.01: " + rational_to_decimal(width_small * 100, 3) + "%";
  return out;
}

Outcome flattening_check() {
  const auto corpus = calibrated_corpus(400, 90'210);
  auto median_r_at = [&](std::int64_t t) {
    std::vector<Rational> rs;
    for (const SlotAuction& auction : corpus) {
      const BidTrace* best = best_eligible_bid_ptr(auction, RelayFilter::all(), SlotTimeMs{t});
      const BidTrace* max_bid = auction_winner(auction);
      if (best == nullptr || max_bid == nullptr || max_bid->value.is_zero()) continue;
      rs.push_back(best->value.to_rational() / max_bid->value.to_rational());
    }
    return EmpiricalDistribution::from_samples(std::move(rs)).quantile(Rational(1, 2));
  };
  const Rational m250 = median_r_at(250);
  const Rational m950 = median_r_at(950);
  const Rational m1000 = median_r_at(1'000);
  const Rational gain_early = (m950 - m250) / m250;
  const Rational gain_late = (m1000 - m950) / m950;
  Outcome out;
  out.pass = gain_early > 0 && gain_late >= 0 && gain_early > gain_late * 10;
  out.detail = "median R gain 250->950: " + rational_to_decimal(gain_early * 100, 3) +
               "%, 950->1000: " + rational_to_decimal(gain_late * 100, 3) + "%";
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome cli_determinism() {
  const fs::path dir = fs::temp_directory_path() / "mevsim-acceptance-determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // deterministic corpus on disk
  const auto corpus = calibrated_corpus(15, 4'242);
  const ingest::ChainConfig chain;
  const fs::path traces = dir / "traces.jsonl";
  {
    std::ofstream out(traces);
    for (const auto& auction : corpus) {
      for (const auto& bid : auction.bids()) {
        ingest::TraceRecord record;
        record.slot = auction.slot();
        record.relay = bid.relay_id;
        record.builder_pubkey = bid.builder_id;
        record.timestamp_ms =
            static_cast<std::uint64_t>(chain.slot_start_ms(bid.slot) + bid.received_at.ms);
        record.eligible_ms =
            static_cast<std::uint64_t>(chain.slot_start_ms(bid.slot) + bid.eligible_at.ms);
        record.value = bid.value;
        record.gas_used = bid.gas_used;
        record.num_tx = bid.tx_count;
        out << ingest::to_jsonl_line(record) << "\n";
      }
    }
  }

  const std::string cli = MEVSIM_CLI_PATH;
  auto shell = [&](const std::string& args) {
    const std::string command = cli + " " + args + " > /dev/null 2>&1";
    return std::system(command.c_str()) == 0;
  };
  Outcome out;
  if (!shell("simulate uplift --traces " + traces.string() + " --runs 200 --seed 11 --out " +
             (dir / "first").string())) {
    out.detail = "first CLI run failed";
    return out;
  }
  if (!shell("replay " + (dir / "first" / "manifest.json").string() + " --out " +
             (dir / "second").string())) {
    out.detail = "manifest replay failed";
    return out;
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "first")) {
    if (entry.path().extension() != ".csv") continue;
    ++compared;
    if (slurp(entry.path()) != slurp(dir / "second" / entry.path().filename())) {
      out.detail = "table differs after replay: " + entry.path().filename().string();
      return out;
    }
  }
  out.pass = compared > 0;
  out.detail = std::to_string(compared) + " tables byte-identical after manifest replay";
  return out;
}

Outcome ingest_round_trip() {
  SeededRng rng(10'000, 0);
  const ingest::ChainConfig chain;
  std::vector<ingest::TraceRecord> records;
  records.reserve(10'000);
  for (int i = 0; i < 10'000; ++i) {
    ingest::TraceRecord record;
    record.slot = 9'000'000 + rng.uniform_below(200);
    record.relay = "relay-" + std::to_string(rng.uniform_below(4));
    record.builder_pubkey = "0xb" + std::to_string(rng.uniform_below(8));
    const std::int64_t offset = -14'000 + static_cast<std::int64_t>(rng.uniform_below(28'001));
    record.timestamp_ms =
        static_cast<std::uint64_t>(chain.slot_start_ms(record.slot) + offset);
    if (rng.uniform_below(2) == 0) {
      record.eligible_ms = record.timestamp_ms + rng.uniform_below(250);
    }
    record.value = WeiAmount(rng.uniform_below(2'000'000'000'000'000'000ull));
    record.gas_used = rng.uniform_below(32'000'000);  // some above the limit
    record.num_tx = static_cast<std::uint32_t>(rng.uniform_below(500));
    if (rng.uniform_below(4) == 0) {
      record.block_hash = "0x" + std::to_string(rng.uniform_below(1'000'000'000ull));
    }
    records.push_back(record);
    if (rng.uniform_below(20) == 0) {
      records.push_back(record);  // exact duplicate
    }
  }

  std::ostringstream serialized;
  ingest::serialize_traces(serialized, records);
  std::istringstream in(serialized.str());
  const auto reparsed = ingest::parse_traces(in, ingest::TraceFormat::jsonl);

  Outcome out;
  if (!reparsed.issues.empty() || !(reparsed.records == records)) {
    out.detail = "serialize/parse identity failed";
    return out;
  }
  const auto build = ingest::to_auctions(records, chain);
  std::size_t in_auctions = 0;
  for (const auto& a : build.auctions) in_auctions += a.size();
  const bool accounting = build.accepted + build.dropped + build.duplicates == records.size() &&
                          in_auctions == build.accepted;
  out.pass = accounting;
  out.detail = std::to_string(records.size()) + " records round-tripped; accepted " +
               std::to_string(build.accepted) + " + dropped " + std::to_string(build.dropped) +
               " + duplicates " + std::to_string(build.duplicates);
  return out;
}

}  // namespace

int main() {
  std::cout << "acceptance criteria\n-------------------\n";
  run_criterion("R worked example (700/770)", 1.0, r_worked_example);
  run_criterion("binomial proposal expectations (6552 / 504)", 1'000.0, binomial_expectations);
  run_criterion("APR arithmetic (4.2% -> ~4.27%)", 1.0, apr_arithmetic);
  run_criterion("burn worked example (0.077 / 0.633 ETH)", 1.0, burn_worked_example);
  run_criterion("EIP-1559 controller oracle", 1'000.0, eip1559_oracle);
  run_criterion("oracle equivalence on 1000 random auctions", 5'000.0, oracle_equivalence);
  run_criterion("monotonicity suite", 30'000.0, monotonicity_suite);
  run_criterion("variance ordering across voting powers", 60'000.0, variance_ordering);
  run_criterion("median R flattening past the threshold", 60'000.0, flattening_check);
  run_criterion("CLI determinism via manifest replay", 120'000.0, cli_determinism);
  run_criterion("ingest round-trip and accounting identity", 5'000.0, ingest_round_trip);

  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all criteria passed\n";
  return 0;
}
