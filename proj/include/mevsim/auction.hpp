#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mevsim/bid.hpp"
#include "mevsim/errors.hpp"

namespace mevsim {

struct NoEligibleBids : std::runtime_error {
  explicit NoEligibleBids(const std::string& what) : std::runtime_error(what) {}
};

struct BidNotInAuction : std::invalid_argument {
  explicit BidNotInAuction(const std::string& what) : std::invalid_argument(what) {}
};

/// Restricts bid selection to a set of relays. Default-constructed filters
/// admit every relay; the id "*" inside a set also matches everything.
class RelayFilter {
 public:
  RelayFilter() = default;
  explicit RelayFilter(std::set<std::string> ids) : ids_(std::move(ids)) {}

  static RelayFilter all() { return RelayFilter(); }
  static RelayFilter only(std::string relay_id);

  bool admits(std::string_view relay_id) const;

 private:
  std::optional<std::set<std::string>> ids_;
};

/// Normalized bid estimator: bid value over the maximum eligible bid value.
/// In [0, 1] whenever the bid itself is within the cutoff.
struct RValue {
  Rational ratio;
};

/// Ratio of a bid to the auction's maximum bid among bids eligible at or
/// before `cutoff` (supersede-aware). Exact rational division.
RValue compute_r(const BidTrace& bid, const SlotAuction& auction,
                 SlotTimeMs cutoff = kDefaultEligibilityCutoff);

/// Highest-value bid visible through `filter` at `query_time`, honoring the
/// auction's supersede view. Ties: earliest eligible_at, then lowest
/// builder_id, then lowest relay_id. Absent when nothing qualifies.
std::optional<BidTrace> best_eligible_bid(const SlotAuction& auction,
                                          const RelayFilter& filter,
                                          SlotTimeMs query_time);

/// Non-owning variant used by the simulators; nullptr when nothing qualifies.
const BidTrace* best_eligible_bid_ptr(const SlotAuction& auction,
                                      const RelayFilter& filter,
                                      SlotTimeMs query_time);

/// Auction view in which each (relay, builder) pair exposes only its most
/// recently eligible bid at any query time.
SlotAuction supersede_by_builder(const SlotAuction& auction);

/// Winning bid under the cutoff heuristic: best over all relays at `cutoff`.
const BidTrace* auction_winner(const SlotAuction& auction,
                               SlotTimeMs cutoff = kDefaultEligibilityCutoff);

enum class CurveOrdinate { r_value, gas_used, tx_count, value };

/// Per-eligibility-bin nearest-rank quantiles of a bid ordinate.
struct BinnedCurve {
  std::int64_t bin_width_ms{0};
  /// size() == bins.size() + 1, strictly increasing multiples of the width.
  std::vector<SlotTimeMs> bin_edges;
  struct Bin {
    std::uint64_t count{0};
    std::optional<Rational> q25, q50, q95;
  };
  std::vector<Bin> bins;
};

/// Quantile curve over (eligible_at, ordinate) points pooled across
/// auctions. For r_value the per-auction denominator applies `cutoff`, and
/// bids past the cutoff are excluded from the curve entirely.
BinnedCurve binned_quantile_curve(std::span<const SlotAuction> auctions,
                                  CurveOrdinate ordinate, std::int64_t bin_width_ms,
                                  SlotTimeMs cutoff = kDefaultEligibilityCutoff);

/// Same binning and quantile rules over caller-supplied points.
BinnedCurve binned_quantile_curve_points(
    std::span<const std::pair<SlotTimeMs, Rational>> points, std::int64_t bin_width_ms);

/// Median over auctions of R(best bid at query_time), denominator under
/// `cutoff`. Auctions with nothing eligible at query_time are skipped;
/// absent when every auction is skipped. Probing this at 250/950/1000 ms
/// shows the R gain flattening past the delay threshold.
std::optional<Rational> median_r_at_query(std::span<const SlotAuction> auctions,
                                          SlotTimeMs query_time,
                                          SlotTimeMs cutoff = kDefaultEligibilityCutoff);

}  // namespace mevsim
