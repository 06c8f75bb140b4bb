#include "mevsim/auction.hpp"

#include <algorithm>
#include <map>

#include "mevsim/distribution.hpp"

namespace mevsim {

RelayFilter RelayFilter::only(std::string relay_id) {
  if (relay_id == "*") {
    return all();
  }
  return RelayFilter(std::set<std::string>{std::move(relay_id)});
}

bool RelayFilter::admits(std::string_view relay_id) const {
  if (!ids_) {
    return true;
  }
  return ids_->count("*") > 0 || ids_->count(std::string(relay_id)) > 0;
}

namespace {

// Selection order: highest value, then earliest eligibility, then lowest
// builder_id / relay_id.
bool better_bid(const BidTrace& a, const BidTrace& b) {
  if (a.value != b.value) return b.value < a.value;
  if (a.eligible_at != b.eligible_at) return a.eligible_at < b.eligible_at;
  if (a.builder_id != b.builder_id) return a.builder_id < b.builder_id;
  return a.relay_id < b.relay_id;
}

const BidTrace* best_plain(const SlotAuction& auction, const RelayFilter& filter,
                           SlotTimeMs query_time) {
  const BidTrace* best = nullptr;
  for (const BidTrace& bid : auction.bids()) {
    if (query_time < bid.eligible_at) {
      break;  // bids are sorted by eligible_at
    }
    if (!filter.admits(bid.relay_id)) {
      continue;
    }
    if (best == nullptr || better_bid(bid, *best)) {
      best = &bid;
    }
  }
  return best;
}

const BidTrace* best_superseded(const SlotAuction& auction, const RelayFilter& filter,
                                SlotTimeMs query_time) {
  // Per (relay, builder) the live bid is the last one in auction order with
  // eligible_at <= t; earlier bids are treated as cancelled.
  std::map<std::pair<std::string_view, std::string_view>, const BidTrace*> live;
  for (const BidTrace& bid : auction.bids()) {
    if (query_time < bid.eligible_at) {
      break;
    }
    if (!filter.admits(bid.relay_id)) {
      continue;
    }
    live[{bid.relay_id, bid.builder_id}] = &bid;
  }
  const BidTrace* best = nullptr;
  for (const auto& [key, bid] : live) {
    if (best == nullptr || better_bid(*bid, *best)) {
      best = bid;
    }
  }
  return best;
}

}  // namespace

const BidTrace* best_eligible_bid_ptr(const SlotAuction& auction, const RelayFilter& filter,
                                      SlotTimeMs query_time) {
  return auction.supersede() ? best_superseded(auction, filter, query_time)
                             : best_plain(auction, filter, query_time);
}

std::optional<BidTrace> best_eligible_bid(const SlotAuction& auction, const RelayFilter& filter,
                                          SlotTimeMs query_time) {
  const BidTrace* best = best_eligible_bid_ptr(auction, filter, query_time);
  if (best == nullptr) {
    return std::nullopt;
  }
  return *best;
}

SlotAuction supersede_by_builder(const SlotAuction& auction) {
  return auction.with_supersede(true);
}

const BidTrace* auction_winner(const SlotAuction& auction, SlotTimeMs cutoff) {
  return best_eligible_bid_ptr(auction, RelayFilter::all(), cutoff);
}

RValue compute_r(const BidTrace& bid, const SlotAuction& auction, SlotTimeMs cutoff) {
  const auto& bids = auction.bids();
  if (std::find(bids.begin(), bids.end(), bid) == bids.end()) {
    throw BidNotInAuction("bid is not part of the auction for slot " +
                          std::to_string(auction.slot()));
  }
  const BidTrace* max_bid = best_eligible_bid_ptr(auction, RelayFilter::all(), cutoff);
  if (max_bid == nullptr) {
    throw NoEligibleBids("no bid eligible at or before the cutoff in slot " +
                         std::to_string(auction.slot()));
  }
  if (max_bid->value.is_zero()) {
    throw NoEligibleBids("maximum eligible bid has zero value in slot " +
                         std::to_string(auction.slot()));
  }
  return RValue{bid.value.to_rational() / max_bid->value.to_rational()};
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

}  // namespace

BinnedCurve binned_quantile_curve_points(
    std::span<const std::pair<SlotTimeMs, Rational>> points, std::int64_t bin_width_ms) {
  if (bin_width_ms <= 0) {
    throw std::invalid_argument("bin width must be positive");
  }
  BinnedCurve curve;
  curve.bin_width_ms = bin_width_ms;
  if (points.empty()) {
    return curve;
  }
  std::int64_t lo = points.front().first.ms;
  std::int64_t hi = lo;
  for (const auto& [t, y] : points) {
    lo = std::min(lo, t.ms);
    hi = std::max(hi, t.ms);
  }
  const std::int64_t first_bin = floor_div(lo, bin_width_ms);
  const std::int64_t last_bin = floor_div(hi, bin_width_ms);
  const auto n_bins = static_cast<std::size_t>(last_bin - first_bin + 1);

  curve.bin_edges.reserve(n_bins + 1);
  for (std::size_t i = 0; i <= n_bins; ++i) {
    curve.bin_edges.push_back(
        SlotTimeMs{(first_bin + static_cast<std::int64_t>(i)) * bin_width_ms});
  }

  std::vector<std::vector<Rational>> buckets(n_bins);
  for (const auto& [t, y] : points) {
    const auto idx = static_cast<std::size_t>(floor_div(t.ms, bin_width_ms) - first_bin);
    buckets[idx].push_back(y);
  }

  curve.bins.reserve(n_bins);
  for (auto& bucket : buckets) {
    BinnedCurve::Bin bin;
    bin.count = bucket.size();
    if (!bucket.empty()) {
      std::sort(bucket.begin(), bucket.end());
      bin.q25 = bucket[nearest_rank_index(Rational(1, 4), bucket.size())];
      bin.q50 = bucket[nearest_rank_index(Rational(1, 2), bucket.size())];
      bin.q95 = bucket[nearest_rank_index(Rational(19, 20), bucket.size())];
    }
    curve.bins.push_back(std::move(bin));
  }
  return curve;
}

std::optional<Rational> median_r_at_query(std::span<const SlotAuction> auctions,
                                          SlotTimeMs query_time, SlotTimeMs cutoff) {
  std::vector<Rational> ratios;
  for (const SlotAuction& auction : auctions) {
    const BidTrace* best = best_eligible_bid_ptr(auction, RelayFilter::all(), query_time);
    const BidTrace* max_bid = auction_winner(auction, cutoff);
    if (best == nullptr || max_bid == nullptr || max_bid->value.is_zero()) {
      continue;
    }
    ratios.push_back(best->value.to_rational() / max_bid->value.to_rational());
  }
  if (ratios.empty()) {
    return std::nullopt;
  }
  std::sort(ratios.begin(), ratios.end());
  return ratios[nearest_rank_index(Rational(1, 2), ratios.size())];
}

BinnedCurve binned_quantile_curve(std::span<const SlotAuction> auctions,
                                  CurveOrdinate ordinate, std::int64_t bin_width_ms,
                                  SlotTimeMs cutoff) {
  if (auctions.empty()) {
    throw EmptyInput("binned_quantile_curve needs at least one auction");
  }
  std::vector<std::pair<SlotTimeMs, Rational>> points;
  for (const SlotAuction& auction : auctions) {
    Rational denom;
    if (ordinate == CurveOrdinate::r_value) {
      const BidTrace* max_bid = auction_winner(auction, cutoff);
      if (max_bid == nullptr || max_bid->value.is_zero()) {
        continue;
      }
      denom = max_bid->value.to_rational();
    }
    for (const BidTrace& bid : auction.bids()) {
      switch (ordinate) {
        case CurveOrdinate::r_value:
          if (bid.eligible_at <= cutoff) {
            points.emplace_back(bid.eligible_at, bid.value.to_rational() / denom);
          }
          break;
        case CurveOrdinate::gas_used:
          points.emplace_back(bid.eligible_at, Rational(bid.gas_used));
          break;
        case CurveOrdinate::tx_count:
          points.emplace_back(bid.eligible_at, Rational(bid.tx_count));
          break;
        case CurveOrdinate::value:
          points.emplace_back(bid.eligible_at, bid.value.to_rational());
          break;
      }
    }
  }
  return binned_quantile_curve_points(points, bin_width_ms);
}

}  // namespace mevsim
