#include "mevsim/bid.hpp"

#include <algorithm>
#include <stdexcept>

namespace mevsim {

void validate(const BidTrace& bid) {
  if (bid.eligible_at < bid.received_at) {
    throw std::invalid_argument("bid eligible_at precedes received_at (slot " +
                                std::to_string(bid.slot) + ")");
  }
  if (bid.gas_used > kBlockGasLimit) {
    throw std::invalid_argument("bid gas_used above block gas limit (slot " +
                                std::to_string(bid.slot) + ")");
  }
}

bool auction_order(const BidTrace& a, const BidTrace& b) {
  if (a.eligible_at != b.eligible_at) return a.eligible_at < b.eligible_at;
  if (a.value != b.value) return b.value < a.value;
  if (a.builder_id != b.builder_id) return a.builder_id < b.builder_id;
  if (a.relay_id != b.relay_id) return a.relay_id < b.relay_id;
  return a.received_at < b.received_at;
}

SlotAuction SlotAuction::from_bids(std::uint64_t slot, std::vector<BidTrace> bids) {
  SlotAuction auction(slot);
  for (const auto& bid : bids) {
    if (bid.slot != slot) {
      throw std::invalid_argument("bid for slot " + std::to_string(bid.slot) +
                                  " added to auction for slot " + std::to_string(slot));
    }
    validate(bid);
  }
  std::sort(bids.begin(), bids.end(), auction_order);
  auction.bids_ = std::move(bids);
  return auction;
}

void SlotAuction::insert(BidTrace bid) {
  if (bid.slot != slot_) {
    throw std::invalid_argument("bid for slot " + std::to_string(bid.slot) +
                                " added to auction for slot " + std::to_string(slot_));
  }
  validate(bid);
  auto pos = std::upper_bound(bids_.begin(), bids_.end(), bid, auction_order);
  bids_.insert(pos, std::move(bid));
}

SlotAuction SlotAuction::with_supersede(bool on) const {
  SlotAuction copy = *this;
  copy.supersede_ = on;
  return copy;
}

}  // namespace mevsim
