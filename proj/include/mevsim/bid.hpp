#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mevsim/numeric.hpp"
#include "mevsim/slot_time.hpp"

namespace mevsim {

inline constexpr std::uint64_t kBlockGasLimit = 30'000'000;

/// One builder bid as observed by one relay, in slot-relative time.
struct BidTrace {
  std::uint64_t slot{0};
  std::string relay_id;
  std::string builder_id;
  SlotTimeMs received_at{};
  SlotTimeMs eligible_at{};
  /// False when the trace carried no eligibility timestamp and eligible_at
  /// was defaulted to received_at (the receiving/eligibility conflation).
  bool eligible_explicit{true};
  WeiAmount value{};
  std::uint64_t gas_used{0};
  std::uint32_t tx_count{0};
  std::optional<std::string> block_hash;

  bool operator==(const BidTrace&) const = default;
};

/// Throws std::invalid_argument on eligible_at < received_at or
/// gas_used above the block gas limit.
void validate(const BidTrace& bid);

/// Sort order inside an auction: eligible_at ascending, then value
/// descending, then builder_id, relay_id, received_at ascending.
bool auction_order(const BidTrace& a, const BidTrace& b);

/// All bids for one slot, kept sorted by auction_order. The supersede flag
/// turns the auction into a view where, per (relay, builder), only the most
/// recently eligible bid is live at any query time.
class SlotAuction {
 public:
  SlotAuction() = default;
  explicit SlotAuction(std::uint64_t slot) : slot_(slot) {}

  static SlotAuction from_bids(std::uint64_t slot, std::vector<BidTrace> bids);

  void insert(BidTrace bid);

  std::uint64_t slot() const { return slot_; }
  const std::vector<BidTrace>& bids() const { return bids_; }
  bool empty() const { return bids_.empty(); }
  std::size_t size() const { return bids_.size(); }

  bool supersede() const { return supersede_; }
  SlotAuction with_supersede(bool on) const;

 private:
  std::uint64_t slot_{0};
  std::vector<BidTrace> bids_;
  bool supersede_{false};
};

}  // namespace mevsim
