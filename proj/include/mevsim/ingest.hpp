#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mevsim/bid.hpp"
#include "mevsim/distribution.hpp"
#include "mevsim/errors.hpp"

namespace mevsim::ingest {

struct MalformedRecord : std::runtime_error {
  std::size_t line;
  std::string reason;
  MalformedRecord(std::size_t line_no, std::string why);
};

struct UnknownFormat : std::invalid_argument {
  explicit UnknownFormat(const std::string& what) : std::invalid_argument(what) {}
};

/// One bid-trace export row, absolute epoch times, value as a lossless
/// decimal wei string.
struct TraceRecord {
  std::uint64_t slot{0};
  std::string relay;
  std::string builder_pubkey;
  std::uint64_t timestamp_ms{0};                 // received
  std::optional<std::uint64_t> eligible_ms;      // >= timestamp_ms when present
  WeiAmount value;
  std::uint64_t gas_used{0};
  std::uint32_t num_tx{0};
  std::optional<std::string> block_hash;

  bool operator==(const TraceRecord&) const = default;
};

struct ChainConfig {
  std::uint64_t genesis_time_s{1'606'824'023};  // mainnet beacon genesis
  std::uint64_t seconds_per_slot{12};

  void validate() const;
  std::int64_t slot_start_ms(std::uint64_t slot) const;
};

enum class TraceFormat { jsonl, csv };

/// Fixed CSV column order; the header row is required verbatim.
extern const char* const kCsvHeader;

struct ParseIssue {
  std::size_t line{0};
  std::string reason;
};

struct ParseResult {
  std::vector<TraceRecord> records;
  std::vector<ParseIssue> issues;
};

/// Line-oriented parse; every line yields a record or a positioned issue.
/// strict mode throws MalformedRecord at the first issue instead.
ParseResult parse_traces(std::istream& in, TraceFormat format, bool strict = false);
ParseResult parse_traces_file(const std::filesystem::path& path,
                              std::optional<TraceFormat> format = std::nullopt,
                              bool strict = false);

/// Canonical JSONL rendering; parse(serialize(parse(x))) == parse(x).
std::string to_jsonl_line(const TraceRecord& record);
void serialize_traces(std::ostream& out, std::span<const TraceRecord> records);

std::string to_csv_line(const TraceRecord& record);

struct AuctionBuildResult {
  std::vector<SlotAuction> auctions;  // ascending slot order
  std::uint64_t accepted{0};
  std::uint64_t dropped{0};     // outside the slot window or invalid as bids
  std::uint64_t duplicates{0};  // same (relay, builder, eligible, value, hash)
};

/// Groups records by slot and converts epoch times to slot-relative offsets.
/// Records with no eligible_ms pass through with eligible_at defaulted to
/// received_at and flagged, so a lag model can synthesize it downstream.
AuctionBuildResult to_auctions(std::span<const TraceRecord> records,
                               const ChainConfig& chain = {});

/// slot -> delivered payload block hash.
using DeliveredMap = std::map<std::uint64_t, std::string>;

DeliveredMap parse_delivered(std::istream& in);
DeliveredMap parse_delivered_file(const std::filesystem::path& path);

/// ECDF of winning-bid eligibility times (ms). A delivered map pins winners
/// to the payload actually delivered (earliest matching trace); slots
/// without a match fall back to the max-value-within-cutoff heuristic.
EmpiricalDistribution winning_bid_eligibility_ecdf(
    std::span<const SlotAuction> auctions, const DeliveredMap* delivered = nullptr,
    SlotTimeMs cutoff = kDefaultEligibilityCutoff);

/// ECDF of winning-bid values (wei), same winner rule as above.
EmpiricalDistribution per_block_mev_ecdf(std::span<const SlotAuction> auctions,
                                         const DeliveredMap* delivered = nullptr,
                                         SlotTimeMs cutoff = kDefaultEligibilityCutoff);

}  // namespace mevsim::ingest
