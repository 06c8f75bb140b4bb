#include "mevsim/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "mevsim/auction.hpp"

namespace mevsim::ingest {

using nlohmann::json;
using nlohmann::ordered_json;

MalformedRecord::MalformedRecord(std::size_t line_no, std::string why)
    : std::runtime_error("line " + std::to_string(line_no) + ": " + why),
      line(line_no),
      reason(std::move(why)) {}

void ChainConfig::validate() const {
  if (seconds_per_slot == 0) {
    throw std::invalid_argument("seconds_per_slot must be positive");
  }
}

std::int64_t ChainConfig::slot_start_ms(std::uint64_t slot) const {
  return static_cast<std::int64_t>(genesis_time_s) * 1000 +
         static_cast<std::int64_t>(slot) * static_cast<std::int64_t>(seconds_per_slot) * 1000;
}

const char* const kCsvHeader =
    "slot,relay,builder_pubkey,timestamp_ms,eligible_ms,value,gas_used,num_tx,block_hash";

namespace {

std::uint64_t require_u64(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  if (!it->is_number_unsigned()) {
    throw std::invalid_argument(std::string("field '") + key +
                                "' must be an unsigned integer");
  }
  return it->get<std::uint64_t>();
}

std::string require_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  if (!it->is_string()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

void check_cross_fields(const TraceRecord& record) {
  if (record.eligible_ms && *record.eligible_ms < record.timestamp_ms) {
    throw std::invalid_argument("eligible_ms precedes timestamp_ms");
  }
}

TraceRecord parse_jsonl_record(const std::string& line) {
  json obj = json::parse(line);  // throws json::parse_error on bad input
  if (!obj.is_object()) {
    throw std::invalid_argument("record is not a JSON object");
  }
  TraceRecord record;
  record.slot = require_u64(obj, "slot");
  record.relay = require_string(obj, "relay");
  record.builder_pubkey = require_string(obj, "builder_pubkey");
  record.timestamp_ms = require_u64(obj, "timestamp_ms");
  if (const auto it = obj.find("eligible_ms"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) {
      throw std::invalid_argument("field 'eligible_ms' must be an unsigned integer");
    }
    record.eligible_ms = it->get<std::uint64_t>();
  }
  // value stays a decimal string end to end; a JSON number would round-trip
  // through floating point and lose wei.
  record.value = WeiAmount::parse(require_string(obj, "value"));
  record.gas_used = require_u64(obj, "gas_used");
  const std::uint64_t num_tx = require_u64(obj, "num_tx");
  if (num_tx > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("field 'num_tx' exceeds 32 bits");
  }
  record.num_tx = static_cast<std::uint32_t>(num_tx);
  if (const auto it = obj.find("block_hash"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw std::invalid_argument("field 'block_hash' must be a string");
    }
    record.block_hash = it->get<std::string>();
  }
  check_cross_fields(record);
  return record;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

std::uint64_t parse_u64_field(const std::string& text, const char* name) {
  if (text.empty() || !std::all_of(text.begin(), text.end(),
                                   [](unsigned char c) { return std::isdigit(c) != 0; })) {
    throw std::invalid_argument(std::string("field '") + name +
                                "' must be an unsigned integer, got '" + text + "'");
  }
  return std::stoull(text);
}

TraceRecord parse_csv_record(const std::string& line) {
  const auto fields = split_csv(line);
  if (fields.size() != 9) {
    throw std::invalid_argument("expected 9 CSV fields, got " + std::to_string(fields.size()));
  }
  TraceRecord record;
  record.slot = parse_u64_field(fields[0], "slot");
  record.relay = fields[1];
  record.builder_pubkey = fields[2];
  record.timestamp_ms = parse_u64_field(fields[3], "timestamp_ms");
  if (!fields[4].empty()) {
    record.eligible_ms = parse_u64_field(fields[4], "eligible_ms");
  }
  record.value = WeiAmount::parse(fields[5]);
  record.gas_used = parse_u64_field(fields[6], "gas_used");
  const std::uint64_t num_tx = parse_u64_field(fields[7], "num_tx");
  if (num_tx > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("field 'num_tx' exceeds 32 bits");
  }
  record.num_tx = static_cast<std::uint32_t>(num_tx);
  if (!fields[8].empty()) {
    record.block_hash = fields[8];
  }
  check_cross_fields(record);
  return record;
}

}  // namespace

ParseResult parse_traces(std::istream& in, TraceFormat format, bool strict) {
  ParseResult result;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (format == TraceFormat::csv && !header_seen) {
      header_seen = true;
      if (line != kCsvHeader) {
        throw UnknownFormat("CSV header mismatch; expected: " + std::string(kCsvHeader));
      }
      continue;
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    try {
      result.records.push_back(format == TraceFormat::jsonl ? parse_jsonl_record(line)
                                                            : parse_csv_record(line));
    } catch (const std::exception& e) {
      if (strict) {
        throw MalformedRecord(line_no, e.what());
      }
      result.issues.push_back(ParseIssue{line_no, e.what()});
    }
  }
  return result;
}

ParseResult parse_traces_file(const std::filesystem::path& path,
                              std::optional<TraceFormat> format, bool strict) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace file: " + path.string());
  }
  TraceFormat effective;
  if (format) {
    effective = *format;
  } else {
    const auto ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".ndjson" || ext == ".json") {
      effective = TraceFormat::jsonl;
    } else if (ext == ".csv") {
      effective = TraceFormat::csv;
    } else {
      throw UnknownFormat("cannot infer trace format from extension '" + ext +
                          "'; pass jsonl or csv explicitly");
    }
  }
  return parse_traces(in, effective, strict);
}

std::string to_jsonl_line(const TraceRecord& record) {
  ordered_json obj;
  obj["slot"] = record.slot;
  obj["relay"] = record.relay;
  obj["builder_pubkey"] = record.builder_pubkey;
  obj["timestamp_ms"] = record.timestamp_ms;
  if (record.eligible_ms) {
    obj["eligible_ms"] = *record.eligible_ms;
  }
  obj["value"] = record.value.str();
  obj["gas_used"] = record.gas_used;
  obj["num_tx"] = record.num_tx;
  if (record.block_hash) {
    obj["block_hash"] = *record.block_hash;
  }
  return obj.dump();
}

void serialize_traces(std::ostream& out, std::span<const TraceRecord> records) {
  for (const TraceRecord& record : records) {
    out << to_jsonl_line(record) << '\n';
  }
}

std::string to_csv_line(const TraceRecord& record) {
  std::ostringstream out;
  out << record.slot << ',' << record.relay << ',' << record.builder_pubkey << ','
      << record.timestamp_ms << ',';
  if (record.eligible_ms) {
    out << *record.eligible_ms;
  }
  out << ',' << record.value.str() << ',' << record.gas_used << ',' << record.num_tx << ',';
  if (record.block_hash) {
    out << *record.block_hash;
  }
  return out.str();
}

AuctionBuildResult to_auctions(std::span<const TraceRecord> records, const ChainConfig& chain) {
  chain.validate();
  AuctionBuildResult result;

  using DedupeKey = std::tuple<std::string, std::string, std::int64_t, Uint256,
                               std::optional<std::string>>;
  std::map<std::uint64_t, std::vector<BidTrace>> groups;
  std::map<std::uint64_t, std::set<DedupeKey>> seen;

  for (const TraceRecord& record : records) {
    const std::int64_t start = chain.slot_start_ms(record.slot);
    BidTrace bid;
    bid.slot = record.slot;
    bid.relay_id = record.relay;
    bid.builder_id = record.builder_pubkey;
    bid.received_at = SlotTimeMs{static_cast<std::int64_t>(record.timestamp_ms) - start};
    if (record.eligible_ms) {
      bid.eligible_at = SlotTimeMs{static_cast<std::int64_t>(*record.eligible_ms) - start};
      bid.eligible_explicit = true;
    } else {
      bid.eligible_at = bid.received_at;
      bid.eligible_explicit = false;
    }
    bid.value = record.value;
    bid.gas_used = record.gas_used;
    bid.tx_count = record.num_tx;
    bid.block_hash = record.block_hash;

    if (!in_slot_window(bid.received_at) || !in_slot_window(bid.eligible_at) ||
        bid.gas_used > kBlockGasLimit) {
      ++result.dropped;
      continue;
    }
    DedupeKey key{bid.relay_id, bid.builder_id, bid.eligible_at.ms, bid.value.wei,
                  bid.block_hash};
    if (!seen[bid.slot].insert(std::move(key)).second) {
      ++result.duplicates;
      continue;
    }
    groups[bid.slot].push_back(std::move(bid));
  }

  result.auctions.reserve(groups.size());
  for (auto& [slot, bids] : groups) {
    result.accepted += bids.size();
    result.auctions.push_back(SlotAuction::from_bids(slot, std::move(bids)));
  }
  return result;
}

DeliveredMap parse_delivered(std::istream& in) {
  DeliveredMap delivered;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      json obj = json::parse(line);
      delivered[require_u64(obj, "slot")] = require_string(obj, "block_hash");
    } catch (const std::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return delivered;
}

DeliveredMap parse_delivered_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open delivered-payload file: " + path.string());
  }
  return parse_delivered(in);
}

namespace {

// Winner per slot: the delivered payload's trace when one matches
// (earliest eligibility across relays), otherwise best value within cutoff.
const BidTrace* slot_winner(const SlotAuction& auction, const DeliveredMap* delivered,
                            SlotTimeMs cutoff) {
  if (delivered != nullptr) {
    if (const auto it = delivered->find(auction.slot()); it != delivered->end()) {
      const BidTrace* match = nullptr;
      for (const BidTrace& bid : auction.bids()) {
        if (bid.block_hash == it->second) {
          if (match == nullptr || bid.eligible_at < match->eligible_at) {
            match = &bid;
          }
        }
      }
      if (match != nullptr) {
        return match;
      }
    }
  }
  return auction_winner(auction, cutoff);
}

}  // namespace

EmpiricalDistribution winning_bid_eligibility_ecdf(std::span<const SlotAuction> auctions,
                                                   const DeliveredMap* delivered,
                                                   SlotTimeMs cutoff) {
  if (auctions.empty()) {
    throw EmptyInput("winning_bid_eligibility_ecdf needs auctions");
  }
  std::vector<Rational> times;
  for (const SlotAuction& auction : auctions) {
    if (const BidTrace* winner = slot_winner(auction, delivered, cutoff)) {
      times.emplace_back(winner->eligible_at.ms);
    }
  }
  if (times.empty()) {
    throw EmptyInput("no slot has a winning bid within the eligibility cutoff");
  }
  return EmpiricalDistribution::from_samples(std::move(times));
}

EmpiricalDistribution per_block_mev_ecdf(std::span<const SlotAuction> auctions,
                                         const DeliveredMap* delivered, SlotTimeMs cutoff) {
  if (auctions.empty()) {
    throw EmptyInput("per_block_mev_ecdf needs auctions");
  }
  std::vector<Rational> values;
  for (const SlotAuction& auction : auctions) {
    if (const BidTrace* winner = slot_winner(auction, delivered, cutoff)) {
      values.push_back(winner->value.to_rational());
    }
  }
  if (values.empty()) {
    throw EmptyInput("no slot has a winning bid within the eligibility cutoff");
  }
  return EmpiricalDistribution::from_samples(std::move(values));
}

}  // namespace mevsim::ingest
