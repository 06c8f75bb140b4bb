#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mevsim/fee_market.hpp"
#include "mevsim/ingest.hpp"
#include "mevsim/montecarlo.hpp"
#include "mevsim/timing.hpp"

namespace mevsim::report {

inline constexpr const char* kToolName = "mevsim";
inline constexpr const char* kToolVersion = "0.1.0";

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const Table& table);

struct Plot {
  std::string name;
  std::string svg;
};

/// Tables are the source of truth; every plot is rendered from the same
/// data its table carries. The manifest pins inputs, options, and seed so a
/// bundle can be reproduced bit for bit.
struct ReportBundle {
  std::vector<Table> tables;
  std::vector<Plot> plots;
  nlohmann::ordered_json manifest;
  std::vector<std::string> headlines;
};

/// Writes <name>.csv per table, <name>.svg per plot, manifest.json last.
/// On any failure every file this call created is removed before rethrowing.
void write_bundle(const std::filesystem::path& out_dir, const ReportBundle& bundle);

struct AnalyzeOptions {
  std::filesystem::path traces;
  std::optional<ingest::TraceFormat> format;  // inferred from extension if unset
  std::int64_t bins_ms{100};
  SlotTimeMs cutoff{kDefaultEligibilityCutoff};
  bool supersede{false};
  bool strict{false};
  std::optional<std::filesystem::path> delivered;
  std::filesystem::path out_dir{"report"};
};

/// Bid-stream analytics: R/gas/tx/value/burn quantile curves over
/// eligibility time plus winning-bid eligibility PDF and CDF.
ReportBundle cmd_analyze(const AnalyzeOptions& options);

enum class SimulateKind { uplift, weekly, annual, burn, strategies };

SimulateKind simulate_kind_from_name(const std::string& name);
std::string to_string(SimulateKind kind);

struct SimulateOptions {
  SimulateKind kind{SimulateKind::uplift};
  std::filesystem::path traces;
  std::optional<ingest::TraceFormat> format;
  bool strict{false};
  std::optional<std::filesystem::path> delivered;

  std::uint64_t runs{1'000};
  std::uint64_t seed{0};
  SlotTimeMs delay_ms{sim::kDefaultDelayThreshold};
  bool supersede{false};
  std::optional<std::int64_t> baseline_ms;  // fixed baseline instead of ECDF draws

  Rational vp{13, 100};
  Rational el_share{3, 10};
  Rational base_apr{21, 500};
  WeiAmount base_fee{10'000'000'000ull};  // 10 gwei

  std::optional<std::filesystem::path> mev_ecdf;    // per-block MEV cache override
  std::optional<std::filesystem::path> pilot_ecdf;  // realized pilot eligibility
  std::optional<std::int64_t> pilot_delay_ms;       // point-mass alternative
  std::optional<std::filesystem::path> profile;     // strategy/hazard profile

  std::int64_t bins{50};
  std::filesystem::path out_dir{"report"};
};

ReportBundle cmd_simulate(const SimulateOptions& options);

/// Re-runs the command recorded in a manifest after verifying that every
/// input still has the recorded fingerprint.
ReportBundle cmd_replay(const std::filesystem::path& manifest_path,
                        const std::filesystem::path& out_dir);

}  // namespace mevsim::report
