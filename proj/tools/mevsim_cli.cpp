// Command-line surface for the auction timing toolkit: trace analytics,
// Monte Carlo simulations, ECDF cache building, and manifest replay.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "mevsim/distribution.hpp"
#include "mevsim/fingerprint.hpp"
#include "mevsim/ingest.hpp"
#include "mevsim/report.hpp"

namespace {

using namespace mevsim;

std::optional<ingest::TraceFormat> parse_format(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "jsonl") return ingest::TraceFormat::jsonl;
  if (text == "csv") return ingest::TraceFormat::csv;
  throw CLI::ValidationError("--format must be jsonl or csv");
}

std::uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

void print_bundle(const report::ReportBundle& bundle, const std::filesystem::path& out_dir) {
  for (const auto& line : bundle.headlines) {
    std::cout << line << "\n";
  }
  std::cout << "bundle written to " << out_dir.string() << "\n";
}

int run_ecdf(const std::string& traces, const std::string& format_text, const std::string& kind,
             const std::string& delivered, const std::string& out_file) {
  const auto parsed = ingest::parse_traces_file(traces, parse_format(format_text));
  if (parsed.records.empty()) {
    throw EmptyInput("no trace records in " + traces);
  }
  const auto build = ingest::to_auctions(parsed.records);
  std::optional<ingest::DeliveredMap> delivered_map;
  if (!delivered.empty()) {
    delivered_map = ingest::parse_delivered_file(delivered);
  }
  EmpiricalDistribution dist;
  EcdfCacheMeta meta;
  meta.source = fingerprint_file(traces);
  if (kind == "winning-eligibility") {
    dist = ingest::winning_bid_eligibility_ecdf(build.auctions,
                                                delivered_map ? &*delivered_map : nullptr);
    meta.units = "ms";
  } else if (kind == "mev") {
    dist = ingest::per_block_mev_ecdf(build.auctions, delivered_map ? &*delivered_map : nullptr);
    meta.units = "wei";
  } else {
    throw CLI::ValidationError("--kind must be winning-eligibility or mev");
  }
  write_ecdf_cache_file(out_file, dist, meta);
  std::cout << "wrote " << dist.size() << " samples (" << meta.units << ") to " << out_file
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MEV-Boost auction timing simulator and analytics toolkit"};
  app.require_subcommand(1);

  // ---- analyze ----
  report::AnalyzeOptions analyze;
  std::string analyze_traces, analyze_format, analyze_delivered, analyze_out = "report";
  auto* cmd_analyze = app.add_subcommand("analyze", "Bid-stream curves and eligibility ECDFs");
  cmd_analyze->add_option("traces", analyze_traces, "Trace export (JSONL or CSV)")->required();
  cmd_analyze->add_option("--format", analyze_format, "Force input format: jsonl|csv");
  cmd_analyze->add_option("--bins-ms", analyze.bins_ms, "Eligibility bin width in ms")->capture_default_str();
  cmd_analyze->add_option("--cutoff-ms", analyze.cutoff.ms, "Eligibility cutoff in ms")->capture_default_str();
  cmd_analyze->add_flag("--supersede", analyze.supersede,
                        "Treat per-builder re-bids as cancellations");
  cmd_analyze->add_flag("--strict", analyze.strict, "Abort on the first malformed record");
  cmd_analyze->add_option("--delivered", analyze_delivered,
                          "Delivered-payload JSONL (slot, block_hash)");
  cmd_analyze->add_option("--out", analyze_out, "Output directory")->capture_default_str();

  // ---- simulate ----
  report::SimulateOptions simulate;
  std::string sim_traces, sim_format, sim_delivered, sim_mev_ecdf, sim_pilot_ecdf, sim_profile;
  std::string sim_vp = "0.13", sim_el_share = "0.30", sim_base_apr = "0.042";
  std::string sim_base_fee = "10000000000";
  std::int64_t sim_baseline_ms = -1, sim_pilot_delay_ms = -1;
  bool seed_given = false;
  auto* cmd_simulate = app.add_subcommand("simulate", "Monte Carlo simulations");
  cmd_simulate->require_subcommand(1);

  std::string chosen_kind;
  for (const char* kind : {"uplift", "weekly", "annual", "burn", "strategies"}) {
    auto* sub = cmd_simulate->add_subcommand(kind, std::string("Simulate ") + kind);
    sub->callback([&, kind] { chosen_kind = kind; });
    sub->add_option("--traces", sim_traces, "Trace export (JSONL or CSV)")->required();
    sub->add_option("--format", sim_format, "Force input format: jsonl|csv");
    sub->add_option("--runs", simulate.runs, "Monte Carlo runs")->capture_default_str();
    sub->add_option("--seed", simulate.seed, "Simulation seed")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--delay-ms", simulate.delay_ms.ms, "Delay threshold in ms")->capture_default_str();
    sub->add_flag("--supersede", simulate.supersede,
                  "Treat per-builder re-bids as cancellations");
    sub->add_flag("--strict", simulate.strict, "Abort on the first malformed record");
    sub->add_option("--baseline-ms", sim_baseline_ms,
                    "Fixed baseline eligibility instead of ECDF draws");
    sub->add_option("--vp", sim_vp, "Voting power fraction")->capture_default_str();
    sub->add_option("--el-share", sim_el_share, "Execution-layer reward share")->capture_default_str();
    sub->add_option("--base-apr", sim_base_apr, "Base APR")->capture_default_str();
    sub->add_option("--base-fee-wei", sim_base_fee, "Base fee per gas in wei")->capture_default_str();
    sub->add_option("--mev-ecdf", sim_mev_ecdf, "Per-block MEV ECDF cache");
    sub->add_option("--pilot-ecdf", sim_pilot_ecdf, "Realized pilot eligibility ECDF cache");
    sub->add_option("--pilot-delay-ms", sim_pilot_delay_ms, "Point-mass pilot delay in ms");
    sub->add_option("--config", sim_profile, "Strategy/hazard profile file");
    sub->add_option("--delivered", sim_delivered, "Delivered-payload JSONL");
    sub->add_option("--bins", simulate.bins, "Histogram bin count")->capture_default_str();
    sub->add_option("--out", simulate.out_dir, "Output directory")->capture_default_str();
  }

  // ---- replay ----
  std::string replay_manifest, replay_out = "report-replay";
  auto* cmd_replay = app.add_subcommand("replay", "Re-run a bundle from its manifest");
  cmd_replay->add_option("manifest", replay_manifest, "manifest.json of a previous run")
      ->required();
  cmd_replay->add_option("--out", replay_out, "Output directory")->capture_default_str();

  // ---- ecdf ----
  std::string ecdf_traces, ecdf_format, ecdf_kind = "winning-eligibility", ecdf_delivered,
              ecdf_out = "ecdf.txt";
  auto* cmd_ecdf = app.add_subcommand("ecdf", "Build an ECDF cache from traces");
  cmd_ecdf->add_option("--traces", ecdf_traces, "Trace export (JSONL or CSV)")->required();
  cmd_ecdf->add_option("--format", ecdf_format, "Force input format: jsonl|csv");
  cmd_ecdf->add_option("--kind", ecdf_kind, "winning-eligibility|mev")->capture_default_str();
  cmd_ecdf->add_option("--delivered", ecdf_delivered, "Delivered-payload JSONL");
  cmd_ecdf->add_option("--out-file", ecdf_out, "Cache file to write")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_analyze->parsed()) {
      analyze.traces = analyze_traces;
      analyze.format = parse_format(analyze_format);
      if (!analyze_delivered.empty()) analyze.delivered = analyze_delivered;
      analyze.out_dir = analyze_out;
      print_bundle(report::cmd_analyze(analyze), analyze.out_dir);
      return 0;
    }
    if (cmd_simulate->parsed()) {
      simulate.kind = report::simulate_kind_from_name(chosen_kind);
      simulate.traces = sim_traces;
      simulate.format = parse_format(sim_format);
      if (!sim_delivered.empty()) simulate.delivered = sim_delivered;
      if (!sim_mev_ecdf.empty()) simulate.mev_ecdf = sim_mev_ecdf;
      if (!sim_pilot_ecdf.empty()) simulate.pilot_ecdf = sim_pilot_ecdf;
      if (!sim_profile.empty()) simulate.profile = sim_profile;
      if (sim_baseline_ms >= 0) simulate.baseline_ms = sim_baseline_ms;
      if (sim_pilot_delay_ms >= 0) simulate.pilot_delay_ms = sim_pilot_delay_ms;
      simulate.vp = parse_rational(sim_vp);
      simulate.el_share = parse_rational(sim_el_share);
      simulate.base_apr = parse_rational(sim_base_apr);
      simulate.base_fee = WeiAmount::parse(sim_base_fee);
      if (!seed_given) {
        simulate.seed = fresh_seed();
      }
      std::cout << "seed: " << simulate.seed << "\n";
      print_bundle(report::cmd_simulate(simulate), simulate.out_dir);
      return 0;
    }
    if (cmd_replay->parsed()) {
      print_bundle(report::cmd_replay(replay_manifest, replay_out), replay_out);
      return 0;
    }
    if (cmd_ecdf->parsed()) {
      return run_ecdf(ecdf_traces, ecdf_format, ecdf_kind, ecdf_delivered, ecdf_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
