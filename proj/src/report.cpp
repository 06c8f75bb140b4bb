#include "mevsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mevsim/fingerprint.hpp"

namespace mevsim::report {

using nlohmann::ordered_json;

std::string render_csv(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << row[i];
    }
    out << '\n';
  }
  return out.str();
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string dec(const Rational& r) { return rational_to_decimal(r, 12); }

std::string pct(const Rational& r) { return rational_to_decimal(r * 100, 4) + "%"; }

// ------------------------------- SVG ----------------------------------

constexpr double kW = 720, kH = 420;
constexpr double kMarginL = 70, kMarginR = 20, kMarginT = 40, kMarginB = 50;

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};

void svg_frame(std::ostringstream& out, const std::string& title, double x0, double x1,
               double y0, double y1, const char* x_label, const char* y_label) {
  out << "<rect x='" << fmt(kMarginL) << "' y='" << fmt(kMarginT) << "' width='"
      << fmt(kW - kMarginL - kMarginR) << "' height='" << fmt(kH - kMarginT - kMarginB)
      << "' fill='none' stroke='#444'/>\n";
  out << "<text x='" << fmt(kW / 2) << "' y='24' text-anchor='middle' font-size='15'>" << title
      << "</text>\n";
  out << "<text x='" << fmt(kW / 2) << "' y='" << fmt(kH - 10)
      << "' text-anchor='middle' font-size='12'>" << x_label << "</text>\n";
  out << "<text x='16' y='" << fmt(kH / 2)
      << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 " << fmt(kH / 2)
      << ")'>" << y_label << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = x0 + (x1 - x0) * i / 4.0;
    const double ty = y0 + (y1 - y0) * i / 4.0;
    const double px = kMarginL + (kW - kMarginL - kMarginR) * i / 4.0;
    const double py = kH - kMarginB - (kH - kMarginT - kMarginB) * i / 4.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.4g", tx);
    out << "<text x='" << fmt(px) << "' y='" << fmt(kH - kMarginB + 16)
        << "' text-anchor='middle' font-size='10'>" << label << "</text>\n";
    std::snprintf(label, sizeof(label), "%.4g", ty);
    out << "<text x='" << fmt(kMarginL - 6) << "' y='" << fmt(py + 3)
        << "' text-anchor='end' font-size='10'>" << label << "</text>\n";
  }
}

std::string svg_chart(const std::string& title, const char* x_label, const char* y_label,
                      const std::vector<Series>& series, bool step = false) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      if (first) {
        x0 = x1 = x;
        y0 = y1 = y;
        first = false;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double x) { return kMarginL + (x - x0) / (x1 - x0) * (kW - kMarginL - kMarginR); };
  auto py = [&](double y) {
    return kH - kMarginB - (y - y0) / (y1 - y0) * (kH - kMarginT - kMarginB);
  };

  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  svg_frame(out, title, x0, x1, y0, y1, x_label, y_label);
  double legend_y = kMarginT + 14;
  for (const auto& s : series) {
    if (s.points.empty()) continue;
    out << "<polyline fill='none' stroke='" << s.color << "' stroke-width='1.5' points='";
    double prev_y = 0;
    bool started = false;
    for (const auto& [x, y] : s.points) {
      if (step && started) {
        out << fmt(px(x)) << ',' << fmt(py(prev_y)) << ' ';
      }
      out << fmt(px(x)) << ',' << fmt(py(y)) << ' ';
      prev_y = y;
      started = true;
    }
    out << "'/>\n";
    out << "<text x='" << fmt(kW - kMarginR - 6) << "' y='" << fmt(legend_y)
        << "' text-anchor='end' font-size='11' fill='" << s.color << "'>" << s.label
        << "</text>\n";
    legend_y += 14;
  }
  out << "</svg>\n";
  return out.str();
}

std::string svg_histogram(const std::string& title, const char* x_label,
                          const std::vector<std::tuple<double, double, std::uint64_t>>& bins) {
  double x0 = 0, x1 = 1;
  std::uint64_t peak = 1;
  if (!bins.empty()) {
    x0 = std::get<0>(bins.front());
    x1 = std::get<1>(bins.back());
    for (const auto& b : bins) peak = std::max(peak, std::get<2>(b));
  }
  if (x1 == x0) x1 = x0 + 1;
  auto px = [&](double x) { return kMarginL + (x - x0) / (x1 - x0) * (kW - kMarginL - kMarginR); };
  auto py = [&](double c) {
    return kH - kMarginB - c / static_cast<double>(peak) * (kH - kMarginT - kMarginB);
  };
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
      << "' viewBox='0 0 " << kW << " " << kH << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  svg_frame(out, title, x0, x1, 0, static_cast<double>(peak), x_label, "count");
  for (const auto& [lo, hi, count] : bins) {
    if (count == 0) continue;
    out << "<rect x='" << fmt(px(lo)) << "' y='" << fmt(py(static_cast<double>(count)))
        << "' width='" << fmt(std::max(0.5, px(hi) - px(lo))) << "' height='"
        << fmt(kH - kMarginB - py(static_cast<double>(count)))
        << "' fill='#4878a8' stroke='white' stroke-width='0.4'/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

// --------------------------- table builders ---------------------------

Table curve_table(const std::string& name, const BinnedCurve& curve) {
  Table table{name, {"bin_start_ms", "bin_end_ms", "count", "q25", "q50", "q95"}, {}};
  for (std::size_t i = 0; i < curve.bins.size(); ++i) {
    const auto& bin = curve.bins[i];
    table.rows.push_back({std::to_string(curve.bin_edges[i].ms),
                          std::to_string(curve.bin_edges[i + 1].ms), std::to_string(bin.count),
                          bin.q25 ? dec(*bin.q25) : "", bin.q50 ? dec(*bin.q50) : "",
                          bin.q95 ? dec(*bin.q95) : ""});
  }
  return table;
}

Plot curve_plot(const std::string& name, const std::string& title, const char* y_label,
                const BinnedCurve& curve) {
  Series q25{"q25", "#3366cc", {}}, q50{"median", "#cc3333", {}}, q95{"q95", "#33a02c", {}};
  for (std::size_t i = 0; i < curve.bins.size(); ++i) {
    const auto& bin = curve.bins[i];
    const double mid =
        (static_cast<double>(curve.bin_edges[i].ms) + static_cast<double>(curve.bin_edges[i + 1].ms)) /
        2.0;
    if (bin.q25) q25.points.emplace_back(mid, to_double(*bin.q25));
    if (bin.q50) q50.points.emplace_back(mid, to_double(*bin.q50));
    if (bin.q95) q95.points.emplace_back(mid, to_double(*bin.q95));
  }
  return Plot{name, svg_chart(title, "eligibility time (ms)", y_label, {q25, q50, q95})};
}

// Distinct-sample CDF steps: (x, P(X <= x)).
std::vector<std::pair<Rational, Rational>> cdf_steps(const EmpiricalDistribution& dist) {
  std::vector<std::pair<Rational, Rational>> steps;
  const auto& xs = dist.samples();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
    steps.emplace_back(xs[i], dist.cdf(xs[i]));
  }
  return steps;
}

Table cdf_table(const std::string& name, const char* x_column,
                const EmpiricalDistribution& dist) {
  Table table{name, {x_column, "cum_prob"}, {}};
  for (const auto& [x, p] : cdf_steps(dist)) {
    table.rows.push_back({dec(x), dec(p)});
  }
  return table;
}

Plot cdf_plot(const std::string& name, const std::string& title, const char* x_label,
              const EmpiricalDistribution& dist) {
  Series line{"cdf", "#cc3333", {}};
  for (const auto& [x, p] : cdf_steps(dist)) {
    line.points.emplace_back(to_double(x), to_double(p));
  }
  return Plot{name, svg_chart(title, x_label, "cumulative probability", {line}, /*step=*/true)};
}

struct Histogram {
  std::vector<std::tuple<Rational, Rational, std::uint64_t>> bins;  // [lo, hi) and count
};

// Fixed bin count over the sample range; the last bin is closed above.
Histogram histogram(const EmpiricalDistribution& dist, std::int64_t n_bins) {
  Histogram hist;
  const Rational lo = dist.min();
  const Rational hi = dist.max();
  if (lo == hi) {
    hist.bins.emplace_back(lo, hi, dist.size());
    return hist;
  }
  const Rational width = (hi - lo) / n_bins;
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n_bins), 0);
  for (const Rational& x : dist.samples()) {
    auto idx = static_cast<std::size_t>(
        std::min<BigInt>(floor_rational((x - lo) / width), BigInt(n_bins - 1))
            .convert_to<std::int64_t>());
    ++counts[idx];
  }
  for (std::int64_t i = 0; i < n_bins; ++i) {
    hist.bins.emplace_back(lo + width * i, lo + width * (i + 1), counts[static_cast<std::size_t>(i)]);
  }
  return hist;
}

Table histogram_table(const std::string& name, const char* x_column, const Histogram& hist) {
  Table table{name, {std::string(x_column) + "_lo", std::string(x_column) + "_hi", "count"}, {}};
  for (const auto& [lo, hi, count] : hist.bins) {
    table.rows.push_back({dec(lo), dec(hi), std::to_string(count)});
  }
  return table;
}

Plot histogram_plot(const std::string& name, const std::string& title, const char* x_label,
                    const Histogram& hist) {
  std::vector<std::tuple<double, double, std::uint64_t>> bins;
  bins.reserve(hist.bins.size());
  for (const auto& [lo, hi, count] : hist.bins) {
    bins.emplace_back(to_double(lo), to_double(hi), count);
  }
  return Plot{name, svg_histogram(title, x_label, bins)};
}

Table summary_table(const std::string& name, const QuantileSummary& summary,
                    const std::vector<std::pair<std::string, std::string>>& extras) {
  Table table{name, {"statistic", "value"}, {}};
  table.rows.push_back({"q25", dec(summary.q25)});
  table.rows.push_back({"q50", dec(summary.q50)});
  table.rows.push_back({"q95", dec(summary.q95)});
  for (const auto& [k, v] : extras) {
    table.rows.push_back({k, v});
  }
  return table;
}

std::string headline(const std::string& what, const QuantileSummary& s) {
  return what + " q25/q50/q95: " + pct(s.q25) + " / " + pct(s.q50) + " / " + pct(s.q95);
}

// ------------------------------ inputs --------------------------------

struct LoadedCorpus {
  std::vector<SlotAuction> auctions;
  ingest::AuctionBuildResult accounting;
  std::size_t records{0};
  std::size_t parse_issues{0};
  std::optional<ingest::DeliveredMap> delivered;
};

LoadedCorpus load_corpus(const std::filesystem::path& traces,
                         std::optional<ingest::TraceFormat> format, bool strict,
                         const std::optional<std::filesystem::path>& delivered) {
  LoadedCorpus corpus;
  auto parsed = ingest::parse_traces_file(traces, format, strict);
  if (parsed.records.empty()) {
    throw EmptyInput("no trace records in " + traces.string());
  }
  corpus.records = parsed.records.size();
  corpus.parse_issues = parsed.issues.size();
  corpus.accounting = ingest::to_auctions(parsed.records);
  corpus.auctions = std::move(corpus.accounting.auctions);
  corpus.accounting.auctions.clear();
  if (corpus.auctions.empty()) {
    throw EmptyInput("no auction survived ingestion from " + traces.string());
  }
  if (delivered) {
    corpus.delivered = ingest::parse_delivered_file(*delivered);
  }
  return corpus;
}

ordered_json input_entry(const std::filesystem::path& path) {
  ordered_json entry;
  entry["path"] = path.string();
  entry["fingerprint"] = fingerprint_file(path);
  return entry;
}

void attach_outputs(ReportBundle& bundle) {
  ordered_json tables = ordered_json::array();
  for (const auto& t : bundle.tables) tables.push_back(t.name);
  ordered_json plots = ordered_json::array();
  for (const auto& p : bundle.plots) plots.push_back(p.name);
  bundle.manifest["outputs"]["tables"] = tables;
  bundle.manifest["outputs"]["plots"] = plots;
}

}  // namespace

void write_bundle(const std::filesystem::path& out_dir, const ReportBundle& bundle) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot open output file: " + path.string());
    }
    written.push_back(path);
    out << content;
    if (!out) {
      throw std::runtime_error("failed writing output file: " + path.string());
    }
  };
  try {
    std::filesystem::create_directories(out_dir);
    for (const Table& table : bundle.tables) {
      emit(out_dir / (table.name + ".csv"), render_csv(table));
    }
    for (const Plot& plot : bundle.plots) {
      emit(out_dir / (plot.name + ".svg"), plot.svg);
    }
    emit(out_dir / "manifest.json", bundle.manifest.dump(2) + "\n");
  } catch (...) {
    for (const auto& path : written) {
      std::error_code ec;
      std::filesystem::remove(path, ec);
    }
    throw;
  }
}

ReportBundle cmd_analyze(const AnalyzeOptions& options) {
  if (options.bins_ms <= 0) {
    throw std::invalid_argument("--bins-ms must be positive");
  }
  LoadedCorpus corpus =
      load_corpus(options.traces, options.format, options.strict, options.delivered);

  std::vector<SlotAuction> pool = std::move(corpus.auctions);
  if (options.supersede) {
    for (auto& a : pool) a = a.with_supersede(true);
  }

  ReportBundle bundle;
  const struct {
    const char* name;
    const char* title;
    const char* y_label;
    CurveOrdinate ordinate;
  } curves[] = {
      {"r_curve", "Bid value relative to the auction maximum", "R", CurveOrdinate::r_value},
      {"gas_curve", "Block gas used over the auction", "gas used", CurveOrdinate::gas_used},
      {"tx_curve", "Transactions included over the auction", "tx count", CurveOrdinate::tx_count},
      {"value_curve", "Bid value over the auction", "bid value (wei)", CurveOrdinate::value},
  };
  for (const auto& spec : curves) {
    const BinnedCurve curve =
        binned_quantile_curve(pool, spec.ordinate, options.bins_ms, options.cutoff);
    bundle.tables.push_back(curve_table(spec.name, curve));
    bundle.plots.push_back(curve_plot(spec.name, spec.title, spec.y_label, curve));
  }

  // Burn externality per bid: next-slot burn change vs a target-gas block,
  // next-slot gas held at target.
  {
    fee::FeeMarketState state;
    const Rational base = state.base_fee_per_gas.to_rational();
    std::vector<std::pair<SlotTimeMs, Rational>> points;
    for (const SlotAuction& auction : pool) {
      for (const BidTrace& bid : auction.bids()) {
        points.emplace_back(bid.eligible_at,
                            fee::next_base_fee(state, bid.gas_used).to_rational() / base - 1);
      }
    }
    const BinnedCurve curve = binned_quantile_curve_points(points, options.bins_ms);
    bundle.tables.push_back(curve_table("burn_curve", curve));
    bundle.plots.push_back(curve_plot("burn_curve", "Next-slot burn increase by bid eligibility",
                                      "burn increase (fraction)", curve));
  }

  const auto eligibility = ingest::winning_bid_eligibility_ecdf(
      pool, corpus.delivered ? &*corpus.delivered : nullptr, options.cutoff);
  bundle.tables.push_back(cdf_table("winning_eligibility_cdf", "eligibility_ms", eligibility));
  bundle.plots.push_back(cdf_plot("winning_eligibility_cdf",
                                  "Winning-bid eligibility, cumulative", "eligibility time (ms)",
                                  eligibility));
  {
    // Fixed-width pdf bins aligned to multiples of bins_ms.
    std::vector<std::pair<SlotTimeMs, Rational>> points;
    for (const Rational& x : eligibility.samples()) {
      points.emplace_back(floor_to_ms(x), Rational(0));
    }
    const BinnedCurve bins = binned_quantile_curve_points(points, options.bins_ms);
    Histogram hist;
    for (std::size_t i = 0; i < bins.bins.size(); ++i) {
      hist.bins.emplace_back(Rational(bins.bin_edges[i].ms), Rational(bins.bin_edges[i + 1].ms),
                             bins.bins[i].count);
    }
    bundle.tables.push_back(histogram_table("winning_eligibility_pdf", "eligibility_ms", hist));
    bundle.plots.push_back(histogram_plot("winning_eligibility_pdf",
                                          "Winning-bid eligibility, histogram",
                                          "eligibility time (ms)", hist));
  }

  // Median R at the delay probe points; the early gain dwarfs the late one.
  {
    Table table{"r_flattening", {"probe_ms", "median_r"}, {}};
    std::optional<Rational> prev;
    std::vector<std::pair<std::string, std::string>> gains;
    for (const std::int64_t probe : {250ll, 950ll, 1'000ll}) {
      const auto median = median_r_at_query(pool, SlotTimeMs{probe}, options.cutoff);
      table.rows.push_back({std::to_string(probe), median ? dec(*median) : ""});
      if (prev && median && *prev > 0) {
        gains.emplace_back("gain_to_" + std::to_string(probe), dec(*median / *prev - 1));
      }
      prev = median;
    }
    for (auto& [k, v] : gains) {
      table.rows.push_back({k, v});
    }
    bundle.tables.push_back(std::move(table));
  }

  const QuantileSummary summary = eligibility.summarize();
  bundle.tables.push_back(summary_table(
      "winning_eligibility_summary", summary,
      {{"slots", std::to_string(pool.size())},
       {"records", std::to_string(corpus.records)},
       {"parse_issues", std::to_string(corpus.parse_issues)},
       {"accepted", std::to_string(corpus.accounting.accepted)},
       {"dropped", std::to_string(corpus.accounting.dropped)},
       {"duplicates", std::to_string(corpus.accounting.duplicates)}}));
  bundle.headlines.push_back("winning eligibility q25/q50/q95 (ms): " + dec(summary.q25) +
                             " / " + dec(summary.q50) + " / " + dec(summary.q95));

  bundle.manifest["tool"] = kToolName;
  bundle.manifest["version"] = kToolVersion;
  bundle.manifest["command"] = "analyze";
  bundle.manifest["options"] = {
      {"bins_ms", options.bins_ms},
      {"cutoff_ms", options.cutoff.ms},
      {"supersede", options.supersede},
      {"strict", options.strict},
      {"format", options.format ? (*options.format == ingest::TraceFormat::jsonl ? "jsonl" : "csv")
                                : ""},
  };
  bundle.manifest["inputs"]["traces"] = input_entry(options.traces);
  if (options.delivered) {
    bundle.manifest["inputs"]["delivered"] = input_entry(*options.delivered);
  }
  attach_outputs(bundle);

  write_bundle(options.out_dir, bundle);
  return bundle;
}

SimulateKind simulate_kind_from_name(const std::string& name) {
  if (name == "uplift") return SimulateKind::uplift;
  if (name == "weekly") return SimulateKind::weekly;
  if (name == "annual") return SimulateKind::annual;
  if (name == "burn") return SimulateKind::burn;
  if (name == "strategies") return SimulateKind::strategies;
  throw std::invalid_argument("unknown simulate subcommand: " + name);
}

std::string to_string(SimulateKind kind) {
  switch (kind) {
    case SimulateKind::uplift: return "uplift";
    case SimulateKind::weekly: return "weekly";
    case SimulateKind::annual: return "annual";
    case SimulateKind::burn: return "burn";
    case SimulateKind::strategies: return "strategies";
  }
  return "?";
}

namespace {

EmpiricalDistribution baseline_distribution(const SimulateOptions& options,
                                            std::span<const SlotAuction> pool,
                                            const std::optional<ingest::DeliveredMap>& delivered) {
  if (options.baseline_ms) {
    return EmpiricalDistribution::point_mass(Rational(*options.baseline_ms));
  }
  return ingest::winning_bid_eligibility_ecdf(pool, delivered ? &*delivered : nullptr);
}

sim::SimConfig sim_config(const SimulateOptions& options) {
  sim::SimConfig config;
  config.n_runs = options.runs;
  config.delay_threshold = options.delay_ms;
  config.seed = options.seed;
  config.supersede = options.supersede;
  return config;
}

void simulate_uplift(const SimulateOptions& options, std::span<const SlotAuction> pool,
                     const std::optional<ingest::DeliveredMap>& delivered,
                     ReportBundle& bundle) {
  const auto baseline = baseline_distribution(options, pool, delivered);
  const auto result = sim::run_uplift_simulation(pool, baseline, sim_config(options));
  const QuantileSummary summary = result.uplifts.summarize();
  bundle.tables.push_back(summary_table(
      "uplift_summary", summary,
      {{"runs", std::to_string(result.collected_runs + result.skipped_runs)},
       {"collected", std::to_string(result.collected_runs)},
       {"skipped", std::to_string(result.skipped_runs)}}));
  bundle.tables.push_back(cdf_table("uplift_cdf", "uplift_fraction", result.uplifts));
  bundle.plots.push_back(cdf_plot("uplift_cdf", "Per-block MEV uplift, cumulative",
                                  "uplift (fraction)", result.uplifts));
  const Histogram hist = histogram(result.uplifts, options.bins);
  bundle.tables.push_back(histogram_table("uplift_pdf", "uplift_fraction", hist));
  bundle.plots.push_back(
      histogram_plot("uplift_pdf", "Per-block MEV uplift, histogram", "uplift (fraction)", hist));
  bundle.headlines.push_back(headline("per-block uplift", summary));
}

mc::RewardModel reward_model(const SimulateOptions& options, std::span<const SlotAuction> pool,
                             const std::optional<ingest::DeliveredMap>& delivered,
                             const EmpiricalDistribution& uplift) {
  mc::RewardModel model;
  if (options.mev_ecdf) {
    model.per_block_mev = read_ecdf_cache_file(*options.mev_ecdf).first;
  } else {
    model.per_block_mev = ingest::per_block_mev_ecdf(pool, delivered ? &*delivered : nullptr);
  }
  model.uplift = uplift;
  model.el_share = options.el_share;
  model.base_apr = options.base_apr;
  return model;
}

void report_tables(const std::string& prefix, const mc::UpliftReport& report,
                   ReportBundle& bundle, std::int64_t n_bins) {
  bundle.tables.push_back(summary_table(
      prefix + "_summary", report.summary,
      {{"apr_delta_abs_q50", dec(report.apr_delta_absolute.q50)},
       {"apr_delta_rel_q50", dec(report.apr_delta_relative.q50)},
       {"apr_delta_abs_q25", dec(report.apr_delta_absolute.q25)},
       {"apr_delta_rel_q25", dec(report.apr_delta_relative.q25)},
       {"apr_delta_abs_q95", dec(report.apr_delta_absolute.q95)},
       {"apr_delta_rel_q95", dec(report.apr_delta_relative.q95)},
       {"runs", std::to_string(report.runs)},
       {"degenerate_runs", std::to_string(report.degenerate_runs)},
       {"skipped_uplift_draws", std::to_string(report.skipped_uplift_draws)}}));
  bundle.tables.push_back(cdf_table(prefix + "_cdf", "uplift_fraction", report.dist));
  bundle.plots.push_back(cdf_plot(prefix + "_cdf", prefix + " MEV uplift, cumulative",
                                  "uplift (fraction)", report.dist));
  const Histogram hist = histogram(report.dist, n_bins);
  bundle.tables.push_back(histogram_table(prefix + "_pdf", "uplift_fraction", hist));
  bundle.plots.push_back(histogram_plot(prefix + "_pdf", prefix + " MEV uplift, histogram",
                                        "uplift (fraction)", hist));
}

void simulate_weekly(const SimulateOptions& options, std::span<const SlotAuction> pool,
                     const std::optional<ingest::DeliveredMap>& delivered,
                     ReportBundle& bundle) {
  const auto baseline = baseline_distribution(options, pool, delivered);
  const auto uplift = sim::run_uplift_simulation(pool, baseline, sim_config(options));
  const auto model = reward_model(options, pool, delivered, uplift.uplifts);
  mc::VotingPower vp{options.vp};
  SeededRng rng(options.seed, 0x7765656Bull);  // dedicated weekly stream
  const auto period = mc::period_uplift(vp, model, options.runs, rng);
  mc::UpliftReport report = mc::make_report(mc::Horizon::weekly, period, model);
  report.skipped_uplift_draws = uplift.skipped_runs;
  report_tables("weekly", report, bundle, options.bins);
  bundle.headlines.push_back(headline("weekly uplift", report.summary));
  bundle.headlines.push_back(
      "APR " + pct(model.base_apr) + " -> " +
      pct(model.base_apr + report.apr_delta_absolute.q50) + " (relative uplift " +
      pct(report.apr_delta_relative.q50) + ")");
}

void simulate_annual(const SimulateOptions& options, std::span<const SlotAuction> pool,
                     const std::optional<ingest::DeliveredMap>& delivered,
                     ReportBundle& bundle) {
  EmpiricalDistribution pilot;
  if (options.pilot_ecdf) {
    pilot = read_ecdf_cache_file(*options.pilot_ecdf).first;
  } else if (options.pilot_delay_ms) {
    pilot = EmpiricalDistribution::point_mass(Rational(*options.pilot_delay_ms));
  } else {
    throw std::invalid_argument("simulate annual needs --pilot-ecdf or --pilot-delay-ms");
  }
  // The uplift slot of the model is replaced inside annual_pilot_uplift; a
  // placeholder satisfies validation.
  const auto model =
      reward_model(options, pool, delivered, EmpiricalDistribution::point_mass(Rational(0)));
  mc::VotingPower vp{options.vp};
  const auto baseline = baseline_distribution(options, pool, delivered);
  const auto report =
      mc::annual_pilot_uplift(model, pilot, pool, vp, sim_config(options), &baseline);
  report_tables("annual", report, bundle, options.bins);
  bundle.headlines.push_back(headline("annual uplift", report.summary));
  bundle.headlines.push_back(
      "APR " + pct(model.base_apr) + " -> " +
      pct(model.base_apr + report.apr_delta_absolute.q50) + " (relative uplift " +
      pct(report.apr_delta_relative.q50) + ")");
}

void simulate_burn(const SimulateOptions& options, std::span<const SlotAuction> pool,
                   const std::optional<ingest::DeliveredMap>& delivered,
                   ReportBundle& bundle) {
  fee::FeeMarketState state;
  state.base_fee_per_gas = options.base_fee;
  const auto baseline = baseline_distribution(options, pool, delivered);
  const auto result = fee::run_burn_simulation(pool, baseline, sim_config(options), state);
  const QuantileSummary summary = result.burn_increases.summarize();
  bundle.tables.push_back(summary_table(
      "burn_summary", summary,
      {{"runs", std::to_string(result.collected_runs + result.skipped_runs)},
       {"collected", std::to_string(result.collected_runs)},
       {"skipped", std::to_string(result.skipped_runs)}}));
  bundle.tables.push_back(cdf_table("burn_cdf", "burn_increase_fraction", result.burn_increases));
  bundle.plots.push_back(cdf_plot("burn_cdf", "Next-slot burn increase, cumulative",
                                  "burn increase (fraction)", result.burn_increases));
  const Histogram hist = histogram(result.burn_increases, options.bins);
  bundle.tables.push_back(histogram_table("burn_pdf", "burn_increase_fraction", hist));
  bundle.plots.push_back(histogram_plot("burn_pdf", "Next-slot burn increase, histogram",
                                        "burn increase (fraction)", hist));
  bundle.headlines.push_back(headline("burn increase", summary));
}

void simulate_strategies(const SimulateOptions& options, std::span<const SlotAuction> pool,
                         ReportBundle& bundle) {
  sim::SimProfile profile;
  if (options.profile) {
    profile = sim::load_sim_profile_file(*options.profile);
    if (profile.strategies.empty()) {
      throw EmptyInput("profile defines no strategies: " + options.profile->string());
    }
  } else {
    profile.strategies = sim::default_presets(options.delay_ms);
  }
  const auto comparison =
      sim::compare_strategies(pool, profile.strategies, profile.hazard, sim_config(options));

  Table table{"strategies",
              {"strategy", "slots", "slots_with_winner", "missed_rate", "eligibility_q25_ms",
               "eligibility_q50_ms", "eligibility_q95_ms", "uplift_q25", "uplift_q50",
               "uplift_q95", "uplift_samples"},
              {}};
  for (const auto& entry : comparison.entries) {
    std::vector<std::string> row{entry.name, std::to_string(entry.slots),
                                 std::to_string(entry.slots_with_winner),
                                 dec(entry.missed_rate)};
    if (entry.winning_eligibility_ms) {
      row.push_back(dec(entry.winning_eligibility_ms->q25));
      row.push_back(dec(entry.winning_eligibility_ms->q50));
      row.push_back(dec(entry.winning_eligibility_ms->q95));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    if (entry.uplift_vs_benchmark) {
      row.push_back(dec(entry.uplift_vs_benchmark->q25));
      row.push_back(dec(entry.uplift_vs_benchmark->q50));
      row.push_back(dec(entry.uplift_vs_benchmark->q95));
    } else {
      row.insert(row.end(), {"", "", ""});
    }
    row.push_back(std::to_string(entry.uplift_samples));
    table.rows.push_back(std::move(row));

    if (entry.uplift_vs_benchmark) {
      bundle.headlines.push_back(entry.name + " " +
                                 headline("uplift", *entry.uplift_vs_benchmark));
    }
  }
  bundle.tables.push_back(std::move(table));
}

}  // namespace

ReportBundle cmd_simulate(const SimulateOptions& options) {
  if (options.bins <= 0) {
    throw std::invalid_argument("--bins must be positive");
  }
  LoadedCorpus corpus =
      load_corpus(options.traces, options.format, options.strict, options.delivered);
  std::vector<SlotAuction> pool = std::move(corpus.auctions);

  ReportBundle bundle;
  switch (options.kind) {
    case SimulateKind::uplift:
      simulate_uplift(options, pool, corpus.delivered, bundle);
      break;
    case SimulateKind::weekly:
      simulate_weekly(options, pool, corpus.delivered, bundle);
      break;
    case SimulateKind::annual:
      simulate_annual(options, pool, corpus.delivered, bundle);
      break;
    case SimulateKind::burn:
      simulate_burn(options, pool, corpus.delivered, bundle);
      break;
    case SimulateKind::strategies:
      simulate_strategies(options, pool, bundle);
      break;
  }

  bundle.manifest["tool"] = kToolName;
  bundle.manifest["version"] = kToolVersion;
  bundle.manifest["command"] = "simulate";
  bundle.manifest["kind"] = to_string(options.kind);
  bundle.manifest["seed"] = options.seed;
  ordered_json opts;
  opts["runs"] = options.runs;
  opts["delay_ms"] = options.delay_ms.ms;
  opts["supersede"] = options.supersede;
  opts["strict"] = options.strict;
  opts["format"] =
      options.format ? (*options.format == ingest::TraceFormat::jsonl ? "jsonl" : "csv") : "";
  opts["vp"] = rational_to_decimal(options.vp, 18);
  opts["el_share"] = rational_to_decimal(options.el_share, 18);
  opts["base_apr"] = rational_to_decimal(options.base_apr, 18);
  opts["base_fee_wei"] = options.base_fee.str();
  opts["bins"] = options.bins;
  if (options.baseline_ms) opts["baseline_ms"] = *options.baseline_ms;
  if (options.pilot_delay_ms) opts["pilot_delay_ms"] = *options.pilot_delay_ms;
  bundle.manifest["options"] = opts;
  bundle.manifest["inputs"]["traces"] = input_entry(options.traces);
  if (options.delivered) bundle.manifest["inputs"]["delivered"] = input_entry(*options.delivered);
  if (options.mev_ecdf) bundle.manifest["inputs"]["mev_ecdf"] = input_entry(*options.mev_ecdf);
  if (options.pilot_ecdf)
    bundle.manifest["inputs"]["pilot_ecdf"] = input_entry(*options.pilot_ecdf);
  if (options.profile) bundle.manifest["inputs"]["profile"] = input_entry(*options.profile);
  attach_outputs(bundle);

  write_bundle(options.out_dir, bundle);
  return bundle;
}

namespace {

std::optional<ingest::TraceFormat> format_from_manifest(const std::string& text) {
  if (text.empty()) return std::nullopt;
  if (text == "jsonl") return ingest::TraceFormat::jsonl;
  if (text == "csv") return ingest::TraceFormat::csv;
  throw std::invalid_argument("manifest carries unknown trace format: " + text);
}

void verify_input(const ordered_json& inputs, const char* key) {
  if (!inputs.contains(key)) return;
  const auto& entry = inputs.at(key);
  const std::filesystem::path path = entry.at("path").get<std::string>();
  const std::string expected = entry.at("fingerprint").get<std::string>();
  const std::string actual = fingerprint_file(path);
  if (actual != expected) {
    throw std::runtime_error("input '" + path.string() + "' changed since the manifest: " +
                             actual + " != " + expected);
  }
}

std::optional<std::filesystem::path> manifest_path_opt(const ordered_json& inputs,
                                                       const char* key) {
  if (!inputs.contains(key)) return std::nullopt;
  return std::filesystem::path(inputs.at(key).at("path").get<std::string>());
}

}  // namespace

ReportBundle cmd_replay(const std::filesystem::path& manifest_path,
                        const std::filesystem::path& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  }
  ordered_json manifest = ordered_json::parse(in);
  const auto& inputs = manifest.at("inputs");
  for (const char* key : {"traces", "delivered", "mev_ecdf", "pilot_ecdf", "profile"}) {
    verify_input(inputs, key);
  }
  const std::string command = manifest.at("command").get<std::string>();
  const auto& opts = manifest.at("options");

  if (command == "analyze") {
    AnalyzeOptions options;
    options.traces = inputs.at("traces").at("path").get<std::string>();
    options.format = format_from_manifest(opts.at("format").get<std::string>());
    options.bins_ms = opts.at("bins_ms").get<std::int64_t>();
    options.cutoff = SlotTimeMs{opts.at("cutoff_ms").get<std::int64_t>()};
    options.supersede = opts.at("supersede").get<bool>();
    options.strict = opts.at("strict").get<bool>();
    options.delivered = manifest_path_opt(inputs, "delivered");
    options.out_dir = out_dir;
    return cmd_analyze(options);
  }
  if (command == "simulate") {
    SimulateOptions options;
    options.kind = simulate_kind_from_name(manifest.at("kind").get<std::string>());
    options.traces = inputs.at("traces").at("path").get<std::string>();
    options.format = format_from_manifest(opts.at("format").get<std::string>());
    options.strict = opts.at("strict").get<bool>();
    options.delivered = manifest_path_opt(inputs, "delivered");
    options.runs = opts.at("runs").get<std::uint64_t>();
    options.seed = manifest.at("seed").get<std::uint64_t>();
    options.delay_ms = SlotTimeMs{opts.at("delay_ms").get<std::int64_t>()};
    options.supersede = opts.at("supersede").get<bool>();
    if (opts.contains("baseline_ms")) options.baseline_ms = opts.at("baseline_ms").get<std::int64_t>();
    options.vp = parse_rational(opts.at("vp").get<std::string>());
    options.el_share = parse_rational(opts.at("el_share").get<std::string>());
    options.base_apr = parse_rational(opts.at("base_apr").get<std::string>());
    options.base_fee = WeiAmount::parse(opts.at("base_fee_wei").get<std::string>());
    options.mev_ecdf = manifest_path_opt(inputs, "mev_ecdf");
    options.pilot_ecdf = manifest_path_opt(inputs, "pilot_ecdf");
    if (opts.contains("pilot_delay_ms"))
      options.pilot_delay_ms = opts.at("pilot_delay_ms").get<std::int64_t>();
    options.profile = manifest_path_opt(inputs, "profile");
    options.bins = opts.at("bins").get<std::int64_t>();
    options.out_dir = out_dir;
    return cmd_simulate(options);
  }
  throw std::invalid_argument("manifest carries unknown command: " + command);
}

}  // namespace mevsim::report
