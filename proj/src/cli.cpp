// Copyright 2026 The memtrace Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "memtrace/cli.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "memtrace/breakdown.hpp"
#include "memtrace/error.hpp"
#include "memtrace/patterns.hpp"
#include "memtrace/stats.hpp"
#include "memtrace/synthgen.hpp"

namespace memtrace {

namespace fs = std::filesystem;

namespace {

class FileSink {
 public:
  explicit FileSink(const fs::path& path) : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error("cannot write '" + path.string() + "'");
  }
  std::ostream& stream() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw Error("write failed for '" + path_.string() + "'");
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::size_t write_table_file(const fs::path& dir, const std::string& stem, const Table& table, TableFormat format,
                             ReportBundle& bundle) {
  const auto name = stem + table_extension(format);
  FileSink sink(dir / name);
  write_table(table, format, sink.stream());
  sink.close();
  bundle.files.push_back({name, table.rows.size()});
  return table.rows.size();
}

std::string share_text(double share) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", share);
  return buf;
}

Trace load_trace(const std::string& path) {
  try {
    return read_trace_file(path);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

TimeWindow parse_window(const std::string& text) {
  const auto colon = text.find(':');
  auto num = [&](std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
      throw ConfigError("bad --peak-window '" + text + "' (expected LO:HI in us)");
    return v;
  };
  if (colon == std::string::npos) {
    const auto t = num(text);
    return {t, t};
  }
  TimeWindow w{num(std::string_view(text).substr(0, colon)), num(std::string_view(text).substr(colon + 1))};
  if (w.lo_us > w.hi_us) throw ConfigError("--peak-window LO must not exceed HI");
  return w;
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& out_path, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  if (out_path.empty()) {
    body(out);
    return;
  }
  FileSink sink(out_path);
  body(sink.stream());
  sink.close();
}

}  // namespace

ReportBundle write_report_bundle(const Trace& trace, const AnalyzeOptions& opts, const std::string& output_dir) {
  opts.bandwidth.check();
  const fs::path dir(output_dir);
  fs::create_directories(dir);
  ReportBundle bundle{output_dir, {}};
  const auto fmt = opts.format;

  const auto index = build_block_index(trace);
  const auto atis = compute_atis(index, opts.ati);
  const auto population = ati_population(atis);
  const auto timeline = memory_timeline(index);
  const auto peak = peak_memory(timeline);

  std::ostringstream summary;
  summary << "memtrace analysis report\n"
          << "trace=" << opts.trace_label << '\n'
          << "events=" << trace.size() << '\n'
          << "blocks=" << index.blocks.size() << '\n';
  std::size_t leaked = 0;
  for (const auto& [id, b] : index.blocks) leaked += b.leaked() ? 1 : 0;
  summary << "leaked_blocks=" << leaked << '\n'
          << "peak_bytes=" << peak.bytes << '\n'
          << "peak_timestamp_us=" << peak.timestamp_us << '\n';

  // Gantt + timeline with fragmentation.
  std::vector<FragmentPoint> fragments;
  try {
    const auto layout = gantt_layout(index);
    fragments = fragmentation_timeline(layout.rows, index);
    summary << "layout=" << (layout.synthetic ? "synthetic layout (first-fit)" : "device addresses") << '\n';
    write_table_file(dir, "gantt", gantt_table(layout), fmt, bundle);
  } catch (const MixedAddressing& e) {
    summary << "layout=unavailable (" << e.what() << ")\n";
    write_table_file(dir, "gantt", gantt_table({}), fmt, bundle);
  }
  if (!fragments.empty()) {
    std::uint64_t max_frag = 0;
    for (const auto& f : fragments) max_frag = std::max(max_frag, f.fragment_bytes);
    summary << "max_fragment_bytes=" << max_frag << '\n';
  }
  write_table_file(dir, "timeline", timeline_table(timeline, fragments), fmt, bundle);

  // ATIs.
  summary << "ati_mode=" << (opts.ati.include_boundary_gaps ? "accesses+alloc/free" : "accesses only") << '\n'
          << "ati_count=" << population.size() << '\n';
  write_table_file(dir, "ati", ati_table(index, atis), fmt, bundle);
  if (!population.empty()) {
    const auto s = summarize(population);
    summary << "ati_min_us=" << s.min_us << '\n'
            << "ati_median_us=" << s.median_us << '\n'
            << "ati_p90_us=" << percentile(population, 0.9) << '\n'
            << "ati_max_us=" << s.max_us << '\n'
            << "ati_mean_us=" << format_double(s.mean_us()) << '\n';
    write_table_file(dir, "ati_cdf", ecdf_table(ecdf(population)), fmt, bundle);
    write_table_file(dir, "ati_summary", summary_table(s), fmt, bundle);
    write_table_file(dir, "ati_histogram", histogram_table(s), fmt, bundle);
  } else {
    write_table_file(dir, "ati_cdf", ecdf_table({}), fmt, bundle);
    write_table_file(dir, "ati_summary", Table{summary_table({}).columns, {}}, fmt, bundle);
    write_table_file(dir, "ati_histogram", histogram_table({}), fmt, bundle);
  }

  // Iterations.
  {
    std::optional<IterationStructure> structure;
    std::optional<StabilityReport> stability;
    try {
      structure = detect_iterations(trace, opts.max_warmup);
      stability = iteration_stability(*structure, index);
      summary << "iterations=" << structure->iteration_count << '\n'
              << "iteration_period_events=" << structure->period_len << '\n'
              << "iteration_warmup_events=" << structure->warmup_len << '\n'
              << "iterations_stable=" << (stability->stable ? "true" : "false") << '\n';
    } catch (const NoPeriodFound&) {
      summary << "iterations=none (no repeating period)\n";
    }
    const auto name = std::string("iterations") + (fmt == TableFormat::Csv ? ".txt" : ".jsonl");
    FileSink sink(dir / name);
    const auto rows = write_iteration_report(structure ? &*structure : nullptr, stability ? &*stability : nullptr,
                                             fmt, sink.stream());
    sink.close();
    bundle.files.push_back({name, rows});
  }

  // Swap plan.
  {
    const auto plan = rank_candidates(find_candidates(index, atis, opts.bandwidth, opts.peak_window));
    std::size_t feasible = 0;
    for (const auto& c : plan.ranked) feasible += c.feasible ? 1 : 0;
    summary << "b_d2h_bytes_per_s=" << format_double(opts.bandwidth.b_d2h) << '\n'
            << "b_h2d_bytes_per_s=" << format_double(opts.bandwidth.b_h2d) << '\n'
            << "swap_candidates=" << plan.ranked.size() << '\n'
            << "swap_feasible=" << feasible << '\n'
            << "swap_estimated_savings_bytes=" << plan.estimated_savings_bytes << '\n';
    if (!plan.ranked.empty() && plan.ranked.front().feasible) {
      const auto& top = plan.ranked.front();
      summary << "swap_top_candidate=block " << top.block_id << ", " << top.size_bytes << " B, gap " << top.gap_us
              << " us, margin " << top.margin_bytes << " B\n";
    }
    write_table_file(dir, "swap_candidates", swap_table(plan), fmt, bundle);
  }

  // Breakdown at peak.
  {
    std::vector<SweepRow> rows;
    if (peak.bytes > 0) {
      rows.push_back({opts.trace_label, breakdown_at(index, peak.timestamp_us)});
      for (auto c : kAllClasses) {
        summary << "peak_" << to_string(c) << "_bytes=" << rows.front().report.bytes(c) << " (share "
                << share_text(rows.front().report.share(c)) << ")\n";
      }
    }
    write_table_file(dir, "breakdown", breakdown_table(rows), fmt, bundle);
  }

  summary << "files:\n";
  for (const auto& f : bundle.files) summary << "  " << f.name << " rows=" << f.rows << '\n';
  summary << "  summary.txt\n";

  FileSink sink(dir / "summary.txt");
  sink.stream() << summary.str();
  sink.close();
  bundle.files.push_back({"summary.txt", 0});
  return bundle;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Device-memory trace analyzer: lifetimes, ATIs, iterations, swap planning and breakdowns.",
               "memtrace"};
  app.require_subcommand(1);

  std::string format_name = "csv";
  std::string out_path;
  std::string config_path;
  std::optional<double> bw_d2h;
  std::optional<double> bw_h2d;
  bool boundary_gaps = false;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format_name, "Table format")->check(CLI::IsMember({"csv", "json-lines"}));
  };
  auto add_out = [&](CLI::App* sub, const char* help) { sub->add_option("--out", out_path, help); };
  auto add_bandwidth = [&](CLI::App* sub) {
    sub->add_option("--bw-d2h", bw_d2h, "Device-to-host bandwidth, bytes/s (default 6.4e9)");
    sub->add_option("--bw-h2d", bw_h2d, "Host-to-device bandwidth, bytes/s (default 6.3e9)");
    sub->add_option("--config", config_path, "key=value file with b_d2h_bytes_per_s / b_h2d_bytes_per_s");
  };
  auto add_gaps = [&](CLI::App* sub) {
    sub->add_flag("--include-boundary-gaps", boundary_gaps, "Count Alloc->first access and last access->Free gaps");
  };

  // generate
  MlpConfig mlp;
  std::optional<std::uint64_t> plant_size;
  std::optional<std::uint64_t> plant_idle;
  auto* gen = app.add_subcommand("generate", "Write a synthetic MLP training trace and its .manifest");
  gen->add_option("--out", out_path, "Trace file to write")->required();
  gen->add_option("--iterations", mlp.iterations, "Training iterations")->capture_default_str();
  gen->add_option("--batch", mlp.batch, "Batch size")->capture_default_str();
  gen->add_option("--d-in", mlp.d_in, "Input width")->capture_default_str();
  gen->add_option("--d-hidden", mlp.d_hidden, "Hidden width")->capture_default_str();
  gen->add_option("--d-out", mlp.d_out, "Output width")->capture_default_str();
  gen->add_option("--element-bytes", mlp.element_bytes, "Bytes per element")->capture_default_str();
  gen->add_option("--bytes-per-us", mlp.bytes_per_us, "Clock advance per event, bytes/us")->capture_default_str();
  auto* ps = gen->add_option("--plant-size", plant_size, "Plant an idle outlier block of this many bytes");
  auto* pi = gen->add_option("--plant-idle", plant_idle, "Idle gap of the planted block, us");
  ps->needs(pi);
  pi->needs(ps);

  // analyze
  std::string trace_path;
  std::optional<std::size_t> max_warmup;
  std::string peak_window;
  auto* analyze = app.add_subcommand("analyze", "Run every analysis and write a report bundle");
  analyze->add_option("trace", trace_path, "Trace file")->required();
  analyze->add_option("--out", out_path, "Report directory")->capture_default_str();
  analyze->add_option("--max-warmup", max_warmup, "Largest warm-up prefix, events (default: one period)");
  analyze->add_option("--peak-window", peak_window, "Peak window LO:HI in us (default: peak instant)");
  add_bandwidth(analyze);
  add_gaps(analyze);
  add_format(analyze);

  auto* ati = app.add_subcommand("ati", "Per-access ATI table (gap start, ATI, block size)");
  ati->add_option("trace", trace_path, "Trace file")->required();
  add_out(ati, "Output file (default: stdout)");
  add_gaps(ati);
  add_format(ati);

  auto* gantt = app.add_subcommand("gantt", "Gantt rows: lifetime and y offset per block");
  gantt->add_option("trace", trace_path, "Trace file")->required();
  add_out(gantt, "Output file (default: stdout)");
  add_format(gantt);

  auto* cdf = app.add_subcommand("cdf", "Empirical CDF of the ATI population");
  cdf->add_option("trace", trace_path, "Trace file")->required();
  add_out(cdf, "Output file (default: stdout)");
  add_gaps(cdf);
  add_format(cdf);

  auto* iters = app.add_subcommand("iterations", "Detect the iteration period and check per-iteration peaks");
  iters->add_option("trace", trace_path, "Trace file")->required();
  iters->add_option("--max-warmup", max_warmup, "Largest warm-up prefix, events (default: one period)");
  add_out(iters, "Output file (default: stdout)");
  add_format(iters);

  auto* swap = app.add_subcommand("swap-plan", "Rank blocks whose largest idle gap can hide a swap round trip");
  swap->add_option("trace", trace_path, "Trace file")->required();
  swap->add_option("--peak-window", peak_window, "Peak window LO:HI in us (default: peak instant)");
  add_out(swap, "Output file (default: stdout)");
  add_bandwidth(swap);
  add_gaps(swap);
  add_format(swap);

  std::vector<std::string> sweep_paths;
  std::optional<std::uint64_t> at_us;
  auto* breakdown = app.add_subcommand("breakdown", "Per-class footprint at peak; several traces form a sweep");
  breakdown->add_option("traces", sweep_paths, "Trace files (one row each, in order)")->required();
  breakdown->add_option("--at", at_us, "Evaluate at this timestamp instead of each trace's peak");
  add_out(breakdown, "Output file (default: stdout)");
  add_format(breakdown);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto format = format_name == "json-lines" ? TableFormat::JsonLines : TableFormat::Csv;
  auto bandwidth = [&] {
    BandwidthConfig bw;
    if (!config_path.empty()) bw = read_bandwidth_config(config_path, bw);
    if (bw_d2h) bw.b_d2h = *bw_d2h;
    if (bw_h2d) bw.b_h2d = *bw_h2d;
    bw.check();
    return bw;
  };

  try {
    if (gen->parsed()) {
      const auto g = plant_size ? plant_outlier(mlp, *plant_size, *plant_idle) : generate_mlp(mlp);
      write_trace_file(g.trace, out_path);
      const auto manifest_path = manifest_path_for(out_path);
      emit(manifest_path, out, [&](std::ostream& os) { os << write_manifest(g.manifest); });
      out << "wrote " << g.trace.size() << " events to " << out_path << " (manifest " << manifest_path << ")\n";
      return kExitOk;
    }
    if (analyze->parsed()) {
      AnalyzeOptions opts;
      opts.bandwidth = bandwidth();
      opts.ati.include_boundary_gaps = boundary_gaps;
      opts.format = format;
      opts.max_warmup = max_warmup;
      if (!peak_window.empty()) opts.peak_window = parse_window(peak_window);
      opts.trace_label = trace_path;
      if (out_path.empty()) out_path = "report";
      const auto trace = load_trace(trace_path);
      const auto bundle = write_report_bundle(trace, opts, out_path);
      out << "wrote " << bundle.files.size() << " files to " << bundle.output_dir << '\n';
      return kExitOk;
    }
    if (breakdown->parsed()) {
      std::vector<std::pair<std::string, Trace>> traces;
      for (const auto& p : sweep_paths) traces.emplace_back(p, load_trace(p));
      const auto rows = sweep_report(traces, at_us);
      emit(out_path, out, [&](std::ostream& os) { write_table(breakdown_table(rows), format, os); });
      return kExitOk;
    }

    const auto trace = load_trace(trace_path);
    const auto index = build_block_index(trace);
    if (ati->parsed() || cdf->parsed()) {
      const auto atis = compute_atis(index, AtiOptions{boundary_gaps});
      if (ati->parsed()) {
        emit(out_path, out, [&](std::ostream& os) { write_table(ati_table(index, atis), format, os); });
      } else {
        const auto population = ati_population(atis);
        const auto table = population.empty() ? ecdf_table({}) : ecdf_table(ecdf(population));
        emit(out_path, out, [&](std::ostream& os) { write_table(table, format, os); });
      }
    } else if (gantt->parsed()) {
      const auto layout = gantt_layout(index);
      emit(out_path, out, [&](std::ostream& os) { write_table(gantt_table(layout), format, os); });
    } else if (iters->parsed()) {
      const auto structure = detect_iterations(trace, max_warmup);
      const auto stability = iteration_stability(structure, index);
      emit(out_path, out, [&](std::ostream& os) { write_iteration_report(&structure, &stability, format, os); });
    } else if (swap->parsed()) {
      const auto bw = bandwidth();
      std::optional<TimeWindow> window;
      if (!peak_window.empty()) window = parse_window(peak_window);
      const auto plan = rank_candidates(find_candidates(index, compute_atis(index, AtiOptions{boundary_gaps}), bw, window));
      emit(out_path, out, [&](std::ostream& os) { write_table(swap_table(plan), format, os); });
      if (!out_path.empty()) out << "estimated_savings_bytes=" << plan.estimated_savings_bytes << '\n';
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "memtrace: error: " << e.what() << '\n';
    return kExitInput;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"memtrace"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace memtrace
