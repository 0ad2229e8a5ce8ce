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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "memtrace/breakdown.hpp"
#include "memtrace/cli.hpp"
#include "memtrace/error.hpp"
#include "memtrace/lifetime.hpp"
#include "memtrace/patterns.hpp"
#include "memtrace/stats.hpp"
#include "memtrace/swap.hpp"
#include "memtrace/synthgen.hpp"

namespace py = pybind11;
using namespace memtrace;

namespace {

py::dict meta_dict(const TraceMeta& meta) {
  py::dict d;
  for (const auto& [k, v] : meta) d[py::str(k)] = v;
  return d;
}

py::dict class_bytes(const std::array<std::uint64_t, kNumClasses>& bytes) {
  py::dict d;
  for (auto c : kAllClasses) d[py::str(std::string(to_string(c)))] = bytes[class_index(c)];
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Device-memory trace analysis: lifetimes, ATIs, iterations, swap planning, breakdowns.";

  auto base = py::register_exception<Error>(m, "MemtraceError");
  py::register_exception<SyntaxError>(m, "SyntaxError", base.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<EmptyTrace>(m, "EmptyTrace", base.ptr());
  py::register_exception<EmptyInput>(m, "EmptyInput", base.ptr());
  py::register_exception<InvalidP>(m, "InvalidP", base.ptr());
  py::register_exception<MixedAddressing>(m, "MixedAddressing", base.ptr());
  py::register_exception<NoPeriodFound>(m, "NoPeriodFound", base.ptr());
  py::register_exception<NoLiveBlocks>(m, "NoLiveBlocks", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<MemoryEvent>(m, "MemoryEvent")
      .def_readonly("seq", &MemoryEvent::seq)
      .def_readonly("timestamp_us", &MemoryEvent::timestamp_us)
      .def_property_readonly("kind", [](const MemoryEvent& e) { return std::string(to_string(e.kind)); })
      .def_readonly("block_id", &MemoryEvent::block_id)
      .def_readonly("size_bytes", &MemoryEvent::size_bytes)
      .def_readonly("address", &MemoryEvent::address)
      .def_property_readonly("content_class",
                             [](const MemoryEvent& e) { return std::string(to_string(e.content_class)); })
      .def_readonly("iteration_hint", &MemoryEvent::iteration_hint)
      .def("__repr__", [](const MemoryEvent& e) { return "<MemoryEvent " + format_event(e) + ">"; });

  py::class_<Trace>(m, "Trace")
      .def_property_readonly("events", &Trace::events)
      .def_property_readonly("meta", [](const Trace& t) { return meta_dict(t.meta()); })
      .def("__len__", &Trace::size)
      .def("__eq__", [](const Trace& a, const Trace& b) { return a == b; });

  m.def("parse_trace", [](const std::string& text) { return parse_trace(text); }, py::arg("text"));
  m.def("read_trace", &read_trace_file, py::arg("path"));
  m.def("write_trace", [](const Trace& t) { return write_trace(t); }, py::arg("trace"));
  m.def("write_trace_file", &write_trace_file, py::arg("trace"), py::arg("path"));

  py::class_<BlockRecord>(m, "BlockRecord")
      .def_readonly("block_id", &BlockRecord::block_id)
      .def_readonly("size_bytes", &BlockRecord::size_bytes)
      .def_property_readonly("content_class",
                             [](const BlockRecord& b) { return std::string(to_string(b.content_class)); })
      .def_readonly("alloc_us", &BlockRecord::alloc_us)
      .def_readonly("free_us", &BlockRecord::free_us)
      .def_readonly("access_us", &BlockRecord::access_us)
      .def_readonly("address", &BlockRecord::address)
      .def_property_readonly("leaked", &BlockRecord::leaked);

  py::class_<BlockIndex>(m, "BlockIndex")
      .def_readonly("blocks", &BlockIndex::blocks)
      .def_readonly("end_us", &BlockIndex::end_us)
      .def_readonly("event_count", &BlockIndex::event_count);
  m.def("build_block_index", &build_block_index, py::arg("trace"));

  m.def(
      "compute_atis",
      [](const BlockIndex& index, bool include_boundary_gaps) {
        std::map<std::uint64_t, std::vector<std::uint64_t>> out;
        for (const auto& [id, s] : compute_atis(index, AtiOptions{include_boundary_gaps})) out[id] = s.intervals_us;
        return out;
      },
      py::arg("index"), py::arg("include_boundary_gaps") = false,
      "Per-block access time intervals in us, keyed by block id.");
  m.def(
      "ati_population",
      [](const BlockIndex& index, bool include_boundary_gaps) {
        return ati_population(compute_atis(index, AtiOptions{include_boundary_gaps}));
      },
      py::arg("index"), py::arg("include_boundary_gaps") = false);

  py::class_<TimelinePoint>(m, "TimelinePoint")
      .def_readonly("timestamp_us", &TimelinePoint::timestamp_us)
      .def_readonly("live_bytes", &TimelinePoint::live_bytes)
      .def_readonly("live_blocks", &TimelinePoint::live_blocks);
  py::class_<Peak>(m, "Peak").def_readonly("bytes", &Peak::bytes).def_readonly("timestamp_us", &Peak::timestamp_us);
  m.def("memory_timeline", &memory_timeline, py::arg("index"));
  m.def("peak_memory", py::overload_cast<const BlockIndex&>(&peak_memory), py::arg("index"));

  py::class_<GanttRow>(m, "GanttRow")
      .def_readonly("block_id", &GanttRow::block_id)
      .def_readonly("start_us", &GanttRow::start_us)
      .def_readonly("end_us", &GanttRow::end_us)
      .def_readonly("size_bytes", &GanttRow::size_bytes)
      .def_readonly("y_offset_bytes", &GanttRow::y_offset_bytes)
      .def_readonly("leaked", &GanttRow::leaked);
  py::class_<GanttLayout>(m, "GanttLayout")
      .def_readonly("rows", &GanttLayout::rows)
      .def_readonly("synthetic", &GanttLayout::synthetic);
  m.def("gantt_layout", &gantt_layout, py::arg("index"));

  py::class_<EcdfPoint>(m, "EcdfPoint")
      .def_readonly("value", &EcdfPoint::value)
      .def_readonly("cumulative_count", &EcdfPoint::cumulative_count)
      .def_readonly("fraction", &EcdfPoint::fraction);
  py::class_<HistogramBin>(m, "HistogramBin")
      .def_readonly("lo_us", &HistogramBin::lo_us)
      .def_readonly("hi_us", &HistogramBin::hi_us)
      .def_readonly("count", &HistogramBin::count);
  py::class_<DistributionSummary>(m, "DistributionSummary")
      .def_readonly("count", &DistributionSummary::count)
      .def_readonly("min_us", &DistributionSummary::min_us)
      .def_readonly("q1_us", &DistributionSummary::q1_us)
      .def_readonly("median_us", &DistributionSummary::median_us)
      .def_readonly("q3_us", &DistributionSummary::q3_us)
      .def_readonly("max_us", &DistributionSummary::max_us)
      .def_property_readonly("mean_us", &DistributionSummary::mean_us)
      .def_readonly("histogram", &DistributionSummary::histogram);
  m.def("ecdf", [](const std::vector<std::uint64_t>& v) { return ecdf(v); }, py::arg("values"));
  m.def("percentile", [](const std::vector<std::uint64_t>& v, double p) { return percentile(v, p); },
        py::arg("values"), py::arg("p"));
  m.def("summarize", [](const std::vector<std::uint64_t>& v) { return summarize(v); }, py::arg("values"));

  py::class_<IterationStructure>(m, "IterationStructure")
      .def_readonly("warmup_len", &IterationStructure::warmup_len)
      .def_readonly("period_len", &IterationStructure::period_len)
      .def_readonly("iteration_count", &IterationStructure::iteration_count)
      .def_readonly("boundaries", &IterationStructure::boundaries);
  m.def("detect_iterations", py::overload_cast<const Trace&, std::optional<std::size_t>>(&detect_iterations),
        py::arg("trace"), py::arg("max_warmup") = py::none());

  m.def(
      "max_swap_size",
      [](std::uint64_t gap_us, double b_d2h, double b_h2d) { return max_swap_size(gap_us, {b_d2h, b_h2d}); },
      py::arg("gap_us"), py::arg("b_d2h") = BandwidthConfig{}.b_d2h, py::arg("b_h2d") = BandwidthConfig{}.b_h2d,
      "Largest block (bytes) that can go to host and back within gap_us.");
  m.def(
      "min_hiding_interval",
      [](std::uint64_t size, double b_d2h, double b_h2d) { return min_hiding_interval(size, {b_d2h, b_h2d}); },
      py::arg("size_bytes"), py::arg("b_d2h") = BandwidthConfig{}.b_d2h,
      py::arg("b_h2d") = BandwidthConfig{}.b_h2d);

  py::class_<SwapCandidate>(m, "SwapCandidate")
      .def_readonly("block_id", &SwapCandidate::block_id)
      .def_readonly("size_bytes", &SwapCandidate::size_bytes)
      .def_readonly("gap_start_us", &SwapCandidate::gap_start_us)
      .def_readonly("gap_us", &SwapCandidate::gap_us)
      .def_readonly("max_swap_bytes", &SwapCandidate::max_swap_bytes)
      .def_readonly("feasible", &SwapCandidate::feasible)
      .def_readonly("margin_bytes", &SwapCandidate::margin_bytes)
      .def_readonly("overlaps_peak", &SwapCandidate::overlaps_peak);
  py::class_<SwapPlan>(m, "SwapPlan")
      .def_readonly("ranked", &SwapPlan::ranked)
      .def_readonly("estimated_savings_bytes", &SwapPlan::estimated_savings_bytes);
  m.def(
      "swap_plan",
      [](const BlockIndex& index, double b_d2h, double b_h2d) {
        return rank_candidates(find_candidates(index, compute_atis(index), {b_d2h, b_h2d}));
      },
      py::arg("index"), py::arg("b_d2h") = BandwidthConfig{}.b_d2h, py::arg("b_h2d") = BandwidthConfig{}.b_h2d);

  m.def(
      "breakdown_at_peak",
      [](const BlockIndex& index) {
        const auto r = breakdown_at_peak(index);
        py::dict d;
        d["timestamp_us"] = r.at_timestamp_us;
        d["total_bytes"] = r.total_bytes;
        d["bytes"] = class_bytes(r.bytes_per_class);
        return d;
      },
      py::arg("index"));

  py::class_<MlpConfig>(m, "MlpConfig")
      .def(py::init<>())
      .def_readwrite("d_in", &MlpConfig::d_in)
      .def_readwrite("d_hidden", &MlpConfig::d_hidden)
      .def_readwrite("d_out", &MlpConfig::d_out)
      .def_readwrite("batch", &MlpConfig::batch)
      .def_readwrite("iterations", &MlpConfig::iterations)
      .def_readwrite("element_bytes", &MlpConfig::element_bytes)
      .def_readwrite("bytes_per_us", &MlpConfig::bytes_per_us)
      .def("parameter_bytes", &MlpConfig::parameter_bytes);
  py::class_<Manifest>(m, "Manifest")
      .def_readonly("warmup_events", &Manifest::warmup_events)
      .def_readonly("events_per_iteration", &Manifest::events_per_iteration)
      .def_readonly("iterations", &Manifest::iterations)
      .def_readonly("total_events", &Manifest::total_events)
      .def_readonly("peak_bytes", &Manifest::peak_bytes)
      .def_readonly("peak_timestamp_us", &Manifest::peak_timestamp_us)
      .def_property_readonly("class_bytes_at_peak", [](const Manifest& mf) { return class_bytes(mf.class_bytes_at_peak); })
      .def_readonly("parameter_bytes", &Manifest::parameter_bytes)
      .def_readonly("planted_block_id", &Manifest::planted_block_id)
      .def("to_text", [](const Manifest& mf) { return write_manifest(mf); });
  m.def(
      "generate_mlp", [](const MlpConfig& c) { auto g = generate_mlp(c); return py::make_tuple(g.trace, g.manifest); },
      py::arg("config") = MlpConfig{}, "Returns (trace, manifest).");
  m.def(
      "plant_outlier",
      [](const MlpConfig& c, std::uint64_t size, std::uint64_t idle) {
        auto g = plant_outlier(c, size, idle);
        return py::make_tuple(g.trace, g.manifest);
      },
      py::arg("config"), py::arg("size_bytes"), py::arg("idle_us"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
