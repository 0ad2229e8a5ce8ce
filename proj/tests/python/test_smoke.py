# Copyright 2026 The memtrace Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import pytest

import memtrace


def test_parse_write_round_trip():
    text = "# device=cpu\n0,0,A,1,1024,4096,PARAM,\n1,3,W,1,1024,4096,PARAM,0\n"
    trace = memtrace.parse_trace(text)
    assert len(trace) == 2
    assert trace.meta == {"device": "cpu"}
    assert trace.events[1].kind == "W"
    assert trace.events[0].iteration_hint is None
    assert memtrace.write_trace(trace) == text


def test_errors_are_typed():
    with pytest.raises(memtrace.EmptyTrace):
        memtrace.parse_trace("# device=cpu\n")
    with pytest.raises(memtrace.ValidationError):
        memtrace.parse_trace("0,0,A,1,8,,IN,\n1,1,F,2,8,,IN,\n")
    with pytest.raises(memtrace.MemtraceError):
        memtrace.percentile([1, 2], 0.0)


def test_generated_trace_analysis():
    config = memtrace.MlpConfig()
    config.iterations = 3
    trace, manifest = memtrace.generate_mlp(config)
    assert config.parameter_bytes() == 245768
    assert len(trace) == manifest.total_events

    index = memtrace.build_block_index(trace)
    peak = memtrace.peak_memory(index)
    assert peak.bytes == manifest.peak_bytes
    assert memtrace.breakdown_at_peak(index)["bytes"] == manifest.class_bytes_at_peak

    it = memtrace.detect_iterations(trace)
    assert (it.period_len, it.iteration_count) == (manifest.events_per_iteration, 3)

    population = memtrace.ati_population(index)
    summary = memtrace.summarize(population)
    assert summary.count == len(population)
    assert sum(b.count for b in summary.histogram) == summary.count
    assert memtrace.ecdf(population)[-1].fraction == 1.0
    assert len(memtrace.gantt_layout(index).rows) == len(index.blocks)


def test_swap_model():
    assert memtrace.max_swap_size(25) / 1e3 == pytest.approx(79.37, abs=0.01)
    assert memtrace.min_hiding_interval(1_200_000_000) == 377977

    trace, manifest = memtrace.plant_outlier(memtrace.MlpConfig(), 1_200_000_000, 840211)
    plan = memtrace.swap_plan(memtrace.build_block_index(trace))
    assert plan.ranked[0].block_id == manifest.planted_block_id
    assert plan.ranked[0].feasible


def test_cli_in_process(tmp_path):
    out = tmp_path / "t.memtrace"
    code, stdout, _ = memtrace.run_cli(["generate", "--out", str(out), "--iterations", "2", "--batch", "8"])
    assert code == 0 and "wrote" in stdout
    assert memtrace.read_trace(str(out)) == memtrace.read_trace(str(out))
    code, _, err = memtrace.run_cli(["analyze", str(tmp_path / "missing.memtrace")])
    assert code == 2 and "missing.memtrace" in err
