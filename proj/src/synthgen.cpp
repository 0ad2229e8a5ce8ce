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

#include "memtrace/synthgen.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <unordered_map>
#include <vector>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

class Emitter {
 public:
  explicit Emitter(std::uint64_t bytes_per_us) : bytes_per_us_(bytes_per_us) {}

  std::uint64_t alloc(std::string name, std::uint64_t size, ContentClass cls) {
    const auto id = next_block_++;
    blocks_.emplace(id, ManifestBlock{std::move(name), cls, size, 0});
    emit(EventKind::Alloc, id);
    return id;
  }
  void read(std::uint64_t id) { access(EventKind::Read, id); }
  void write(std::uint64_t id) { access(EventKind::Write, id); }
  void free(std::uint64_t id) { emit(EventKind::Free, id); }

  void set_iteration(std::optional<std::uint64_t> it) { iteration_ = it; }
  std::size_t event_count() const { return events_.size(); }
  std::uint64_t next_block() const { return next_block_; }
  std::vector<MemoryEvent>& events() { return events_; }
  std::map<std::uint64_t, ManifestBlock>& blocks() { return blocks_; }

 private:
  void access(EventKind kind, std::uint64_t id) {
    blocks_.at(id).accesses += 1;
    emit(kind, id);
  }
  void emit(EventKind kind, std::uint64_t id) {
    const auto& b = blocks_.at(id);
    MemoryEvent e;
    e.seq = events_.size();
    e.timestamp_us = clock_;
    e.kind = kind;
    e.block_id = id;
    e.size_bytes = b.size_bytes;
    e.content_class = b.content_class;
    e.iteration_hint = iteration_;
    events_.push_back(e);
    clock_ += (b.size_bytes + bytes_per_us_ - 1) / bytes_per_us_;
  }

  std::uint64_t bytes_per_us_;
  std::uint64_t clock_ = 0;
  std::uint64_t next_block_ = 1;
  std::optional<std::uint64_t> iteration_;
  std::vector<MemoryEvent> events_;
  std::map<std::uint64_t, ManifestBlock> blocks_;
};

// Walks the event stream once, in order, and records the state after the
// last event of each timestamp.
void tally_peak(const std::vector<MemoryEvent>& events, Manifest& m) {
  std::array<std::uint64_t, kNumClasses> live{};
  std::uint64_t total = 0;
  m.peak_bytes = 0;
  m.peak_timestamp_us = 0;
  m.class_bytes_at_peak = {};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.kind == EventKind::Alloc) {
      live[class_index(e.content_class)] += e.size_bytes;
      total += e.size_bytes;
    } else if (e.kind == EventKind::Free) {
      live[class_index(e.content_class)] -= e.size_bytes;
      total -= e.size_bytes;
    }
    const bool last_at_stamp = i + 1 == events.size() || events[i + 1].timestamp_us != e.timestamp_us;
    if (last_at_stamp && total > m.peak_bytes) {
      m.peak_bytes = total;
      m.peak_timestamp_us = e.timestamp_us;
      m.class_bytes_at_peak = live;
    }
  }
}

struct Generated {
  std::vector<MemoryEvent> events;
  Manifest manifest;
  std::uint64_t next_block = 1;
};

Generated generate_events(const MlpConfig& c) {
  c.check();
  const auto e = c.element_bytes;
  const auto B = c.batch;
  constexpr auto PARAM = ContentClass::Parameter;
  constexpr auto INTER = ContentClass::Intermediate;

  Emitter em(c.bytes_per_us);

  const auto w0 = em.alloc("W0", c.d_in * c.d_hidden * e, PARAM);
  em.write(w0);
  const auto b0 = em.alloc("b0", c.d_hidden * e, PARAM);
  em.write(b0);
  const auto w1 = em.alloc("W1", c.d_hidden * c.d_out * e, PARAM);
  em.write(w1);
  const auto b1 = em.alloc("b1", c.d_out * e, PARAM);
  em.write(b1);
  const auto dw0 = em.alloc("dW0", c.d_in * c.d_hidden * e, INTER);
  const auto db0 = em.alloc("db0", c.d_hidden * e, INTER);
  const auto dw1 = em.alloc("dW1", c.d_hidden * c.d_out * e, INTER);
  const auto db1 = em.alloc("db1", c.d_out * e, INTER);
  const auto warmup = em.event_count();

  const auto hidden = B * c.d_hidden * e;
  const auto out = B * c.d_out * e;

  for (std::uint64_t it = 0; it < c.iterations; ++it) {
    em.set_iteration(it);
    const auto sfx = "@" + std::to_string(it);

    const auto x = em.alloc("X" + sfx, B * c.d_in * e, ContentClass::Input);
    em.write(x);
    // Forward.
    const auto h0 = em.alloc("H0" + sfx, hidden, INTER);  // X * W0
    em.read(x), em.read(w0), em.write(h0);
    const auto h1 = em.alloc("H1" + sfx, hidden, INTER);  // + b0
    em.read(h0), em.read(b0), em.write(h1);
    const auto a = em.alloc("A" + sfx, hidden, INTER);  // ReLU
    em.read(h1), em.write(a);
    const auto o0 = em.alloc("O0" + sfx, out, INTER);  // A * W1
    em.read(a), em.read(w1), em.write(o0);
    const auto o1 = em.alloc("O1" + sfx, out, INTER);  // + b1
    em.read(o0), em.read(b1), em.write(o1);
    // Loss gradient.
    const auto d_o1 = em.alloc("dO1" + sfx, out, INTER);
    em.read(o1), em.write(d_o1);
    em.free(o1);
    // Backward of + b1.
    const auto d_o0 = em.alloc("dO0" + sfx, out, INTER);
    em.read(d_o1), em.write(d_o0), em.write(db1);
    em.free(d_o1);
    em.free(o0);
    // Backward of A * W1.
    const auto d_a = em.alloc("dA" + sfx, hidden, INTER);
    em.read(d_o0), em.read(w1), em.write(d_a), em.read(a), em.write(dw1);
    em.free(d_o0);
    // Backward of ReLU.
    const auto d_h1 = em.alloc("dH1" + sfx, hidden, INTER);
    em.read(d_a), em.read(h1), em.write(d_h1);
    em.free(d_a);
    em.free(a);
    // Backward of + b0.
    const auto d_h0 = em.alloc("dH0" + sfx, hidden, INTER);
    em.read(d_h1), em.write(d_h0), em.write(db0);
    em.free(d_h1);
    em.free(h1);
    // Backward of X * W0; no input gradient is needed.
    em.read(d_h0), em.read(x), em.write(dw0);
    em.free(d_h0);
    em.free(h0);
    em.free(x);
    // SGD step.
    for (auto [param, grad] : {std::pair{w0, dw0}, {b0, db0}, {w1, dw1}, {b1, db1}}) {
      em.read(grad), em.read(param), em.write(param);
    }
  }

  Generated g;
  g.manifest.warmup_events = warmup;
  g.manifest.iterations = c.iterations;
  g.manifest.events_per_iteration = (em.event_count() - warmup) / c.iterations;
  g.manifest.parameter_bytes = c.parameter_bytes();
  g.manifest.blocks = std::move(em.blocks());
  g.next_block = em.next_block();
  g.events = std::move(em.events());
  return g;
}

TraceMeta meta_for(const MlpConfig& c) {
  return {{"source", "memtrace-synthgen"},
          {"model", "mlp"},
          {"clock_resolution", "1us"},
          {"batch", std::to_string(c.batch)},
          {"iterations", std::to_string(c.iterations)},
          {"shape", std::to_string(c.d_in) + "x" + std::to_string(c.d_hidden) + "x" + std::to_string(c.d_out)},
          {"element_bytes", std::to_string(c.element_bytes)},
          {"bytes_per_us", std::to_string(c.bytes_per_us)}};
}

GeneratedTrace finish(Generated g, TraceMeta meta) {
  g.manifest.total_events = g.events.size();
  tally_peak(g.events, g.manifest);
  return {Trace(std::move(g.events), std::move(meta)), std::move(g.manifest)};
}

std::uint64_t parse_u64_field(std::string_view s, const std::string& what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw Error("manifest: bad " + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

void MlpConfig::check() const {
  const std::pair<const char*, std::uint64_t> fields[] = {
      {"d_in", d_in},   {"d_hidden", d_hidden},           {"d_out", d_out},          {"batch", batch},
      {"iterations", iterations}, {"element_bytes", element_bytes}, {"bytes_per_us", bytes_per_us}};
  for (const auto& [name, v] : fields)
    if (v == 0) throw ConfigError(std::string(name) + " must be positive");
}

std::uint64_t MlpConfig::parameter_bytes() const {
  return (d_in * d_hidden + d_hidden + d_hidden * d_out + d_out) * element_bytes;
}

GeneratedTrace generate_mlp(const MlpConfig& config) {
  return finish(generate_events(config), meta_for(config));
}

GeneratedTrace plant_outlier(const MlpConfig& config, std::uint64_t size_bytes, std::uint64_t idle_us) {
  if (size_bytes == 0) throw ConfigError("outlier size must be positive");
  if (idle_us == 0) throw ConfigError("outlier idle time must be positive");
  auto g = generate_events(config);

  Manifest base;
  tally_peak(g.events, base);
  // Centre the gap on the base peak: write <= peak < write + idle.
  const auto t_write = base.peak_timestamp_us - std::min(base.peak_timestamp_us, (idle_us - 1) / 2);
  const auto t_read = t_write + idle_us;

  const auto id = g.next_block;
  g.manifest.blocks.emplace(id, ManifestBlock{"outlier", ContentClass::Intermediate, size_bytes, 2});
  g.manifest.planted_block_id = id;

  auto planted = [&](EventKind kind, std::uint64_t t) {
    MemoryEvent e;
    e.timestamp_us = t;
    e.kind = kind;
    e.block_id = id;
    e.size_bytes = size_bytes;
    e.content_class = ContentClass::Intermediate;
    return e;
  };
  auto after_stamp = [&](std::uint64_t t) {
    return std::upper_bound(g.events.begin(), g.events.end(), t,
                            [](std::uint64_t v, const MemoryEvent& e) { return v < e.timestamp_us; });
  };
  auto pos = after_stamp(t_read);
  pos = g.events.insert(pos, {planted(EventKind::Read, t_read), planted(EventKind::Free, t_read)});
  pos = after_stamp(t_write);
  g.events.insert(pos, {planted(EventKind::Alloc, t_write), planted(EventKind::Write, t_write)});
  for (std::size_t i = 0; i < g.events.size(); ++i) g.events[i].seq = i;

  auto meta = meta_for(config);
  meta.set("planted_outlier", std::to_string(size_bytes) + "B/" + std::to_string(idle_us) + "us");
  return finish(std::move(g), std::move(meta));
}

std::string write_manifest(const Manifest& m) {
  std::ostringstream out;
  out << "warmup_events=" << m.warmup_events << '\n'
      << "events_per_iteration=" << m.events_per_iteration << '\n'
      << "iterations=" << m.iterations << '\n'
      << "total_events=" << m.total_events << '\n'
      << "peak_bytes=" << m.peak_bytes << '\n'
      << "peak_timestamp_us=" << m.peak_timestamp_us << '\n';
  for (auto c : kAllClasses) out << "peak_bytes_" << to_string(c) << '=' << m.class_bytes_at_peak[class_index(c)] << '\n';
  out << "parameter_bytes=" << m.parameter_bytes << '\n';
  if (m.planted_block_id) out << "planted_block_id=" << *m.planted_block_id << '\n';
  out << "\nblock_id,name,class,size_bytes,accesses\n";
  for (const auto& [id, b] : m.blocks)
    out << id << ',' << b.name << ',' << to_string(b.content_class) << ',' << b.size_bytes << ',' << b.accesses << '\n';
  return out.str();
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  bool in_table = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (!in_table) {
      if (line.rfind("block_id,", 0) == 0) {
        in_table = true;
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw Error("manifest: expected key=value, got '" + line + "'");
      const auto key = line.substr(0, eq);
      const auto v = parse_u64_field(std::string_view(line).substr(eq + 1), key);
      if (key == "warmup_events") m.warmup_events = v;
      else if (key == "events_per_iteration") m.events_per_iteration = v;
      else if (key == "iterations") m.iterations = v;
      else if (key == "total_events") m.total_events = v;
      else if (key == "peak_bytes") m.peak_bytes = v;
      else if (key == "peak_timestamp_us") m.peak_timestamp_us = v;
      else if (key == "parameter_bytes") m.parameter_bytes = v;
      else if (key == "planted_block_id") m.planted_block_id = v;
      else if (key.rfind("peak_bytes_", 0) == 0) {
        auto cls = parse_class(std::string_view(key).substr(11));
        if (!cls) throw Error("manifest: unknown class in '" + key + "'");
        m.class_bytes_at_peak[class_index(*cls)] = v;
      } else {
        throw Error("manifest: unknown key '" + key + "'");
      }
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (auto comma = rest.find(','); comma != std::string_view::npos; comma = rest.find(',')) {
      f.push_back(rest.substr(0, comma));
      rest.remove_prefix(comma + 1);
    }
    f.push_back(rest);
    if (f.size() != 5) throw Error("manifest: bad block row '" + line + "'");
    auto cls = parse_class(f[2]);
    if (!cls) throw Error("manifest: bad class in '" + line + "'");
    m.blocks.emplace(parse_u64_field(f[0], "block_id"),
                     ManifestBlock{std::string(f[1]), *cls, parse_u64_field(f[3], "size_bytes"),
                                   parse_u64_field(f[4], "accesses")});
  }
  return m;
}

std::string manifest_path_for(const std::string& trace_path) {
  const auto slash = trace_path.find_last_of('/');
  const auto dot = trace_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return trace_path + ".manifest";
  return trace_path.substr(0, dot) + ".manifest";
}

}  // namespace memtrace
