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

#include "memtrace/trace.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "memtrace/error.hpp"

namespace memtrace {

namespace {

constexpr std::size_t kFieldCount = 8;

struct BlockState {
  std::uint64_t size = 0;
  ContentClass cls = ContentClass::Unknown;
  std::optional<std::uint64_t> address;
  bool freed = false;
};

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void append_u64(std::string& out, std::uint64_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void check_meta(const TraceMeta& meta) {
  for (const auto& [key, value] : meta) {
    if (key.empty() || key.find_first_of("=\n\r") != std::string::npos)
      throw Error("invalid metadata key '" + key + "'");
    if (value.find_first_of("\n\r") != std::string::npos)
      throw Error("metadata value for '" + key + "' contains a line break");
  }
}

MemoryEvent parse_event_line(std::string_view line, std::size_t line_no) {
  std::array<std::string_view, kFieldCount> fields;
  std::size_t n = 0;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (n == kFieldCount) throw SyntaxError(line_no, "too many fields (expected 8)");
    if (comma == std::string_view::npos) {
      fields[n++] = line.substr(start);
      break;
    }
    fields[n++] = line.substr(start, comma - start);
    start = comma + 1;
  }
  if (n != kFieldCount)
    throw SyntaxError(line_no, "expected 8 fields, found " + std::to_string(n));

  auto required = [&](std::size_t i, const char* name) {
    auto v = parse_u64(fields[i]);
    if (!v) throw SyntaxError(line_no, std::string("bad ") + name + " '" + std::string(fields[i]) + "'");
    return *v;
  };
  auto optional = [&](std::size_t i, const char* name) -> std::optional<std::uint64_t> {
    if (fields[i].empty()) return std::nullopt;
    return required(i, name);
  };

  MemoryEvent e;
  e.seq = required(0, "seq");
  e.timestamp_us = required(1, "timestamp_us");
  auto kind = parse_kind(fields[2]);
  if (!kind) throw SyntaxError(line_no, "bad kind '" + std::string(fields[2]) + "'");
  e.kind = *kind;
  e.block_id = required(3, "block_id");
  e.size_bytes = required(4, "size_bytes");
  e.address = optional(5, "address");
  auto cls = parse_class(fields[6]);
  if (!cls) throw SyntaxError(line_no, "bad class '" + std::string(fields[6]) + "'");
  e.content_class = *cls;
  e.iteration_hint = optional(7, "iteration_hint");
  return e;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Alloc: return "A";
    case EventKind::Free: return "F";
    case EventKind::Read: return "R";
    case EventKind::Write: return "W";
  }
  return "?";
}

std::string_view to_string(ContentClass c) {
  switch (c) {
    case ContentClass::Input: return "IN";
    case ContentClass::Parameter: return "PARAM";
    case ContentClass::Intermediate: return "INTER";
    case ContentClass::Other: return "OTHER";
    case ContentClass::Unknown: return "UNK";
  }
  return "?";
}

std::optional<EventKind> parse_kind(std::string_view s) {
  if (s == "A") return EventKind::Alloc;
  if (s == "F") return EventKind::Free;
  if (s == "R") return EventKind::Read;
  if (s == "W") return EventKind::Write;
  return std::nullopt;
}

std::optional<ContentClass> parse_class(std::string_view s) {
  for (auto c : kAllClasses)
    if (to_string(c) == s) return c;
  return std::nullopt;
}

void validate(const std::vector<MemoryEvent>& events) {
  std::unordered_map<std::uint64_t, BlockState> blocks;
  blocks.reserve(events.size() / 4 + 1);
  const MemoryEvent* prev = nullptr;
  for (const auto& e : events) {
    auto fail = [&](const std::string& what) { throw ValidationError(e.seq, e.block_id, what); };
    if (prev) {
      if (e.seq <= prev->seq) fail("seq not strictly increasing");
      if (e.timestamp_us < prev->timestamp_us) fail("timestamp decreases");
    }
    prev = &e;

    auto it = blocks.find(e.block_id);
    if (e.kind == EventKind::Alloc) {
      if (it != blocks.end()) fail("second Alloc for block " + std::to_string(e.block_id));
      if (e.size_bytes == 0) fail("Alloc with zero size");
      blocks.emplace(e.block_id, BlockState{e.size_bytes, e.content_class, e.address, false});
      continue;
    }
    if (it == blocks.end())
      fail(std::string(to_string(e.kind)) + " before Alloc for block " + std::to_string(e.block_id));
    auto& st = it->second;
    if (st.freed) fail("event after Free for block " + std::to_string(e.block_id));
    if (e.size_bytes != st.size)
      fail("size " + std::to_string(e.size_bytes) + " differs from alloc size " + std::to_string(st.size));
    if (e.content_class != st.cls) fail("class differs from alloc class");
    if (e.address && e.address != st.address) fail("address differs from alloc address");
    if (e.kind == EventKind::Free) st.freed = true;
  }
}

TraceMeta::TraceMeta(std::initializer_list<Entry> entries) {
  for (const auto& [key, value] : entries)
    if (!emplace(key, value)) throw Error("duplicate metadata key '" + key + "'");
}

bool TraceMeta::emplace(std::string key, std::string value) {
  if (contains(key)) return false;
  entries_.emplace_back(std::move(key), std::move(value));
  return true;
}

void TraceMeta::set(std::string key, std::string value) {
  for (auto& e : entries_) {
    if (e.first == key) {
      e.second = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(key), std::move(value));
}

const std::string& TraceMeta::at(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.first == key) return e.second;
  throw std::out_of_range("no metadata key '" + std::string(key) + "'");
}

bool TraceMeta::contains(std::string_view key) const {
  for (const auto& e : entries_)
    if (e.first == key) return true;
  return false;
}

Trace::Trace(std::vector<MemoryEvent> events, TraceMeta meta)
    : events_(std::move(events)), meta_(std::move(meta)) {
  check_meta(meta_);
  validate(events_);
}

Trace parse_trace(std::string_view text) {
  std::vector<MemoryEvent> events;
  TraceMeta meta;
  events.reserve(text.size() / 40);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line_no;
    auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) throw SyntaxError(line_no, "empty line");

    if (line.front() == '#') {
      line.remove_prefix(1);
      if (!line.empty() && line.front() == ' ') line.remove_prefix(1);
      auto eq = line.find('=');
      if (eq == std::string_view::npos || eq == 0)
        throw SyntaxError(line_no, "metadata line must be '# key=value'");
      std::string key(line.substr(0, eq));
      if (!meta.emplace(key, std::string(line.substr(eq + 1))))
        throw SyntaxError(line_no, "duplicate metadata key '" + key + "'");
      continue;
    }
    events.push_back(parse_event_line(line, line_no));
  }
  if (events.empty()) throw EmptyTrace();
  return Trace(std::move(events), std::move(meta));
}

Trace parse_trace(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_trace(text);
}

Trace read_trace_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open trace file '" + path + "'");
  return parse_trace(in);
}

std::string format_event(const MemoryEvent& e) {
  std::string out;
  out.reserve(48);
  append_u64(out, e.seq);
  out += ',';
  append_u64(out, e.timestamp_us);
  out += ',';
  out += to_string(e.kind);
  out += ',';
  append_u64(out, e.block_id);
  out += ',';
  append_u64(out, e.size_bytes);
  out += ',';
  if (e.address) append_u64(out, *e.address);
  out += ',';
  out += to_string(e.content_class);
  out += ',';
  if (e.iteration_hint) append_u64(out, *e.iteration_hint);
  return out;
}

std::string write_trace(const Trace& trace) {
  std::string out;
  out.reserve(trace.size() * 40 + 64);
  for (const auto& [key, value] : trace.meta()) {
    out += "# ";
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  for (const auto& e : trace.events()) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

void write_trace(const Trace& trace, std::ostream& out) { out << write_trace(trace); }

void write_trace_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write trace file '" + path + "'");
  write_trace(trace, out);
  if (!out) throw Error("write failed for '" + path + "'");
}

BlockIndex build_block_index(const Trace& trace) {
  BlockIndex index;
  index.event_count = trace.size();
  if (trace.empty()) return index;
  index.end_us = trace.events().back().timestamp_us;

  for (const auto& e : trace.events()) {
    switch (e.kind) {
      case EventKind::Alloc: {
        BlockRecord rec;
        rec.block_id = e.block_id;
        rec.size_bytes = e.size_bytes;
        rec.content_class = e.content_class;
        rec.alloc_us = e.timestamp_us;
        rec.alloc_seq = e.seq;
        rec.address = e.address;
        index.blocks.emplace(e.block_id, std::move(rec));
        break;
      }
      case EventKind::Free: {
        auto& rec = index.blocks.at(e.block_id);
        rec.free_us = e.timestamp_us;
        rec.free_seq = e.seq;
        break;
      }
      case EventKind::Read:
      case EventKind::Write:
        index.blocks.at(e.block_id).access_us.push_back(e.timestamp_us);
        break;
    }
  }
  return index;
}

}  // namespace memtrace
