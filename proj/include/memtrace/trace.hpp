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

// Trace event model and the `.memtrace` text format.
//
// A trace file holds one event per line:
//
//   seq,timestamp_us,kind,block_id,size_bytes,address,class,iteration_hint
//
// kind is one of A/F/R/W, class one of IN/PARAM/INTER/OTHER/UNK, and absent
// optional fields are left empty. Lines starting with '#' carry metadata as
// "# key=value". The canonical form (what write_trace emits) puts metadata
// first in the order it was read, has no trailing whitespace and ends every
// line in '\n'.

#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <string>
#include <string_view>
#include <vector>

namespace memtrace {

enum class EventKind : std::uint8_t { Alloc, Free, Read, Write };

enum class ContentClass : std::uint8_t { Input, Parameter, Intermediate, Other, Unknown };

inline constexpr std::size_t kNumClasses = 5;

/// Fixed reporting order: IN, PARAM, INTER, OTHER, UNK.
inline constexpr std::array<ContentClass, kNumClasses> kAllClasses = {
    ContentClass::Input, ContentClass::Parameter, ContentClass::Intermediate,
    ContentClass::Other, ContentClass::Unknown};

constexpr std::size_t class_index(ContentClass c) { return static_cast<std::size_t>(c); }

std::string_view to_string(EventKind kind);
std::string_view to_string(ContentClass c);
std::optional<EventKind> parse_kind(std::string_view s);
std::optional<ContentClass> parse_class(std::string_view s);

struct MemoryEvent {
  std::uint64_t seq = 0;
  std::uint64_t timestamp_us = 0;
  EventKind kind = EventKind::Alloc;
  std::uint64_t block_id = 0;
  std::uint64_t size_bytes = 0;
  std::optional<std::uint64_t> address;
  ContentClass content_class = ContentClass::Unknown;
  std::optional<std::uint64_t> iteration_hint;

  bool is_access() const { return kind == EventKind::Read || kind == EventKind::Write; }
  friend bool operator==(const MemoryEvent&, const MemoryEvent&) = default;
};

/// Metadata entries in file order; keys are unique.
class TraceMeta {
 public:
  using Entry = std::pair<std::string, std::string>;

  TraceMeta() = default;
  TraceMeta(std::initializer_list<Entry> entries);

  /// Appends; returns false (and changes nothing) if the key exists.
  bool emplace(std::string key, std::string value);
  /// Replaces the value of an existing key or appends a new entry.
  void set(std::string key, std::string value);
  /// Throws std::out_of_range if absent.
  const std::string& at(std::string_view key) const;
  bool contains(std::string_view key) const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const TraceMeta&, const TraceMeta&) = default;

 private:
  std::vector<Entry> entries_;
};

/// An immutable, validated sequence of events in seq order.
class Trace {
 public:
  Trace() = default;

  /// Throws ValidationError if `events` break any cross-event invariant.
  explicit Trace(std::vector<MemoryEvent> events, TraceMeta meta = {});

  const std::vector<MemoryEvent>& events() const { return events_; }
  const TraceMeta& meta() const { return meta_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  std::vector<MemoryEvent> events_;
  TraceMeta meta_;
};

/// Checks every per-trace invariant; throws ValidationError naming the first
/// offending seq and block.
void validate(const std::vector<MemoryEvent>& events);

/// Parses `.memtrace` text. Throws SyntaxError, ValidationError or EmptyTrace.
Trace parse_trace(std::string_view text);
Trace parse_trace(std::istream& in);
Trace read_trace_file(const std::string& path);

/// Emits the canonical form; byte-deterministic for a given trace.
std::string write_trace(const Trace& trace);
void write_trace(const Trace& trace, std::ostream& out);
void write_trace_file(const Trace& trace, const std::string& path);

/// Formats a single event line without the trailing newline.
std::string format_event(const MemoryEvent& e);

struct BlockRecord {
  std::uint64_t block_id = 0;
  std::uint64_t size_bytes = 0;
  ContentClass content_class = ContentClass::Unknown;
  std::uint64_t alloc_us = 0;
  std::uint64_t alloc_seq = 0;
  std::optional<std::uint64_t> free_us;
  std::optional<std::uint64_t> free_seq;
  std::vector<std::uint64_t> access_us;
  std::optional<std::uint64_t> address;

  bool leaked() const { return !free_us.has_value(); }
  /// Live at t under the [alloc, free) convention; leaked blocks stay live.
  bool live_at(std::uint64_t t) const { return alloc_us <= t && (!free_us || t < *free_us); }

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

/// Per-block view of a trace, keyed and ordered by block_id.
struct BlockIndex {
  std::map<std::uint64_t, BlockRecord> blocks;
  /// Timestamp of the last event; leaked blocks are drawn up to here.
  std::uint64_t end_us = 0;
  std::size_t event_count = 0;

  /// Free time, or `end_us` for leaked blocks.
  std::uint64_t lifetime_end(const BlockRecord& b) const { return b.free_us.value_or(end_us); }
};

BlockIndex build_block_index(const Trace& trace);

}  // namespace memtrace
