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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace memtrace {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed trace line. `line()` is 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// A well-formed event breaks a cross-event invariant.
class ValidationError : public Error {
 public:
  ValidationError(std::uint64_t seq, std::uint64_t block_id, const std::string& what)
      : Error("seq " + std::to_string(seq) + ", block " + std::to_string(block_id) + ": " + what),
        seq_(seq),
        block_id_(block_id) {}
  std::uint64_t seq() const { return seq_; }
  std::uint64_t block_id() const { return block_id_; }

 private:
  std::uint64_t seq_;
  std::uint64_t block_id_;
};

class EmptyTrace : public Error {
 public:
  EmptyTrace() : Error("trace contains no events") {}
};

class EmptyInput : public Error {
 public:
  EmptyInput() : Error("empty input") {}
};

class InvalidP : public Error {
 public:
  explicit InvalidP(double p) : Error("percentile fraction out of (0, 1]: " + std::to_string(p)) {}
};

class MixedAddressing : public Error {
 public:
  MixedAddressing() : Error("only some blocks carry addresses") {}
};

class NoPeriodFound : public Error {
 public:
  NoPeriodFound() : Error("no repeating period with at least two full repetitions") {}
};

class NoLiveBlocks : public Error {
 public:
  explicit NoLiveBlocks(std::uint64_t t)
      : Error("no live blocks at t=" + std::to_string(t) + "us") {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace memtrace
