#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ofm {

// Invalid argument to an operation: shape mismatch, label out of range,
// bad config value.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation applied to objects in an inconsistent state, e.g. a backward
// pass driven by a cache that belongs to a different network.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Non-finite value where a finite one is required.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Failure to open/read/write a file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents. Carries the byte offset (or line number for text
// formats) where parsing failed, -1 if unknown.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& msg, int64_t offset = -1)
      : std::runtime_error(offset >= 0 ? msg + " (at offset " + std::to_string(offset) + ")"
                                       : msg),
        offset_(offset) {}
  int64_t offset() const { return offset_; }

 private:
  int64_t offset_;
};

// File magic/version not supported by this build.
class VersionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two inputs that must agree do not, e.g. an IDX image file and label file
// with different example counts.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ofm
