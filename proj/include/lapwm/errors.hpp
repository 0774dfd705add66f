#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lapwm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that cannot define a model (e.g. all samples identical).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Payload does not fit the available coefficient pool.
class CapacityError : public ConfigError {
 public:
  CapacityError(const std::string& what, std::size_t max_bits)
      : ConfigError(what), max_bits_(max_bits) {}
  std::size_t max_bits() const noexcept { return max_bits_; }

 private:
  std::size_t max_bits_;
};

/// A grid would exceed the configured size limit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed or mismatched media data. `offset` is the byte offset in the
/// input stream when known, otherwise -1.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, std::int64_t offset = -1)
      : Error(offset >= 0 ? what + " (at byte " + std::to_string(offset) + ")"
                          : what),
        offset_(offset) {}
  std::int64_t offset() const noexcept { return offset_; }

 private:
  std::int64_t offset_;
};

}  // namespace lapwm
