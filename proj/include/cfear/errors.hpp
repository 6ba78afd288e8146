#pragma once

#include <stdexcept>
#include <string>

namespace cfear {

/// File or stream does not follow the expected format (bad magic, bad version).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Header dimensions are invalid or inconsistent with the payload.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// File ends before the declared payload.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Text input could not be parsed; message carries the line number.
struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line) : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
  int line_number;
};

/// Configuration values are out of range for the given input.
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Input values outside the documented domain (bad indices, out-of-bounds poses).
struct InputError : std::invalid_argument {
  explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

}  // namespace cfear
