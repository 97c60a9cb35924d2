#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace splatrig {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(msg) {}
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

inline void check(bool cond, const std::string& msg) {
  if (!cond) throw InvalidArgument(msg);
}

inline bool is_finite(double v) { return std::isfinite(v); }

}  // namespace splatrig
