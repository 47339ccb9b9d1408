#pragma once

#include <stdexcept>
#include <string>

namespace fracbayes {

/// Raised when a computation cannot produce a trustworthy result
/// (eigensolver failure, singular system, underflowed normalization).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed external input: config files, data files, JSON.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void fail_argument(const std::string& what) {
  throw std::invalid_argument(what);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) fail_argument(what);
}

}  // namespace detail
}  // namespace fracbayes
