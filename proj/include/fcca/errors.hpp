#pragma once

#include <stdexcept>
#include <string>

namespace fcca {

/// File and stream failures (CLI exit code 2).
struct io_error : std::runtime_error {
  explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed or inconsistent input data (CLI exit code 65).
struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A validity assumption on the operator model is violated (norm too close
/// to one, degenerate conditional block, ...). Carries the offending norm.
struct assumption_error : std::runtime_error {
  assumption_error(const std::string& msg, double norm_)
      : std::runtime_error(msg + " (norm = " + std::to_string(norm_) + ")"),
        norm(norm_) {}
  double norm;
};

}  // namespace fcca
