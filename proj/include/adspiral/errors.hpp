#pragma once

#include <stdexcept>
#include <string>

namespace adspiral {

/// Invalid or inconsistent experiment configuration. The CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, int line = -1)
      : std::runtime_error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A numerical procedure failed to reach its tolerance within its iteration
/// or step budget. The CLI maps it to exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace adspiral
