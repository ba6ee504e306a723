#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace windesign {

// Mirrors the CLI exit codes: 1 config, 2 numeric degeneracy, 3 non-convergence.
enum class ErrorCode : int {
  ConfigError = 1,
  NumericDegeneracy = 2,
  NonConvergence = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Validation / schema problem. `path` is a JSON-pointer-style location when the
// error originates from a config document ("/endpoints/0/control/sd").
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& msg)
      : Error(ErrorCode::ConfigError, path.empty() ? msg : path + ": " + msg),
        path_(std::move(path)) {}
  explicit ConfigError(const std::string& msg) : ConfigError("", msg) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& msg) : Error(ErrorCode::NumericDegeneracy, msg) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& msg) : Error(ErrorCode::NonConvergence, msg) {}
};

}  // namespace windesign
