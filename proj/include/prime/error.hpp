#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace prime {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text: catalog JSON, logic notation, puzzle files, responses.
class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> issues)
      : Error(join(what, issues)), issues_(std::move(issues)) {}
  explicit ValidationError(const std::string& what) : Error(what) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::string& head, const std::vector<std::string>& issues) {
    std::string out = head;
    for (const auto& i : issues) out += "\n  - " + i;
    return out;
  }
  std::vector<std::string> issues_;
};

// A request the catalog cannot satisfy (too few items, p odd, ...).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ExhaustedError : public Error {
 public:
  using Error::Error;
};

// A produced artifact failed its post-check; indicates a bug, never retried silently.
class VerificationError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace prime
