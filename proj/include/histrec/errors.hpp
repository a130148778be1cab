#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace histrec {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class SubprocessError : public Error {
 public:
  SubprocessError(const std::string& msg, int exit_code, std::string stderr_text)
      : Error(msg), exit_code(exit_code), stderr_text(std::move(stderr_text)) {}

  int exit_code;
  std::string stderr_text;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

// Raised by the extractor after max_retries attempts all failed validation;
// carries one message per attempt.
class ExhaustedRetriesError : public Error {
 public:
  ExhaustedRetriesError(const std::string& msg, std::vector<std::string> attempt_errors)
      : Error(msg), attempt_errors(std::move(attempt_errors)) {}

  std::vector<std::string> attempt_errors;
};

}  // namespace histrec
