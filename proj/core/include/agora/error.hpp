#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace agora {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or domain-value construction.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed JSON for a domain type.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class GatewayError : public Error {
 public:
  enum class Kind { transport, request, protocol };

  GatewayError(Kind kind, const std::string& what, int http_status = 0, bool retryable = false)
      : Error(what), kind_(kind), http_status_(http_status), retryable_(retryable) {}

  Kind kind() const noexcept { return kind_; }
  int http_status() const noexcept { return http_status_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  Kind kind_;
  int http_status_;
  bool retryable_;
};

const char* to_string(GatewayError::Kind kind) noexcept;

/// The mock backend had no script entry for a request.
class MockError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  TemplateError(const std::string& what, std::vector<std::string> missing = {})
      : Error(what), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  std::vector<std::string> missing_;
};

/// Base for failures to turn model output into a structured value.
/// Always carries the raw text the model produced.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string raw) : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class Stage2ParseError : public ParseError {
 public:
  using ParseError::ParseError;
};

class JudgeParseError : public ParseError {
 public:
  using ParseError::ParseError;
};

class ScoreError : public ParseError {
 public:
  using ParseError::ParseError;
  explicit ScoreError(const std::string& what) : ParseError(what, {}) {}
};

class MetricError : public Error {
 public:
  enum class Kind { input, backend };
  MetricError(const std::string& what, Kind kind = Kind::input) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class AnalysisError : public Error {
 public:
  using Error::Error;
};

class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}
  /// 1-based line number, 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A pipeline stage failed for one case.
class PipelineError : public Error {
 public:
  using Error::Error;
};

}  // namespace agora
