#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pv {

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-line DSL parse failure; column is 1-based into the source line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, int column)
      : Error("column " + std::to_string(column) + ": " + message),
        message_(message),
        column_(column) {}

  const std::string& message() const { return message_; }
  int column() const { return column_; }

 private:
  std::string message_;
  int column_;
};

struct LineError {
  int line = 0;  // 1-based
  int column = 0;
  std::string message;
};

/// Aggregated parse failures for a multi-line plan; every bad line is listed.
class PlanParseError : public Error {
 public:
  explicit PlanParseError(std::vector<LineError> errors)
      : Error(render(errors)), errors_(std::move(errors)) {}

  const std::vector<LineError>& errors() const { return errors_; }

 private:
  static std::string render(const std::vector<LineError>& errors) {
    std::string out = std::to_string(errors.size()) + " bad line(s):";
    for (const auto& e : errors) {
      out += "\n  line " + std::to_string(e.line) + ", column " +
             std::to_string(e.column) + ": " + e.message;
    }
    return out;
  }

  std::vector<LineError> errors_;
};

class EmptyPlan : public Error {
 public:
  EmptyPlan() : Error("plan has no actions") {}
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class GoalExtractionError : public Error {
 public:
  using Error::Error;
};

/// Judge reply had no recognizable blocks and no tags.
class MalformedOutput : public Error {
 public:
  using Error::Error;
};

/// A Remove critique names a stable id that is not in the plan being revised.
class StaleCritique : public Error {
 public:
  using Error::Error;
};

class InserterParseError : public Error {
 public:
  using Error::Error;
};

class ScriptIndexError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable)
      : Error(message), retryable_(retryable) {}

  bool retryable() const { return retryable_; }

 private:
  bool retryable_;
};

class AuthError : public Error {
 public:
  using Error::Error;
};

class CacheCorrupt : public Error {
 public:
  using Error::Error;
};

struct SchemaIssue {
  std::string file;
  std::string field;
  std::string reason;
};

/// Aggregated episode-file validation failures across a corpus directory.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<SchemaIssue> issues)
      : Error(render(issues)), issues_(std::move(issues)) {}

  const std::vector<SchemaIssue>& issues() const { return issues_; }

 private:
  static std::string render(const std::vector<SchemaIssue>& issues) {
    std::string out = std::to_string(issues.size()) + " schema issue(s):";
    for (const auto& i : issues) {
      out += "\n  " + i.file + ": " + i.field + ": " + i.reason;
    }
    return out;
  }

  std::vector<SchemaIssue> issues_;
};

class EmptyCorpus : public Error {
 public:
  using Error::Error;
};

class ProfileError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class EmptyRun : public Error {
 public:
  using Error::Error;
};

class EpisodeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace pv
