#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace poisntt {

// Status values double as CLI exit codes and C API status codes.
enum class Status : int {
  Ok = 0,
  CheckFailed = 1,
  InputError = 2,
  PremiseViolation = 3,
  Inconclusive = 4,
  RuntimeAbort = 5,
};

// Located syntax/semantic error in DSL text or a system file.
// line == 0 means "not file-based" (bare expression string).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, int line, int column)
      : std::runtime_error(std::move(msg)), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Evaluation hit a point outside an expression's validity set
// (division by zero, ln/sqrt of a nonpositive argument, overflow).
class EvalError : public std::runtime_error {
 public:
  EvalError(std::string msg, std::vector<double> point)
      : std::runtime_error(std::move(msg)), point_(std::move(point)) {}
  const std::vector<double>& point() const { return point_; }

 private:
  std::vector<double> point_;
};

// A transformation premise failed (eta vanishing, dF/dz2 vanishing, ...).
class PremiseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input that is not a syntax error (bad dimensions, infeasible
// sampling domain, inconsistent rank/casimir declarations).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace poisntt
