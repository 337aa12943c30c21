#pragma once

#include <stdexcept>
#include <string>

namespace nullgeo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation left the admissible domain (radial range, log/sqrt argument, degenerate metric).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An operation was called on inputs violating its documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, int line, int column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class UnknownIdentifierError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

class ArityError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// Invalid run configuration (unknown keys, wrong types, unknown names).
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace nullgeo
