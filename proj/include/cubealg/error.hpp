#pragma once

#include <stdexcept>
#include <string>

namespace cubealg {

// Base of every error raised at the library boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dimension, level, member or measure name that does not resolve.
class UnknownName : public Error {
 public:
  UnknownName(const std::string& what_kind, const std::string& name)
      : Error("unknown name: " + what_kind + " '" + name + "'") {}
};

// Schema, graph or document content that fails validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A transformation or operation that is ill-formed for the state it is
// applied to (irrational comparison, non-Boolean flag, ...).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace cubealg
