#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fpdyn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input value or out-of-range parameter.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Dimension mismatch, singular matrix and similar malformed data.
class StructuralError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  DomainError(const std::string& what, std::vector<double> payload = {})
      : Error(what), payload_(std::move(payload)) {}
  const std::vector<double>& payload() const { return payload_; }

 private:
  std::vector<double> payload_;
};

// The requested periodic orbit does not exist at this parameter.
class ExistenceError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

// Flow direction not determined (non-transversal tie, or at E).
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

class SearchError : public Error {
 public:
  using Error::Error;
};

// A fitted model does not describe the data (e.g. map not projective).
class ModelError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace fpdyn
