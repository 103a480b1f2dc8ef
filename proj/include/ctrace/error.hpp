#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ctrace {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad shapes, unknown labels, schema problems.
class InputError : public Error {
public:
  using Error::Error;
};

/// A model or map fails one of its structural invariants.
class ValidationError : public Error {
public:
  explicit ValidationError(const std::string &what,
                           std::vector<std::string> violations = {})
      : Error(what), violations_(std::move(violations)) {}

  const std::vector<std::string> &violations() const { return violations_; }

private:
  std::vector<std::string> violations_;
};

/// The inputs are well formed but the requested computation is undefined
/// for them (torsion where a free module is required, singular germ, ...).
class ComputeError : public Error {
public:
  using Error::Error;
};

} // namespace ctrace
