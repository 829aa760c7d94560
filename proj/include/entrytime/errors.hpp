#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entrytime {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A model description that cannot describe a semigroup (e.g. a non-square generator).
class InvalidModel : public Error {
 public:
  using Error::Error;
};

/// A numerical kernel failed to converge; carries the best estimate reached.
class NumericsFailure : public Error {
 public:
  NumericsFailure(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

/// Malformed model specification text. `position` is a 0-based character offset.
class SpecError : public Error {
 public:
  SpecError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace entrytime
