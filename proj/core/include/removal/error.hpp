#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace removal {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument: value out of its documented range, malformed input.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two operands that must live on the same space do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A configured size cap (table entries, MWIS vertices, enumeration budget) would be exceeded.
class CapExceeded : public Error {
 public:
  CapExceeded(const std::string& what, std::size_t requested, std::size_t cap)
      : Error(what + ": requested " + std::to_string(requested) + ", cap " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::size_t requested() const noexcept { return requested_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t requested_;
  std::size_t cap_;
};

// A guaranteed inequality failed at runtime. This always indicates a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Eigen solver did not converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace removal
