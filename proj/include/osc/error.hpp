#pragma once

#include <stdexcept>
#include <string>

namespace osc {

/// Base for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input file or spec structure is malformed.
struct MalformedInput : Error {
  using Error::Error;
};

/// A mathematically invalid argument (lambda <= 0, point outside patch, ...).
struct DomainError : Error {
  using Error::Error;
};

/// A numerical check failed in a way that requires a different grid.
struct GridError : Error {
  using Error::Error;
};

}  // namespace osc
