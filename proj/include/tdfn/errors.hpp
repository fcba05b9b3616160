#pragma once

#include <stdexcept>
#include <string>

namespace tdfn {

/// Shape or precondition violation on a tensor operation.
class ShapeError : public std::invalid_argument {
 public:
  explicit ShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed or unreadable external data (files, configs, manifests).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Non-finite value where a finite one is required (loss, gradient).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace tdfn
