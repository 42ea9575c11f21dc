#pragma once

#include <stdexcept>

namespace edgelbp {

/// Malformed descriptor, matrix, manifest or config text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Descriptors (or histograms) built with different parameters compared against each other.
class IncompatibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace edgelbp
