#pragma once

#include <stdexcept>
#include <string>

namespace minkowski {

// Input outside the domain of an operation (radius outside the hemisphere,
// non-positive data, bad sizes).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A principal curvature left the positive cone where strict convexity is required.
class ConvexityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The chosen spectral resolution cannot represent the requested object.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton system singular on the working subspace.
class KernelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newton or continuation did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace minkowski
