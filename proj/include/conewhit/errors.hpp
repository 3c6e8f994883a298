#pragma once

#include <stdexcept>
#include <string>

namespace conewhit {

// Input left the cone of (Hermitian) positive definite matrices: a Cholesky
// pivot came out <= 0 or non-finite.
class NotPositiveDefinite : public std::runtime_error {
  public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// Parameter outside the admissible range of the operation (shape too small,
// index pair without a convergent integral representation, ...).
class DomainError : public std::domain_error {
  public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Residual matrix is neither strictly positive nor strictly negative definite.
class OrientationError : public std::runtime_error {
  public:
    explicit OrientationError(const std::string& what) : std::runtime_error(what) {}
};

// Truncated series tail still above tolerance at the maximum degree.
class NotConverged : public std::runtime_error {
  public:
    explicit NotConverged(const std::string& what) : std::runtime_error(what) {}
};

// Too few Monte Carlo draws landed in the requested class to form an estimate.
class InsufficientSamples : public std::runtime_error {
  public:
    explicit InsufficientSamples(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace conewhit
