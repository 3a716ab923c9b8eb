#pragma once

#include <stdexcept>
#include <string>

namespace optreg {

// Bad arguments or configuration; the CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// A point or probability vector outside the reconstruction space.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Numerical integration or root finding did not produce a usable result;
// the CLI maps this to exit code 3.
class IntegrationError : public std::runtime_error {
 public:
  explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace optreg
