#pragma once

#include <stdexcept>
#include <string>

namespace laplace_ci {

/// Raised when an argument lies outside the domain of an operation
/// (x > n, odd k, alpha outside (0, 1), non-positive shape, ...).
class domain_error : public std::domain_error {
 public:
  explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

/// Raised when a request exceeds a resource guard (grid too large).
class resource_error : public std::runtime_error {
 public:
  explicit resource_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the export path when a file cannot be written.
class io_error : public std::runtime_error {
 public:
  io_error(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace laplace_ci
