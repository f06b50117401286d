#ifndef LSDRIFT_ERROR_HPP
#define LSDRIFT_ERROR_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace lsdrift {

enum class ErrorKind {
  invalid_argument,  ///< a precondition or configuration invariant was violated
  numerical,         ///< a numerical routine failed (non-convergence, non-finite values)
};

/// Base exception for the library. `module()` names the originating module so
/// that CLI messages can be tagged.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

inline Error invalid_argument(std::string module, const std::string& message) {
  return Error(ErrorKind::invalid_argument, std::move(module), message);
}

inline Error numerical_error(std::string module, const std::string& message) {
  return Error(ErrorKind::numerical, std::move(module), message);
}

}  // namespace lsdrift

#endif
