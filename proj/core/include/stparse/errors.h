#ifndef STPARSE_ERRORS_H_
#define STPARSE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace stparse {

// Malformed input data or an unreadable/unwritable file.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// A caller violated an operation's precondition (illegal transition, k > n,
// mismatched dimensions, ...).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace stparse

#endif  // STPARSE_ERRORS_H_
