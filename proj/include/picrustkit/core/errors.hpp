#ifndef PICRUSTKIT_CORE_ERRORS_HPP
#define PICRUSTKIT_CORE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace picrustkit {

// Raised for malformed user input: bad files, bad flags, contract violations
// the caller can fix. The CLI maps this to exit code 2; anything else that
// escapes is an internal error (exit code 1).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace picrustkit

#endif  // PICRUSTKIT_CORE_ERRORS_HPP
