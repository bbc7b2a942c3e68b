#pragma once

#include <stdexcept>
#include <string>

namespace zerorank {

/// Failure categories. The CLI maps these onto exit codes.
enum class ErrorKind {
  input,                 // malformed arguments or values
  parse,                 // unreadable table / metadata / config file
  config,                // inconsistent experiment configuration
  degenerate_all_zeros,  // nothing left to rank after truncation
  degenerate_constant,   // pooled data has a single distinct value
  degenerate_variance,   // null variance evaluates to zero
  undefined_are,         // efficiency ratio has a vanishing denominator
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for the degenerate_* family, i.e. the data are valid but the
  /// requested test is not defined on them.
  bool degenerate() const noexcept {
    return kind_ == ErrorKind::degenerate_all_zeros ||
           kind_ == ErrorKind::degenerate_constant ||
           kind_ == ErrorKind::degenerate_variance;
  }

 private:
  ErrorKind kind_;
};

}  // namespace zerorank
