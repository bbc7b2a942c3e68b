#include "zerorank/errors.hpp"

namespace zerorank {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input: return "InputError";
    case ErrorKind::parse: return "ParseError";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::degenerate_all_zeros: return "DegenerateAllZeros";
    case ErrorKind::degenerate_constant: return "DegenerateConstant";
    case ErrorKind::degenerate_variance: return "DegenerateVariance";
    case ErrorKind::undefined_are: return "UndefinedARE";
  }
  return "Error";
}

}  // namespace zerorank
