#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace diamantine {

enum class Errc {
  invalid_dimension,
  shape,
  zero_length_bar,
  degenerate_cell,
  invalid_argument,
  cone_violation,
  off_hypersurface,
  realization,
  saddle_required,
  incapable,
  unsupported_lengths,
  format,
  parse,
  numerical,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_dimension: return "invalid-dimension";
    case Errc::shape: return "shape";
    case Errc::zero_length_bar: return "zero-length-bar";
    case Errc::degenerate_cell: return "degenerate-cell";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::cone_violation: return "cone-violation";
    case Errc::off_hypersurface: return "off-hypersurface";
    case Errc::realization: return "realization";
    case Errc::saddle_required: return "saddle-required";
    case Errc::incapable: return "incapable";
    case Errc::unsupported_lengths: return "unsupported-lengths";
    case Errc::format: return "format";
    case Errc::parse: return "parse";
    case Errc::numerical: return "numerical";
  }
  return "unknown";
}

// Every failure raised by the library carries a code and the module that
// raised it, so the CLI can turn it into a tagged diagnostic and exit code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string module, const std::string& what)
      : std::runtime_error(module + "/" + std::string(to_string(code)) + ": " + what),
        code_(code),
        module_(std::move(module)) {}

  Errc code() const noexcept { return code_; }
  const std::string& module() const noexcept { return module_; }

 private:
  Errc code_;
  std::string module_;
};

// CLI exit codes: 2 parse error, 3 precondition violation, 4 numerical failure.
inline int exit_code_for(Errc code) {
  switch (code) {
    case Errc::parse:
      return 2;
    case Errc::realization:
    case Errc::numerical:
      return 4;
    default:
      return 3;
  }
}

}  // namespace diamantine
