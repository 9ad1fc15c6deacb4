#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace netdiag {

enum class Errc {
  parse,
  dialect,
  referential,
  classification,
  isolation,
  unsupported_topology,
  no_control_path,
  partitioned_control,
  shape,
  template_missing,
  isolated_node,
  label_collision,
  cycle,
  capacity,
  config,
  size,
  contradiction,
  arity,
  mapping,
  unreachable,
  scenario,
  domain,
  io,
};

/// Coarse grouping used for process exit codes.
enum class ErrorClass { input, model, inference };

std::string_view errc_name(Errc code) noexcept;
ErrorClass error_class(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace netdiag
