#include "netdiag/error.hpp"

namespace netdiag {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::parse: return "parse";
    case Errc::dialect: return "dialect";
    case Errc::referential: return "referential";
    case Errc::classification: return "classification";
    case Errc::isolation: return "isolation";
    case Errc::unsupported_topology: return "unsupported-topology";
    case Errc::no_control_path: return "no-control-path";
    case Errc::partitioned_control: return "partitioned-control";
    case Errc::shape: return "shape";
    case Errc::template_missing: return "template-missing";
    case Errc::isolated_node: return "isolated-node";
    case Errc::label_collision: return "label-collision";
    case Errc::cycle: return "cycle";
    case Errc::capacity: return "capacity";
    case Errc::config: return "config";
    case Errc::size: return "size";
    case Errc::contradiction: return "contradiction";
    case Errc::arity: return "arity";
    case Errc::mapping: return "mapping";
    case Errc::unreachable: return "unreachable-endpoints";
    case Errc::scenario: return "scenario";
    case Errc::domain: return "domain";
    case Errc::io: return "io";
  }
  return "unknown";
}

ErrorClass error_class(Errc code) noexcept {
  switch (code) {
    case Errc::contradiction:
      return ErrorClass::inference;
    case Errc::classification:
    case Errc::isolation:
    case Errc::unsupported_topology:
    case Errc::no_control_path:
    case Errc::partitioned_control:
    case Errc::template_missing:
    case Errc::isolated_node:
    case Errc::label_collision:
    case Errc::cycle:
    case Errc::capacity:
    case Errc::unreachable:
    case Errc::size:
      return ErrorClass::model;
    default:
      return ErrorClass::input;
  }
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + " error: " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace netdiag
