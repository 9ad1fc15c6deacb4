#pragma once

#include <string>

#include "netdiag/error.hpp"
#include "netdiag/simulator.hpp"

namespace testutil {

std::string read_file(const std::string& path);
std::string fixture(const std::string& name);

// Fig. 5(a)-shaped network: controller c1, switches s1 s2, one host each.
netdiag::Topology fig5a();
netdiag::Topology fig5b();

struct CliResult {
  int status = 0;
  std::string out;
};
CliResult run_cli(const std::string& args);

template <typename F>
netdiag::Errc error_of(F&& f) {
  try {
    f();
  } catch (const netdiag::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a netdiag::Error");
}

}  // namespace testutil
