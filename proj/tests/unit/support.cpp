#include "support.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace testutil {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return read_file(std::string(NETDIAG_FIXTURES) + "/" + name); }

netdiag::Topology fig5a() {
  return netdiag::classify(netdiag::parse_dialect(fixture("fig5a.json"), netdiag::Dialect::Native));
}

netdiag::Topology fig5b() {
  return netdiag::classify(netdiag::parse_dialect(fixture("fig5b.json"), netdiag::Dialect::Native));
}

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(NETDIAG_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace testutil
