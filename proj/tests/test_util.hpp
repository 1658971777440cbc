#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "n3sc/compiler.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
  return std::string(TEST_DATA_DIR) + "/" + name;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_data(const std::string& name) { return slurp(data_path(name)); }

inline n3sc::CompileResult compile_data(const std::string& rules, const std::string& ont,
                                        bool inline_requests = false) {
  n3sc::CompileOptions opts;
  opts.inline_requests = inline_requests;
  return n3sc::compile_rules(read_data(rules), read_data(ont), opts);
}

/// Error-code assertion helper.
template <typename Fn>
std::string error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const n3sc::CompileError& e) {
    return e.code();
  }
  return "";
}

}  // namespace testutil
