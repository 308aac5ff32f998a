// Shared helpers for the test suite: fixture paths and whole-file reads.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) {
  return std::string(FFDE_FIXTURES_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(FFDE_GOLDEN_DIR) + "/" + name;
}
