#pragma once

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace fixtures {

inline std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::set<std::string> read_words(const std::string& path) {
  std::ifstream in(path);
  std::set<std::string> words;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) words.insert(line);
  }
  return words;
}

}  // namespace fixtures
