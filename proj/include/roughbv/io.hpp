#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughbv {

// Stable number formatting for reports and CSV (locale independent).
inline std::string fmt(double x, int sig = 12) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, x);
  return buf;
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << body;
}

// two-column function format: "<point id> <value>" per line
inline void write_function(const std::string& path, const std::vector<double>& v) {
  std::ostringstream ss;
  for (size_t i = 0; i < v.size(); ++i) ss << i << ' ' << fmt(v[i]) << '\n';
  write_text_file(path, ss.str());
}

inline std::vector<double> read_function(const std::string& path, size_t expected_size) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open function file: " + path);
  std::vector<double> v(expected_size, 0.0);
  std::vector<bool> seen(expected_size, false);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 2)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'id value'");
    size_t id = std::stoul(toks[0]);
    if (id >= expected_size)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": point id out of range");
    v[id] = std::stod(toks[1]);
    seen[id] = true;
  }
  for (size_t i = 0; i < expected_size; ++i)
    if (!seen[i]) throw std::runtime_error(path + ": missing value for point " + std::to_string(i));
  return v;
}

}  // namespace roughbv
