#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "otdual/serialize.hpp"

namespace helpers {

using namespace otdual;

inline Rational R(const char* s) { return parse_rational(s); }

inline std::vector<Rational> V(std::initializer_list<const char*> xs) {
  std::vector<Rational> out;
  for (auto s : xs) out.push_back(R(s));
  return out;
}

inline Table<Rational> T(std::initializer_list<std::initializer_list<const char*>> rows) {
  Table<Rational> t(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& row : rows) {
    std::size_t j = 0;
    for (auto s : row) t(i, j++) = R(s);
    ++i;
  }
  return t;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string& name) { return std::string(OTDUAL_FIXTURES) + "/" + name; }

inline Instance fixture(const std::string& name) { return parse_instance(read_file(fixture_path(name))); }

inline Game game_fixture(const std::string& name) { return parse_game(read_file(fixture_path(name))); }

inline std::vector<Edge> edges_1based(std::initializer_list<std::pair<int, int>> es) {
  std::vector<Edge> out;
  for (auto [x, y] : es) out.emplace_back(x - 1, y - 1);
  return out;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace helpers
