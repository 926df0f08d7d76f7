#pragma once

#include <cstdint>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"

namespace lhom {

// CNF formula over variables 1..num_vars; literals are +-v.
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

inline Cnf parse_dimacs(std::istream& in) {
  Cnf f;
  std::string line;
  bool header = false;
  int declared = 0;
  std::vector<int> cur;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "c" || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string fmt;
      if (!(ls >> fmt >> f.num_vars >> declared) || fmt != "cnf")
        throw invalid_input("malformed DIMACS header");
      header = true;
      continue;
    }
    if (!header) throw invalid_input("DIMACS clause before header");
    std::istringstream all(line);
    long lit;
    while (all >> lit) {
      if (lit == 0) {
        f.clauses.push_back(cur);
        cur.clear();
        continue;
      }
      if (std::labs(lit) > f.num_vars) throw invalid_input("literal exceeds declared variable count");
      cur.push_back(static_cast<int>(lit));
    }
  }
  if (!header) throw invalid_input("missing DIMACS header");
  if (!cur.empty()) f.clauses.push_back(cur);
  if (static_cast<int>(f.clauses.size()) != declared) throw invalid_input("clause count does not match header");
  return f;
}

inline Cnf parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  return parse_dimacs(in);
}

inline void write_dimacs(std::ostream& out, const Cnf& f) {
  out << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) {
    for (int l : c) out << l << ' ';
    out << "0\n";
  }
}

inline bool cnf_satisfied_by(const Cnf& f, const std::vector<bool>& value) {
  for (const auto& c : f.clauses) {
    bool sat = false;
    for (int l : c)
      if (value[std::abs(l)] == (l > 0)) {
        sat = true;
        break;
      }
    if (!sat) return false;
  }
  return true;
}

// Exhaustive satisfiability check (value[0] unused).
inline std::optional<std::vector<bool>> brute_force_sat(const Cnf& f) {
  if (f.num_vars > 30) throw size_cap_exceeded("brute-force SAT is capped at 30 variables");
  std::vector<bool> value(f.num_vars + 1, false);
  const std::uint64_t total = std::uint64_t{1} << f.num_vars;
  for (std::uint64_t a = 0; a < total; ++a) {
    for (int v = 1; v <= f.num_vars; ++v) value[v] = (a >> (v - 1)) & 1;
    if (cnf_satisfied_by(f, value)) return value;
  }
  return std::nullopt;
}

// Clauses of 1..3 distinct variables with random signs.
inline Cnf random_cnf(std::mt19937_64& rng, int num_vars, int num_clauses, int max_width = 3) {
  Cnf f;
  f.num_vars = num_vars;
  std::uniform_int_distribution<int> width(1, std::min(max_width, num_vars));
  std::uniform_int_distribution<int> var(1, num_vars);
  for (int i = 0; i < num_clauses; ++i) {
    int w = width(rng);
    std::vector<int> c;
    while (static_cast<int>(c.size()) < w) {
      int v = var(rng);
      bool dup = false;
      for (int l : c)
        if (std::abs(l) == v) dup = true;
      if (dup) continue;
      c.push_back(rng() & 1 ? v : -v);
    }
    f.clauses.push_back(c);
  }
  return f;
}

}  // namespace lhom
