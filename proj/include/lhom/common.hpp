#pragma once

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace lhom {

using VertexSet = std::vector<int>;  // sorted, no duplicates

struct lhom_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input that violates a documented format or precondition.
struct invalid_input : lhom_error {
  using lhom_error::lhom_error;
};

struct size_cap_exceeded : lhom_error {
  using lhom_error::lhom_error;
};

struct budget_exceeded : lhom_error {
  using lhom_error::lhom_error;
};

struct deadline_exceeded : lhom_error {
  using lhom_error::lhom_error;
};

struct precondition_violated : lhom_error {
  using lhom_error::lhom_error;
};

// Reads an integer cap from the environment, falling back to `def`.
inline long env_cap(const char* name, long def) {
  const char* s = std::getenv(name);
  if (!s || !*s) return def;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (end == s || *end != '\0' || v <= 0) return def;
  return v;
}

// Caps, overridable through LHOM_CAPS="ca=14,cutwidth=20,fvs=25,brute=...".
struct Caps {
  int circular_arc = 14;
  int exact_cutwidth = 20;
  int exact_fvs = 25;
  long brute_nodes = 50'000'000;

  static Caps from_env() {
    Caps c;
    const char* s = std::getenv("LHOM_CAPS");
    if (!s) return c;
    std::string text(s);
    std::size_t pos = 0;
    while (pos < text.size()) {
      std::size_t comma = text.find(',', pos);
      if (comma == std::string::npos) comma = text.size();
      std::string item = text.substr(pos, comma - pos);
      pos = comma + 1;
      auto eq = item.find('=');
      if (eq == std::string::npos) continue;
      std::string key = item.substr(0, eq);
      long v = std::strtol(item.c_str() + eq + 1, nullptr, 10);
      if (v <= 0) continue;
      if (key == "ca") c.circular_arc = static_cast<int>(v);
      else if (key == "cutwidth") c.exact_cutwidth = static_cast<int>(v);
      else if (key == "fvs") c.exact_fvs = static_cast<int>(v);
      else if (key == "brute") c.brute_nodes = v;
    }
    return c;
  }
};

inline const Caps& caps() {
  static const Caps c = Caps::from_env();
  return c;
}

inline int popcount64(std::uint64_t x) { return std::popcount(x); }
inline int lowbit(std::uint64_t x) { return std::countr_zero(x); }

inline std::vector<int> mask_to_vector(std::uint64_t m) {
  std::vector<int> out;
  while (m) {
    out.push_back(lowbit(m));
    m &= m - 1;
  }
  return out;
}

inline std::uint64_t vector_to_mask(const std::vector<int>& v) {
  std::uint64_t m = 0;
  for (int x : v) m |= std::uint64_t{1} << x;
  return m;
}

}  // namespace lhom
