#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "common.hpp"
#include "graph.hpp"
#include "instance.hpp"
#include "layouts.hpp"

namespace lhom {

namespace detail {

inline std::string strip_comment(const std::string& line) {
  auto p = line.find('#');
  return p == std::string::npos ? line : line.substr(0, p);
}

inline std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses graph lines (header already consumed).
inline Graph parse_graph_body(int n, int m, const std::vector<std::vector<std::string>>& lines) {
  Graph g;
  std::map<std::string, int> index;
  auto vertex = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    if (g.size() >= n) throw invalid_input("more than n distinct vertex labels");
    int v = g.add_vertex(name);
    index.emplace(name, v);
    return v;
  };
  int edges = 0;
  for (const auto& t : lines) {
    if (t.size() == 1) {
      vertex(t[0]);
    } else if (t.size() == 2) {
      int u = vertex(t[0]);
      int v = vertex(t[1]);
      if (!g.add_edge(u, v)) throw invalid_input("duplicate edge " + t[0] + " " + t[1]);
      ++edges;
    } else {
      throw invalid_input("graph line must hold one or two labels");
    }
  }
  if (edges != m) throw invalid_input("edge count does not match header");
  // Unnamed isolated vertices get their index as label.
  while (g.size() < n) {
    std::string name = std::to_string(g.size());
    while (index.count(name)) name += "_";
    index.emplace(name, g.add_vertex(name));
  }
  return g;
}

}  // namespace detail

// Format: "n m", then m lines "u v" (labels; "u u" is a loop). A line with a
// single label declares an isolated vertex. '#' starts a comment.
inline Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<std::string>> body;
  bool have_header = false;
  int n = 0, m = 0;
  while (std::getline(in, line)) {
    auto t = detail::tokens(detail::strip_comment(line));
    if (t.empty()) continue;
    if (!have_header) {
      if (t.size() != 2) throw invalid_input("graph header must be \"n m\"");
      try {
        n = std::stoi(t[0]);
        m = std::stoi(t[1]);
      } catch (const std::exception&) {
        throw invalid_input("graph header must be \"n m\"");
      }
      if (n < 0 || m < 0) throw invalid_input("negative graph size");
      have_header = true;
      continue;
    }
    body.push_back(std::move(t));
  }
  if (!have_header) throw invalid_input("empty graph file");
  return detail::parse_graph_body(n, m, body);
}

inline Graph read_graph(const std::string& path) { return parse_graph(detail::read_file(path)); }

inline void write_graph(std::ostream& out, const Graph& g) {
  out << g.size() << ' ' << g.num_edges() << '\n';
  for (int v = 0; v < g.size(); ++v)
    if (g.degree(v) == 0) out << g.label(v) << '\n';
  for (auto [u, v] : g.edges()) out << g.label(u) << ' ' << g.label(v) << '\n';
}

inline std::string graph_to_string(const Graph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

// List instance: graph block, then "target <file>", then lines "v: a b c".
// Vertices without a list line get the full list V(h). The target path is
// resolved relative to `base_dir`.
inline ListInstance parse_list_instance(const std::string& text, const std::string& base_dir = ".") {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> graph_lines, list_lines;
  std::string target;
  bool after = false;
  while (std::getline(in, line)) {
    auto t = detail::tokens(detail::strip_comment(line));
    if (t.empty()) continue;
    if (!after && t[0] == "target") {
      if (t.size() != 2) throw invalid_input("target line must be \"target <file>\"");
      target = t[1];
      after = true;
      continue;
    }
    (after ? list_lines : graph_lines).push_back(line);
  }
  if (!after) throw invalid_input("missing target line");
  std::string gtext;
  for (const auto& l : graph_lines) gtext += l + "\n";
  ListInstance inst;
  inst.g = parse_graph(gtext);
  std::filesystem::path tp(target);
  if (tp.is_relative()) tp = std::filesystem::path(base_dir) / tp;
  inst.h = read_graph(tp.string());
  VertexSet all(inst.h.size());
  for (int i = 0; i < inst.h.size(); ++i) all[i] = i;
  inst.lists.assign(inst.g.size(), all);
  std::vector<char> given(inst.g.size(), 0);
  for (const auto& l : list_lines) {
    auto colon = l.find(':');
    if (colon == std::string::npos) throw invalid_input("list line must be \"v: a b c\"");
    auto head = detail::tokens(l.substr(0, colon));
    if (head.size() != 1) throw invalid_input("list line must name one vertex");
    auto v = inst.g.find(head[0]);
    if (!v) throw invalid_input("list for unknown vertex " + head[0]);
    if (given[*v]) throw invalid_input("two lists for vertex " + head[0]);
    given[*v] = 1;
    VertexSet vals;
    for (const auto& name : detail::tokens(detail::strip_comment(l.substr(colon + 1)))) {
      auto x = inst.h.find(name);
      if (!x) throw invalid_input("unknown target vertex " + name);
      vals.push_back(*x);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    inst.lists[*v] = vals;
  }
  return inst;
}

inline ListInstance read_list_instance(const std::string& path) {
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_list_instance(detail::read_file(path), dir.empty() ? "." : dir);
}

inline void write_list_instance(std::ostream& out, const ListInstance& inst, const std::string& target_file) {
  write_graph(out, inst.g);
  out << "target " << target_file << '\n';
  for (int v = 0; v < inst.g.size(); ++v) {
    out << inst.g.label(v) << ':';
    for (int x : inst.lists[v]) out << ' ' << inst.h.label(x);
    out << '\n';
  }
}

// BCSP JSON: {"variables": n | [names], "domains": [[...]],
//             "constraints": [{"u": i, "v": j, "allowed": [[a, b], ...]}]}
inline BcspInstance bcsp_from_json(const nlohmann::json& j) {
  BcspInstance b;
  try {
    const auto& vars = j.at("variables");
    if (vars.is_number_integer()) {
      b.n = vars.get<int>();
    } else {
      for (const auto& name : vars) b.names.push_back(name.get<std::string>());
      b.n = static_cast<int>(b.names.size());
    }
    for (const auto& d : j.at("domains")) b.domains.push_back(d.get<std::vector<int>>());
    if (j.contains("constraints"))
      for (const auto& c : j.at("constraints")) {
        BcspConstraint con;
        con.u = c.at("u").get<int>();
        con.v = c.at("v").get<int>();
        for (const auto& p : c.at("allowed")) {
          auto pr = p.get<std::vector<int>>();
          if (pr.size() != 2) throw invalid_input("allowed pairs must have two entries");
          con.allowed.emplace_back(pr[0], pr[1]);
        }
        b.constraints.push_back(std::move(con));
      }
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("malformed BCSP JSON: ") + e.what());
  }
  normalize(b);
  return b;
}

inline nlohmann::json bcsp_to_json(const BcspInstance& b) {
  nlohmann::json j;
  if (b.names.empty()) {
    j["variables"] = b.n;
  } else {
    j["variables"] = b.names;
  }
  j["domains"] = b.domains;
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : b.constraints) {
    nlohmann::json pairs = nlohmann::json::array();
    for (auto [a, w] : c.allowed) pairs.push_back({a, w});
    j["constraints"].push_back({{"u", c.u}, {"v", c.v}, {"allowed", pairs}});
  }
  return j;
}

inline BcspInstance read_bcsp(const std::string& path) {
  try {
    return bcsp_from_json(nlohmann::json::parse(detail::read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw invalid_input(std::string("malformed JSON: ") + e.what());
  }
}

// Layout file: one line of labels. An optional comment "# width N"
// declares the width.
struct LayoutFile {
  std::vector<int> order;
  std::optional<int> declared_width;
};

inline LayoutFile parse_layout(const std::string& text, const Graph& g) {
  LayoutFile lf;
  std::map<std::string, int> index;
  for (int v = 0; v < g.size(); ++v) index[g.label(v)] = v;
  std::istringstream in(text);
  std::string line;
  bool got = false;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      auto t = detail::tokens(line.substr(hash + 1));
      if (t.size() == 2 && t[0] == "width") lf.declared_width = std::stoi(t[1]);
    }
    auto t = detail::tokens(detail::strip_comment(line));
    if (t.empty()) continue;
    if (got) throw invalid_input("layout must be a single line of labels");
    got = true;
    for (const auto& name : t) {
      auto it = index.find(name);
      if (it == index.end()) throw invalid_input("layout names unknown vertex " + name);
      lf.order.push_back(it->second);
    }
  }
  if (!is_permutation_of_vertices(g, lf.order)) throw invalid_input("layout is not a permutation of V(g)");
  return lf;
}

inline void write_layout(std::ostream& out, const Graph& g, const std::vector<int>& order, int width) {
  out << "# width " << width << '\n';
  for (std::size_t i = 0; i < order.size(); ++i) out << (i ? " " : "") << g.label(order[i]);
  out << '\n';
}

inline void write_dot(std::ostream& out, const ListInstance& inst) {
  out << "graph G {\n";
  for (int v = 0; v < inst.g.size(); ++v) {
    out << "  \"" << inst.g.label(v) << "\" [label=\"" << inst.g.label(v) << "\\n{";
    for (std::size_t i = 0; i < inst.lists[v].size(); ++i) out << (i ? "," : "") << inst.h.label(inst.lists[v][i]);
    out << "}\"];\n";
  }
  for (auto [u, v] : inst.g.edges()) out << "  \"" << inst.g.label(u) << "\" -- \"" << inst.g.label(v) << "\";\n";
  out << "}\n";
}

inline void write_dot(std::ostream& out, const Graph& g) {
  out << "graph G {\n";
  for (int v = 0; v < g.size(); ++v) out << "  \"" << g.label(v) << "\";\n";
  for (auto [u, v] : g.edges()) out << "  \"" << g.label(u) << "\" -- \"" << g.label(v) << "\";\n";
  out << "}\n";
}

}  // namespace lhom
