#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "lhom/io.hpp"
#include "lhom/invariants.hpp"
#include "lhom/layouts.hpp"
#include "lhom/reductions.hpp"
#include "lhom/solvers.hpp"

using namespace lhom;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0, kUnsat = 1, kUsage = 2, kCheckFailed = 3;

// Raised for a failed verification; the message names the check.
struct check_failed : lhom_error {
  using lhom_error::lhom_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool looks_like_json(const std::string& text) {
  auto p = text.find_first_not_of(" \t\r\n");
  return p != std::string::npos && text[p] == '{';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw invalid_input("cannot write " + path);
  return out;
}

json stats_json(const SolveStats& s) {
  json steps = json::array();
  std::size_t rank_sum = 0, rank_max = 0;
  for (const auto& st : s.steps) {
    steps.push_back({{"position", st.position},
                     {"frontier", st.frontier},
                     {"before", st.before},
                     {"after", st.after},
                     {"log2_degree_bound", st.log2_degree_bound},
                     {"log2_width_bound", st.log2_width_bound},
                     {"within_bounds", st.within_bounds}});
    rank_sum += st.after;
    rank_max = std::max(rank_max, st.after);
  }
  json j{{"engine", s.engine},       {"nodes", s.nodes},
         {"k", s.k},                 {"width", s.width},
         {"max_table", s.max_table}, {"bound_violations", s.bound_violations},
         {"seconds", s.seconds},     {"rank_max", rank_max},
         {"rank_mean", s.steps.empty() ? 0.0 : static_cast<double>(rank_sum) / s.steps.size()}};
  j["steps"] = std::move(steps);
  return j;
}

std::vector<int> choose_order(const Graph& g, const std::string& mode) {
  if (mode == "greedy") return greedy_layout(g).order;
  if (mode == "exact") return exact_cutwidth(g).order;
  if (mode == "auto") {
    for (const auto& comp : connected_components(g))
      if (static_cast<int>(comp.size()) > caps().exact_cutwidth) return greedy_layout(g).order;
    return exact_cutwidth(g).order;
  }
  return parse_layout(slurp(mode), g).order;
}

SolveResult run_engine(const BcspInstance& b, const std::string& engine, const std::vector<int>& order,
                       const Deadline& deadline) {
  if (engine == "brute") return brute_force(b, caps().brute_nodes, deadline);
  if (engine == "dp") return layout_dp(b, order, deadline);
  if (engine == "repset") return repset_solve(b, order, deadline);
  throw invalid_input("engine " + engine + " does not apply to this input");
}

// ---- solve ----------------------------------------------------------------

struct SolveOpts {
  std::string input, engine = "repset", layout = "auto", stats;
  std::uint64_t seed = 0;
  long timeout_ms = 0;
  bool decide = false;
};

int cmd_solve(const SolveOpts& o) {
  std::string text = slurp(o.input);
  const Deadline dl = Deadline::after_ms(o.timeout_ms);
  SolveResult r;
  json assignment = json::object();
  if (looks_like_json(text)) {
    if (o.engine == "clean") throw invalid_input("the clean engine needs a list instance");
    BcspInstance b;
    try {
      b = bcsp_from_json(json::parse(text));
    } catch (const json::parse_error& e) {
      throw invalid_input(std::string("malformed JSON: ") + e.what());
    }
    r = run_engine(b, o.engine, o.engine == "brute" ? std::vector<int>{} : choose_order(primal_graph(b), o.layout),
                   dl);
    if (r.assignment)
      for (int v = 0; v < b.n; ++v)
        assignment[b.names.empty() ? std::to_string(v) : b.names[v]] = (*r.assignment)[v];
  } else {
    auto dir = fs::path(o.input).parent_path().string();
    ListInstance inst = parse_list_instance(text, dir.empty() ? "." : dir);
    validate(inst);
    std::vector<int> f;
    if (o.engine == "clean") {
      r = clean_repset_solve(inst, choose_order(inst.g, o.layout), dl);
      if (r.assignment)
        for (int x : *r.assignment) f.push_back(x - 1);
    } else if (is_bipartite(inst.h) && o.layout == "auto") {
      Engine e = o.engine == "brute" ? Engine::brute : o.engine == "dp" ? Engine::dp : Engine::repset;
      r = solve_lhom(inst, e, dl);
      if (r.assignment) f = *r.assignment;
    } else {
      BcspInstance b = lhom_to_bcsp(inst);
      r = run_engine(b, o.engine, o.engine == "brute" ? std::vector<int>{} : choose_order(inst.g, o.layout), dl);
      if (r.assignment)
        for (int x : *r.assignment) f.push_back(x - 1);
    }
    if (r.assignment) {
      if (!is_list_homomorphism(inst, f)) throw check_failed("solver returned an invalid homomorphism");
      for (int v = 0; v < inst.g.size(); ++v) assignment[inst.g.label(v)] = inst.h.label(f[v]);
    }
  }
  if (o.stats == "json") {
    json j{{"satisfiable", r.satisfiable}, {"seed", o.seed}, {"stats", stats_json(r.stats)}};
    if (r.satisfiable) j["assignment"] = assignment;
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << (r.satisfiable ? "SAT" : "UNSAT") << '\n';
    for (auto& [k, v] : assignment.items()) std::cout << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  return o.decide && !r.satisfiable ? kUnsat : kOk;
}

// ---- invariants -----------------------------------------------------------

json report_json(const InvariantReport& r, const Graph& base) {
  auto names = [&](const VertexSet& vs) {
    json a = json::array();
    for (int v : vs) a.push_back(base.label(v));
    return a;
  };
  json j{{"kind", r.kind}, {"value", r.value}, {"subgraph", names(r.subgraph)}};
  j["set1"] = names(r.set1);
  j["set2"] = names(r.set2);
  if (r.unknown) j["unknown"] = true;
  if (r.bi_arc) j["bi_arc"] = true;
  return j;
}

int cmd_invariants(const std::string& path, const std::string& kind, bool star) {
  Graph h = read_graph(path);
  Graph base = star_base(h);
  json out{{"graph", path}, {"vertices", h.size()}, {"bipartite", is_bipartite(h)}, {"star", star}};
  if (!is_bipartite(h) && !star) out["computed_on"] = "associated_bipartite";
  json results = json::object();
  std::vector<std::pair<std::string, InvariantKind>> kinds{
      {"i", InvariantKind::i}, {"mim", InvariantKind::mim}, {"gamma", InvariantKind::gamma}};
  for (auto [name, k] : kinds) {
    if (kind != "all" && kind != name) continue;
    InvariantReport r = star ? invariant_star(h, k) : base_invariant(base, k);
    results[name] = report_json(r, base);
  }
  out["results"] = results;
  std::cout << out.dump(2) << '\n';
  return kOk;
}

// ---- layout ---------------------------------------------------------------

int cmd_layout(const std::string& path, const std::string& mode, bool fvs) {
  Graph g = read_graph(path);
  if (fvs) {
    VertexSet f = exact_fvs(g);
    auto td = fvs_to_tree_decomposition(g, f);
    std::cout << "# fvs " << f.size() << " treewidth<= " << td.width() << '\n';
    for (std::size_t i = 0; i < f.size(); ++i) std::cout << (i ? " " : "") << g.label(f[i]);
    std::cout << '\n';
    return kOk;
  }
  auto order = choose_order(g, mode);
  write_layout(std::cout, g, order, layout_width(g, order));
  return kOk;
}

// ---- reduce ---------------------------------------------------------------

struct ReduceOpts {
  std::string cnf, target, mode = "fvs", out, cert, dot;
  int p = 2, g = 4;
};

int cmd_reduce(const ReduceOpts& o) {
  std::istringstream cnf_text(slurp(o.cnf));
  Cnf f = parse_dimacs(cnf_text);
  Graph h = read_graph(o.target);
  const bool ctw = o.mode == "ctw";
  auto setup = default_setup(h, ctw);
  ReductionOutput r = ctw ? reduce_sat_ctw(f, h, setup.triple, setup.s, o.p, o.g)
                          : reduce_sat_fvs(f, h, setup.triple, setup.s, o.p);
  validate(r.instance);

  auto out_dir = fs::absolute(o.out).parent_path();
  std::string target_ref = fs::relative(fs::absolute(o.target), out_dir).string();
  {
    auto out = open_out(o.out);
    write_list_instance(out, r.instance, target_ref);
  }
  json summary{{"mode", o.mode},
               {"variables", f.num_vars},
               {"clauses", f.clauses.size()},
               {"k", r.k},
               {"p", r.p},
               {"t", r.t},
               {"vertices", r.instance.g.size()},
               {"edges", r.instance.g.num_edges()}};
  if (ctw) {
    const int c = measure_ctw_constant(h, setup.triple, setup.s, o.p, o.g);
    summary["g"] = o.g;
    summary["layout_width"] = r.layout_width;
    summary["constant"] = c;
    summary["width_bound"] = r.t * r.p + c;
  } else {
    summary["fvs_size"] = r.fvs.size();
  }
  if (!o.cert.empty()) {
    auto out = open_out(o.cert);
    if (ctw) {
      write_layout(out, r.instance.g, r.layout, r.layout_width);
    } else {
      out << "# fvs " << r.fvs.size() << '\n';
      for (std::size_t i = 0; i < r.fvs.size(); ++i) out << (i ? " " : "") << r.instance.g.label(r.fvs[i]);
      out << '\n';
    }
  }
  if (!o.dot.empty()) {
    auto out = open_out(o.dot);
    write_dot(out, r.instance);
  }
  std::cout << summary.dump(2) << '\n';
  return kOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyOpts {
  std::string instance, cert;
  int max_width = 16;
  long brute_budget = 2'000'000;
};

VertexSet parse_vertex_line(const std::string& text, const Graph& g) {
  VertexSet out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto t = detail::tokens(detail::strip_comment(line));
    for (const auto& name : t) {
      auto v = g.find(name);
      if (!v) throw invalid_input("certificate names unknown vertex " + name);
      out.push_back(*v);
    }
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw invalid_input("certificate repeats a vertex");
  return out;
}

int cmd_verify(const VerifyOpts& o) {
  ListInstance inst = read_list_instance(o.instance);
  validate(inst);
  std::cout << "ok instance" << '\n';

  std::optional<std::vector<int>> cert_order;
  if (!o.cert.empty()) {
    std::string text = slurp(o.cert);
    if (text.find("# fvs") != std::string::npos) {
      VertexSet f = parse_vertex_line(text, inst.g);
      if (!is_forest_without(inst.g, f)) throw check_failed("fvs invalid: g minus the set has a cycle");
      auto td = fvs_to_tree_decomposition(inst.g, f);
      auto chk = validate_decomposition(inst.g, td);
      if (!chk.ok) throw check_failed("decomposition invalid: " + chk.failure);
      std::cout << "ok fvs size " << f.size() << '\n';
    } else {
      LayoutFile lf = parse_layout(text, inst.g);
      int w = layout_width(inst.g, lf.order);
      if (lf.declared_width && w > *lf.declared_width)
        throw check_failed("width mismatch: declared " + std::to_string(*lf.declared_width) + ", recomputed " +
                           std::to_string(w));
      std::cout << "ok layout width " << w << '\n';
      cert_order = lf.order;
    }
  }

  BcspInstance b = lhom_to_bcsp(inst);
  if (!cert_order || layout_width(inst.g, *cert_order) > layout_width(inst.g, greedy_layout(inst.g).order))
    cert_order = greedy_layout(inst.g).order;
  const auto& order = *cert_order;
  int width = layout_width(inst.g, order);
  if (width > o.max_width) {
    std::cout << "skipped engine cross-check (layout width " << width << ")" << '\n';
    return kOk;
  }
  std::optional<SolveResult> ref;
  try {
    ref = brute_force(b, std::min(o.brute_budget, caps().brute_nodes));
  } catch (const budget_exceeded&) {
    std::cout << "brute force over budget, comparing dp and repset only" << '\n';
  }
  SolveResult dp = layout_dp(b, order);
  SolveResult rs = repset_solve(b, order);
  auto word = [](bool s) { return s ? "SAT" : "UNSAT"; };
  bool expected = ref ? ref->satisfiable : dp.satisfiable;
  if (dp.satisfiable != expected || rs.satisfiable != expected)
    throw check_failed(std::string("engine divergence: brute ") + (ref ? word(ref->satisfiable) : "skipped") +
                       ", dp " + word(dp.satisfiable) + ", repset " + word(rs.satisfiable));
  for (const auto* r : {&dp, &rs})
    if (r->assignment && !satisfies(b, *r->assignment))
      throw check_failed("engine divergence: " + r->stats.engine + " returned a non-solution");
  if (rs.stats.bound_violations > 0)
    throw check_failed("bound violation: " + std::to_string(rs.stats.bound_violations) + " steps");
  std::cout << "ok engines agree (" << word(expected) << ")" << '\n';
  return kOk;
}

// ---- bench ----------------------------------------------------------------

struct BenchOpts {
  std::string dir;
  std::vector<std::string> engines{"brute", "dp", "repset"};
  long timeout_ms = 10000;
  std::uint64_t seed = 0;
};

int cmd_bench(const BenchOpts& o) {
  if (!fs::is_directory(o.dir)) throw invalid_input(o.dir + " is not a directory");
  for (const auto& e : o.engines)
    if (e != "brute" && e != "dp" && e != "repset" && e != "clean") throw invalid_input("unknown engine " + e);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.dir))
    if (entry.is_regular_file() && (entry.path().extension() == ".json" || entry.path().extension() == ".inst"))
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  json rows = json::array();
  for (const auto& path : files) {
    std::optional<ListInstance> inst;
    BcspInstance b;
    std::string load_error;
    try {
      std::string text = slurp(path.string());
      if (looks_like_json(text)) {
        b = bcsp_from_json(json::parse(text));
      } else {
        inst = parse_list_instance(text, path.parent_path().string());
        b = lhom_to_bcsp(*inst);
      }
    } catch (const std::exception& e) {
      load_error = e.what();
    }
    for (const auto& engine : o.engines) {
      json row{{"instance", path.filename().string()}, {"engine", engine}, {"seed", o.seed}};
      if (!load_error.empty()) {
        row["status"] = "error";
        row["error"] = load_error;
        rows.push_back(row);
        continue;
      }
      if (engine == "clean" && !inst) {
        row["status"] = "skipped";
        rows.push_back(row);
        continue;
      }
      auto t0 = Clock::now();
      try {
        Deadline dl = Deadline::after_ms(o.timeout_ms);
        Graph pg = primal_graph(b);
        SolveResult r;
        if (engine == "clean") {
          r = clean_repset_solve(*inst, choose_order(inst->g, "auto"), dl);
        } else {
          r = run_engine(b, engine, engine == "brute" ? std::vector<int>{} : choose_order(pg, "auto"), dl);
        }
        json s = stats_json(r.stats);
        s.erase("steps");
        row["status"] = "ok";
        row["satisfiable"] = r.satisfiable;
        row.update(s);
        double log2_bound = 0;
        for (const auto& st : r.stats.steps) log2_bound = std::max(log2_bound, st.log2_width_bound);
        row["log2_width_bound"] = log2_bound;
      } catch (const deadline_exceeded&) {
        row["status"] = "timeout";
      } catch (const budget_exceeded&) {
        row["status"] = "budget";
      } catch (const lhom_error& e) {
        row["status"] = "error";
        row["error"] = e.what();
      }
      row["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
      rows.push_back(row);
    }
  }
  std::cout << rows.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"List homomorphism solvers, invariants and reductions"};
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "Decide a list homomorphism or BCSP instance");
  solve->add_option("instance", so.input)->required()->check(CLI::ExistingFile);
  solve->add_option("--engine", so.engine)->check(CLI::IsMember({"brute", "dp", "repset", "clean"}));
  solve->add_option("--layout", so.layout, "file, exact, greedy or auto");
  solve->add_option("--seed", so.seed);
  solve->add_option("--stats", so.stats)->check(CLI::IsMember({"json"}));
  solve->add_option("--timeout-ms", so.timeout_ms, "give up after this many milliseconds (0: no limit)");
  solve->add_flag("--decide", so.decide, "exit 1 when unsatisfiable");

  std::string inv_path, inv_kind = "all";
  bool inv_star = false;
  auto* inv = app.add_subcommand("invariants", "Compute i, mim and gamma of a target graph");
  inv->add_option("graph", inv_path)->required()->check(CLI::ExistingFile);
  inv->add_option("--kind", inv_kind)->check(CLI::IsMember({"i", "mim", "gamma", "all"}));
  inv->add_flag("--star", inv_star);

  std::string lay_path;
  bool lay_exact = false, lay_greedy = false, lay_fvs = false;
  auto* lay = app.add_subcommand("layout", "Linear layout or feedback vertex set of a graph");
  lay->add_option("graph", lay_path)->required()->check(CLI::ExistingFile);
  auto* ex = lay->add_flag("--exact", lay_exact);
  lay->add_flag("--greedy", lay_greedy)->excludes(ex);
  lay->add_flag("--fvs", lay_fvs);

  ReduceOpts ro;
  auto* red = app.add_subcommand("reduce", "Reduce a DIMACS CNF to a list homomorphism instance");
  red->add_option("cnf", ro.cnf)->required()->check(CLI::ExistingFile);
  red->add_option("--target", ro.target)->required()->check(CLI::ExistingFile);
  red->add_option("--mode", ro.mode)->check(CLI::IsMember({"fvs", "ctw"}));
  red->add_option("--p", ro.p)->check(CLI::PositiveNumber);
  red->add_option("--g", ro.g)->check(CLI::Range(3, 64));
  red->add_option("--out", ro.out)->required();
  red->add_option("--cert", ro.cert);
  red->add_option("--dot", ro.dot);

  VerifyOpts vo;
  auto* ver = app.add_subcommand("verify", "Re-check an instance, a certificate and the engines");
  ver->add_option("instance", vo.instance)->required()->check(CLI::ExistingFile);
  ver->add_option("certificate", vo.cert)->check(CLI::ExistingFile);
  ver->add_option("--max-width", vo.max_width, "skip the engine cross-check above this layout width");
  ver->add_option("--brute-budget", vo.brute_budget, "search-node budget for the brute-force reference");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "Run engines over a directory of instances");
  bench->add_option("corpus", bo.dir)->required();
  bench->add_option("engines", bo.engines);
  bench->add_option("--timeout-ms", bo.timeout_ms);
  bench->add_option("--seed", bo.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(so);
    if (*inv) return cmd_invariants(inv_path, inv_kind, inv_star);
    if (*lay) return cmd_layout(lay_path, lay_exact ? "exact" : lay_greedy ? "greedy" : "auto", lay_fvs);
    if (*red) return cmd_reduce(ro);
    if (*ver) return cmd_verify(vo);
    if (*bench) return cmd_bench(bo);
  } catch (const check_failed& e) {
    std::cout << "FAILED " << e.what() << '\n';
    return kCheckFailed;
  } catch (const lhom_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
