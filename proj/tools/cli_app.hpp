#pragma once

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <optional>

#include "liftmap/cycles.hpp"
#include "liftmap/io.hpp"
#include "liftmap/lp.hpp"
#include "liftmap/mln.hpp"
#include "liftmap/mplp.hpp"
#include "liftmap/oracle.hpp"

namespace liftmap::cli {

using nlohmann::ordered_json;

struct Problem {
  Model model;
  Graph graph;
  double offset = 0.0;
  std::optional<Grounding> grounding;
};

inline bool has_suffix(const std::string& s, const std::string& suf) {
  return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

inline Problem load_problem(const std::string& path, int domain) {
  Problem p;
  if (has_suffix(path, ".mln")) {
    p.grounding = ground_mln(parse_mln(read_text_file(path)), domain);
    p.model = p.grounding->model;
    p.graph = p.grounding->graph;
    p.offset = p.grounding->offset;
  } else {
    if (domain > 0) throw ValidationError("--domain only applies to .mln inputs");
    p.model = load_model_file(path);
    p.graph = graph_structure(p.model);
  }
  return p;
}

// Orbit partitions driving the lifting, plus stabilizer partitions on demand
// (for cycle separation through a fixed variable).
struct Lifting {
  OrbitPartition vars, edges, arcs;
  int feature_orbit_count = 0;
  std::string group_order;
  std::function<std::array<OrbitPartition, 3>(int)> stabilizer;
};

inline std::string free_constant_factorial(const Grounding& g) {
  int free_count = 0;
  for (char c : g.in_d0)
    if (!c) ++free_count;
  BigCount n = BigCount::from(1);
  for (int k = 2; k <= free_count; ++k) n.mul(static_cast<uint64_t>(k));
  return n.str();
}

inline Lifting make_lifting(const Problem& p, const std::string& mode,
                            const std::string& symmetry) {
  Lifting out;
  const Model& m = p.model;
  const Graph& g = p.graph;
  if (mode == "ground" || symmetry == "none") {
    out.vars = OrbitPartition::discrete(g.num_nodes);
    out.edges = OrbitPartition::discrete(g.num_edges());
    out.arcs = OrbitPartition::discrete(2 * g.num_edges());
    out.feature_orbit_count = m.num_features();
    out.group_order = "1";
    out.stabilizer = [&g](int) -> std::array<OrbitPartition, 3> {
      return {OrbitPartition::discrete(g.num_nodes), OrbitPartition::discrete(g.num_edges()),
              OrbitPartition::discrete(2 * g.num_edges())};
    };
  } else if (symmetry == "graph") {
    SymmetrySummary sym = model_symmetry(m, g);
    out.vars = sym.var_orbits;
    out.edges = sym.edge_orbits;
    out.arcs = sym.arc_orbits;
    out.feature_orbit_count = sym.feature_orbits.num_cells();
    out.group_order = sym.gens.group_order.str();
    out.stabilizer = [&m, &g](int i) -> std::array<OrbitPartition, 3> {
      SymmetrySummary s = fixed_node_symmetry(m, g, i);
      return {s.var_orbits, s.edge_orbits, s.arc_orbits};
    };
  } else if (symmetry == "renaming") {
    if (!p.grounding)
      throw ValidationError("renaming symmetry needs an .mln input");
    const Grounding& gr = *p.grounding;
    RenamingOrbits ro = renaming_orbits(gr);
    out.vars = ro.var_orbits;
    out.edges = ro.edge_orbits;
    out.arcs = ro.arc_orbits;
    out.feature_orbit_count = ro.feature_orbits.num_cells();
    out.group_order = free_constant_factorial(gr);
    out.stabilizer = [&gr](int i) -> std::array<OrbitPartition, 3> {
      RenamingOrbits s = renaming_orbits_fixing(gr, i);
      return {s.var_orbits, s.edge_orbits, s.arc_orbits};
    };
  } else {
    throw ValidationError("unknown symmetry '" + symmetry + "'");
  }
  return out;
}

inline Separator build_separator(const Problem& p, const LiftedGraph& lg, const Lifting& lift) {
  Separator sep;
  for (const auto& orbit : lg.nodes) {
    auto [vs, es, as] = lift.stabilizer(orbit.rep);
    sep.views.push_back(make_fixed_view(p.graph, lg, vs, es, as, orbit.rep));
  }
  return sep;
}

struct SolveOpts {
  std::string input;
  std::string relaxation = "local";
  std::string mode = "lifted";
  std::string symmetry = "graph";
  std::string solver = "simplex";
  int domain = 0;
  int max_rounds = 500;
  double tol = 1e-7;
  std::string out_path;
};

inline ordered_json assignment_json(const std::vector<int>& states, const LiftedGraph& lg,
                                    int num_vars) {
  ordered_json arr = ordered_json::array();
  for (int v = 0; v < num_vars; ++v) arr.push_back(states[lg.node_orbit_of[v]]);
  return arr;
}

inline ordered_json run_solve(const SolveOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  Problem p = load_problem(o.input, o.domain);

  ordered_json res;
  res["command"] = "solve";
  res["input"] = o.input;
  res["relaxation"] = o.relaxation;
  res["mode"] = o.mode;
  res["symmetry"] = o.symmetry;
  res["solver"] = o.solver;
  if (p.grounding) {
    res["domain"] = p.grounding->domain_size;
    res["offset"] = p.offset;
  }
  res["num_vars"] = p.model.num_vars;
  res["num_edges"] = p.graph.num_edges();

  double objective = 0.0;
  if (o.relaxation == "exact") {
    oracle::ExactMap em = oracle::exact_map(p.model);
    objective = em.value;
    res["status"] = "optimal";
    res["objective"] = em.value;
    ordered_json arr = ordered_json::array();
    for (uint8_t b : em.argmax.front()) arr.push_back(static_cast<int>(b));
    res["assignment"] = arr;
  } else {
    Lifting lift = make_lifting(p, o.mode, o.symmetry);
    LiftedGraph lg = build_lifted_graph(p.graph, lift.vars, lift.edges, lift.arcs);
    OvercompleteParams theta = to_overcomplete(p.model, p.graph);
    LiftedParams lth = lift_parameters(theta, p.graph, lg);
    res["num_node_orbits"] = lg.num_node_orbits();
    res["num_edge_orbits"] = lg.num_edge_orbits();
    res["group_order"] = lift.group_order;

    if (o.solver == "mplp") {
      if (o.relaxation != "local")
        throw ValidationError("the mplp solver only handles the local relaxation");
      MplpOptions mo;
      mo.tol = o.tol;
      MplpResult mr = mplp_solve(lg, lth, mo);
      objective = mr.dual;
      res["status"] = mr.converged ? "optimal" : "iteration_limit";
      res["objective"] = mr.dual;
      res["decoded_score"] = mr.decoded_score;
      res["sweeps"] = mr.sweeps;
      res["assignment"] = assignment_json(mr.decoded, lg, p.model.num_vars);
      if (!mr.converged) throw Error("mplp did not converge within the sweep limit");
    } else if (o.relaxation == "local") {
      LinearProgram lp = lifted_local_lp(lg, lth);
      res["lp_vars"] = lp.num_vars();
      res["lp_rows"] = static_cast<int>(lp.equalities.size() + lp.geq.size());
      LPSolution sol = lp_solve(lp);
      if (sol.status != LPStatus::optimal)
        throw Error(std::string("lp solve ended with status ") + to_string(sol.status));
      objective = sol.objective;
      res["status"] = to_string(sol.status);
      res["objective"] = sol.objective;
      bool integral = true;
      for (double x : sol.x)
        if (std::fabs(x) > 1e-9 && std::fabs(x - 1.0) > 1e-9) integral = false;
      res["integral"] = integral;
    } else if (o.relaxation == "cycle") {
      LinearProgram lp = lifted_local_lp(lg, lth);
      Separator sep = build_separator(p, lg, lift);
      CutSolveOptions co;
      co.max_rounds = o.max_rounds;
      co.violation_tol = o.tol;
      CutSolveResult cr = cutting_plane_solve(std::move(lp), lg, sep, co);
      if (cr.solution.status != LPStatus::optimal)
        throw Error(std::string("lp solve ended with status ") + to_string(cr.solution.status));
      objective = cr.solution.objective;
      res["status"] = to_string(cr.solution.status);
      res["objective"] = cr.solution.objective;
      res["rounds"] = cr.rounds;
      res["cycle_converged"] = cr.converged;
      res["hit_round_limit"] = cr.hit_round_limit;
      res["repeated_cut"] = cr.repeated_cut;
      if (cr.negative_weights) res["negative_weights_clamped"] = true;
      res["lp_vars"] = cr.lp.num_vars();
      res["lp_rows"] = static_cast<int>(cr.lp.equalities.size() + cr.lp.geq.size());
      ordered_json trace = ordered_json::array();
      for (double v : cr.objective_trace) trace.push_back(v);
      res["trace"] = trace;
    } else {
      throw ValidationError("unknown relaxation '" + o.relaxation + "'");
    }
  }
  res["total"] = objective + p.offset;
  auto t1 = std::chrono::steady_clock::now();
  res["wall_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return res;
}

struct OrbitsOpts {
  std::string input;
  std::string symmetry = "graph";
  int domain = 0;
  bool cells = false;
  bool dump_grounding = false;
  std::string out_path;
};

inline ordered_json run_orbits(const OrbitsOpts& o) {
  auto t0 = std::chrono::steady_clock::now();
  Problem p = load_problem(o.input, o.domain);
  Lifting lift = make_lifting(p, "lifted", o.symmetry);
  LiftedGraph lg = build_lifted_graph(p.graph, lift.vars, lift.edges, lift.arcs);

  ordered_json res;
  res["command"] = "orbits";
  res["input"] = o.input;
  res["symmetry"] = o.symmetry;
  if (p.grounding) res["domain"] = p.grounding->domain_size;
  res["num_vars"] = p.model.num_vars;
  res["num_features"] = p.model.num_features();
  res["num_edges"] = p.graph.num_edges();
  res["group_order"] = lift.group_order;
  res["var_orbits"] = lift.vars.num_cells();
  res["feature_orbits"] = lift.feature_orbit_count;
  res["edge_orbits"] = lift.edges.num_cells();
  res["arc_orbits"] = lift.arcs.num_cells();
  int merged = 0;
  for (const auto& e : lg.edges)
    if (e.arc_merged) ++merged;
  res["merged_edge_orbits"] = merged;
  if (o.cells) {
    ordered_json vo = ordered_json::array();
    for (const auto& cell : lift.vars.cells) vo.push_back(cell);
    res["var_orbit_cells"] = vo;
    ordered_json eo = ordered_json::array();
    for (const auto& cell : lift.edges.cells) eo.push_back(cell);
    res["edge_orbit_cells"] = eo;
  }
  if (o.dump_grounding) {
    if (!p.grounding) throw ValidationError("--dump-grounding needs an .mln input");
    ordered_json atoms = ordered_json::array();
    for (int v = 0; v < p.model.num_vars; ++v) atoms.push_back(atom_name(*p.grounding, v));
    res["atoms"] = atoms;
    res["offset"] = p.offset;
    ordered_json feats = ordered_json::array();
    for (int j = 0; j < p.model.num_features(); ++j) {
      const auto& [fi, subst] = p.grounding->feature_origin[j];
      ordered_json f;
      f["formula"] = fi;
      f["subst"] = subst;
      f["scope"] = p.model.features[j].scope;
      f["weight"] = p.model.features[j].weight;
      feats.push_back(f);
    }
    res["features"] = feats;
  }
  auto t1 = std::chrono::steady_clock::now();
  res["wall_ms"] = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return res;
}

struct BenchOpts {
  std::string input;
  int domain = 0;
  int max_rounds = 500;
  std::string csv_path;
  std::string out_path;
};

inline ordered_json run_bench(const BenchOpts& o, std::string& csv) {
  ordered_json res;
  res["command"] = "bench";
  res["input"] = o.input;
  ordered_json configs = ordered_json::array();
  csv = "config,status,objective,total,wall_ms,lp_vars,lp_rows,rounds\n";

  auto one = [&](const std::string& name, const std::string& relaxation, const std::string& mode,
                 const std::string& symmetry) {
    SolveOpts so;
    so.input = o.input;
    so.domain = o.domain;
    so.relaxation = relaxation;
    so.mode = mode;
    so.symmetry = symmetry;
    so.max_rounds = o.max_rounds;
    ordered_json r;
    r["config"] = name;
    try {
      ordered_json sr = run_solve(so);
      r["status"] = sr["status"];
      r["objective"] = sr["objective"];
      r["total"] = sr["total"];
      r["wall_ms"] = sr["wall_ms"];
      if (sr.contains("lp_vars")) {
        r["lp_vars"] = sr["lp_vars"];
        r["lp_rows"] = sr["lp_rows"];
      }
      if (sr.contains("rounds")) r["rounds"] = sr["rounds"];
    } catch (const std::exception& ex) {
      r["status"] = std::string("error: ") + ex.what();
    }
    auto cell = [&](const char* key) {
      return r.contains(key) ? r[key].dump() : std::string();
    };
    csv += name + "," + (r.contains("status") ? r["status"].get<std::string>() : "") + "," +
           cell("objective") + "," + cell("total") + "," + cell("wall_ms") + "," +
           cell("lp_vars") + "," + cell("lp_rows") + "," + cell("rounds") + "\n";
    configs.push_back(r);
  };

  Problem probe = load_problem(o.input, o.domain);
  one("ground-local", "local", "ground", "none");
  one("lifted-local", "local", "lifted", "graph");
  one("ground-cycle", "cycle", "ground", "none");
  one("lifted-cycle", "cycle", "lifted", "graph");
  if (probe.grounding) one("renaming-cycle", "cycle", "lifted", "renaming");
  if (probe.model.num_vars <= 20) one("exact", "exact", "ground", "none");
  res["configs"] = configs;
  return res;
}

struct VerifyOpts {
  std::string input;
  int domain = 0;
};

inline int run_verify(const VerifyOpts& o, std::ostream& out) {
  Problem p = load_problem(o.input, o.domain);
  OvercompleteParams theta = to_overcomplete(p.model, p.graph);
  int fails = 0;
  auto check = [&](bool ok, const std::string& what) {
    out << (ok ? "ok:   " : "FAIL: ") << what << "\n";
    if (!ok) ++fails;
  };

  Lifting ground = make_lifting(p, "ground", "none");
  Lifting lifted = make_lifting(p, "lifted", "graph");
  LiftedGraph glg = build_lifted_graph(p.graph, ground.vars, ground.edges, ground.arcs);
  LiftedGraph llg = build_lifted_graph(p.graph, lifted.vars, lifted.edges, lifted.arcs);
  LiftedParams gth = lift_parameters(theta, p.graph, glg);
  LiftedParams lth = lift_parameters(theta, p.graph, llg);

  LPSolution gsol = lp_solve(lifted_local_lp(glg, gth));
  LPSolution lsol = lp_solve(lifted_local_lp(llg, lth));
  check(gsol.status == LPStatus::optimal && lsol.status == LPStatus::optimal,
        "local relaxations solve to optimality");
  check(std::fabs(gsol.objective - lsol.objective) <= 1e-6,
        "ground and lifted local optima agree");

  PseudoMarginal expanded = expand(lsol.x, llg, p.graph);
  LinearProgram groundlp = local_lp(p.graph, theta);
  check(max_constraint_violation(groundlp, expanded) <= 1e-7,
        "expanded lifted solution is feasible for the ground local polytope");

  CutSolveResult gc = cutting_plane_solve(lifted_local_lp(glg, gth), glg,
                                          build_separator(p, glg, ground), {});
  CutSolveResult lc = cutting_plane_solve(lifted_local_lp(llg, lth), llg,
                                          build_separator(p, llg, lifted), {});
  check(gc.converged && lc.converged, "cutting planes converge");
  check(std::fabs(gc.solution.objective - lc.solution.objective) <= 1e-5,
        "ground and lifted cycle optima agree");
  bool monotone = true;
  for (size_t i = 1; i < lc.objective_trace.size(); ++i)
    if (lc.objective_trace[i] > lc.objective_trace[i - 1] + 1e-7) monotone = false;
  check(monotone, "cycle objective trace is nonincreasing");

  MplpResult mr = mplp_solve(llg, lth);
  bool mpl_monotone = true;
  for (size_t i = 1; i < mr.dual_trace.size(); ++i)
    if (mr.dual_trace[i] > mr.dual_trace[i - 1] + 1e-9) mpl_monotone = false;
  check(mpl_monotone, "mplp dual trace is nonincreasing");
  check(mr.dual >= lsol.objective - 1e-6, "mplp dual bounds the local optimum");

  if (p.model.num_vars <= 20) {
    oracle::ExactMap em = oracle::exact_map(p.model);
    check(em.value <= lc.solution.objective + 1e-6, "cycle relaxation bounds the exact optimum");
    check(lc.solution.objective <= lsol.objective + 1e-6,
          "cycle relaxation is at least as tight as local");
  }
  out << (fails == 0 ? "verified" : "verification failed") << ": " << fails << " failure(s)\n";
  return fails;
}

inline void emit(const ordered_json& res, const std::string& out_path, std::ostream& out) {
  std::string text = res.dump(2);
  out << text << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write " + out_path);
    f << text << "\n";
  }
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"MAP inference with symmetry lifting over binary pairwise models"};
  app.require_subcommand(1);

  SolveOpts so;
  auto* solve = app.add_subcommand("solve", "solve a relaxation of one input");
  solve->add_option("input", so.input, "model .json or .mln file")->required();
  solve->add_option("--relaxation", so.relaxation, "local, cycle, or exact")
      ->check(CLI::IsMember({"local", "cycle", "exact"}));
  solve->add_option("--mode", so.mode, "ground or lifted")
      ->check(CLI::IsMember({"ground", "lifted"}));
  solve->add_option("--symmetry", so.symmetry, "graph, renaming, or none")
      ->check(CLI::IsMember({"graph", "renaming", "none"}));
  solve->add_option("--solver", so.solver, "simplex or mplp")
      ->check(CLI::IsMember({"simplex", "mplp"}));
  solve->add_option("--domain", so.domain, "domain size for .mln inputs");
  solve->add_option("--max-rounds", so.max_rounds, "cutting plane round limit");
  solve->add_option("--tol", so.tol, "violation / convergence tolerance");
  solve->add_option("--out", so.out_path, "also write the result JSON here");

  OrbitsOpts oo;
  auto* orbits = app.add_subcommand("orbits", "report symmetry orbits of one input");
  orbits->add_option("input", oo.input, "model .json or .mln file")->required();
  orbits->add_option("--symmetry", oo.symmetry, "graph, renaming, or none")
      ->check(CLI::IsMember({"graph", "renaming", "none"}));
  orbits->add_option("--domain", oo.domain, "domain size for .mln inputs");
  orbits->add_flag("--cells", oo.cells, "include full orbit cells");
  orbits->add_flag("--dump-grounding", oo.dump_grounding, "include ground atoms and features");
  orbits->add_option("--out", oo.out_path, "also write the result JSON here");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "compare solve configurations on one input");
  bench->add_option("input", bo.input, "model .json or .mln file")->required();
  bench->add_option("--domain", bo.domain, "domain size for .mln inputs");
  bench->add_option("--max-rounds", bo.max_rounds, "cutting plane round limit");
  bench->add_option("--csv", bo.csv_path, "write a CSV summary here");
  bench->add_option("--out", bo.out_path, "also write the result JSON here");

  VerifyOpts vo;
  auto* verify = app.add_subcommand("verify", "cross-check the solvers on one input");
  verify->add_option("input", vo.input, "model .json or .mln file")->required();
  verify->add_option("--domain", vo.domain, "domain size for .mln inputs");

  std::vector<const char*> argv;
  static const char* prog = "liftmap";
  argv.push_back(prog);
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (solve->parsed()) {
      emit(run_solve(so), so.out_path, out);
    } else if (orbits->parsed()) {
      emit(run_orbits(oo), oo.out_path, out);
    } else if (bench->parsed()) {
      std::string csv;
      ordered_json res = run_bench(bo, csv);
      emit(res, bo.out_path, out);
      if (!bo.csv_path.empty()) {
        std::ofstream f(bo.csv_path);
        if (!f) throw Error("cannot write " + bo.csv_path);
        f << csv;
      }
    } else if (verify->parsed()) {
      return run_verify(vo, out);
    }
  } catch (const std::exception& ex) {
    ordered_json e;
    e["error"] = ex.what();
    out << e.dump(2) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace liftmap::cli
