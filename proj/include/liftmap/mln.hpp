#pragma once

#include <string>

#include "liftmap/autgroup.hpp"
#include "liftmap/model.hpp"

namespace liftmap {

// Term of a formula: lowercase identifiers are formula-local variables,
// uppercase ones name domain constants.
struct MLNTerm {
  bool is_var = false;
  int id = 0;
};

struct MLNAtomTemplate {
  int pred = -1;
  std::vector<MLNTerm> args;
};

struct MLNLiteral {
  MLNAtomTemplate atom;
  bool negated = false;
};

struct MLNGuard {
  MLNTerm lhs, rhs;  // lhs != rhs
};

struct MLNFormula {
  double weight = 0.0;
  std::vector<MLNGuard> guards;
  std::vector<MLNLiteral> body;  // conjunction
  std::vector<MLNLiteral> head;  // one literal, or two joined by <=>
  bool head_iff = false;
  int num_vars = 0;
  std::vector<std::string> var_names;
};

struct MLNEvidence {
  int pred = -1;
  std::vector<int> constants;
  bool value = true;
};

struct MLNProgram {
  std::vector<std::string> pred_names;
  std::vector<int> pred_arity;
  std::vector<std::string> const_names;  // named constants, in declaration order
  int default_domain = 0;
  std::vector<MLNFormula> formulas;
  std::vector<MLNEvidence> evidence;

  int pred_index(const std::string& name) const;
};

// Line-oriented input: predicate p/2, domain N, constants A B, evidence p(A,B),
// and weighted formulas "w: guard, literal, ... => literal [<=> literal]".
MLNProgram parse_mln(const std::string& text);

struct GroundAtom {
  int pred = -1;
  std::vector<int> args;
  auto operator<=>(const GroundAtom&) const = default;
};

struct Grounding {
  Model model;
  Graph graph;
  double offset = 0.0;  // weight mass already decided by the evidence
  std::vector<GroundAtom> atoms;  // index = model variable id
  std::vector<std::pair<int, std::vector<int>>> feature_origin;  // formula, substitution
  std::vector<std::string> const_names;  // full domain, named constants first
  std::vector<std::string> pred_names;
  std::vector<char> in_d0;  // constants that formulas or evidence name
  int domain_size = 0;
};

// Grounds over a domain of the given size (program default when 0). Evidence
// predicates are closed-world; groundings that the evidence decides are folded
// into the offset, and each surviving feature may touch at most two open atoms.
Grounding ground_mln(const MLNProgram& prog, int domain_size = 0);

std::string atom_name(const Grounding& g, int var);

struct RenamingOrbits {
  OrbitPartition var_orbits, feature_orbits, edge_orbits, arc_orbits;
};

// Orbits under domain permutations that fix every named constant, computed by
// canonical keys: unnamed constants become placeholders numbered by first
// occurrence, so two objects share a key iff some renaming maps one to the other.
RenamingOrbits renaming_orbits(const Grounding& g);
// Same, additionally fixing the constants of one ground atom (its stabilizer).
RenamingOrbits renaming_orbits_fixing(const Grounding& g, int var);

// Factor-graph vertex permutations induced by transposing adjacent unnamed
// constants; these generate the whole renaming group. For checking the
// canonical-key orbits against an explicit closure.
std::vector<Permutation> renaming_generators(const Grounding& g);

}  // namespace liftmap
