#pragma once

#include <optional>

#include "liftmap/autgroup.hpp"
#include "liftmap/model.hpp"

// Slow reference implementations used only to check the real ones. They share
// no logic with the solvers: plain enumeration everywhere.
namespace liftmap::oracle {

struct ExactMap {
  double value = 0.0;
  std::vector<Config> argmax;  // configs attaining the maximum, capped at 64
};

ExactMap exact_map(const Model& m, int max_vars = 24);

struct BruteGroup {
  std::vector<Permutation> elements;  // every automorphism, identity included
  uint64_t order = 0;
  OrbitPartition orbits;
};

BruteGroup brute_automorphisms(const ColoredGraph& g, int max_vertices = 8);

struct ConfigOrbit {
  uint64_t size = 0;
  std::vector<double> centroid;  // mean feature-value vector over the orbit
};

// Orbits of {0,1}^n under the closure of the given variable permutations.
std::vector<ConfigOrbit> config_orbit_centroids(const Model& m,
                                                const std::vector<Permutation>& var_perms,
                                                int max_vars = 12);

struct BruteCut {
  double slack = 0.0;
  std::vector<int> edges;  // ground edge ids along the cycle
  std::vector<uint8_t> in_f;
};

// Most violated cycle inequality over all simple cycles, by enumeration.
// tau uses the ground LOCAL layout (2n node vars, then 00/11/01/10 per edge).
// Walks never beat simple cycles here: any closed walk splits into simple
// cycles, one of which inherits the odd switch count, and weights are >= 0.
std::optional<BruteCut> brute_separation(const Graph& g, const std::vector<double>& tau,
                                         int max_nodes = 10);

}  // namespace liftmap::oracle
