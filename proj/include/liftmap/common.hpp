#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftmap {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input data (malformed model, inconsistent tying, infeasible sizes).
struct ValidationError : Error {
  using Error::Error;
};

// Oracle asked to run past its hard budget.
struct BudgetError : Error {
  using Error::Error;
};

struct ParseError : Error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : Error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_), col(col_) {}
};

// One binary state per variable.
using Config = std::vector<uint8_t>;

inline Config config_from_bits(uint32_t bits, int n) {
  Config x(n);
  for (int v = 0; v < n; ++v) x[v] = (bits >> v) & 1u;
  return x;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);  // keep smallest index as root
    parent[b] = a;
    return true;
  }
  bool same(int a, int b) { return find(a) == find(b); }
};

}  // namespace liftmap
