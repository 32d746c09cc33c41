#include "liftmap/mln.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <map>
#include <set>

namespace liftmap {

int MLNProgram::pred_index(const std::string& name) const {
  for (size_t i = 0; i < pred_names.size(); ++i)
    if (pred_names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

constexpr int kMaxArity = 4;
constexpr int kMaxOpenAtoms = 16;       // table build cap per grounding
constexpr uint64_t kMaxGroundings = 5'000'000;

struct Cursor {
  const std::string& s;
  int line;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, line, static_cast<int>(pos) + 1);
  }
  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t' || s[pos] == '\r')) ++pos;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  bool peek_is(char c) {
    skip_ws();
    return pos < s.size() && s[pos] == c;
  }
  char peek() {
    skip_ws();
    return pos < s.size() ? s[pos] : '\0';
  }
  bool try_consume(const char* tok) {
    skip_ws();
    size_t len = std::strlen(tok);
    if (s.compare(pos, len, tok) == 0) {
      pos += len;
      return true;
    }
    return false;
  }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  std::string ident() {
    skip_ws();
    size_t start = pos;
    if (pos < s.size() && (std::isalpha(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) {
      ++pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
    }
    if (start == pos) fail("expected identifier");
    return s.substr(start, pos - start);
  }
  double number() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos += static_cast<size_t>(end - begin);
    return v;
  }
  long integer() {
    skip_ws();
    const char* begin = s.c_str() + pos;
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end == begin) fail("expected integer");
    pos += static_cast<size_t>(end - begin);
    return v;
  }
};

struct Parser {
  MLNProgram prog;
  std::map<std::string, int> pred_ids;
  std::map<std::string, int> const_ids;
  std::map<GroundAtom, std::pair<bool, int>> evidence_seen;  // value, line
  bool domain_set = false;

  int const_id(const std::string& name) {
    auto it = const_ids.try_emplace(name, static_cast<int>(prog.const_names.size())).first;
    if (it->second == static_cast<int>(prog.const_names.size())) prog.const_names.push_back(name);
    return it->second;
  }

  // lowercase (or '_') start means variable, uppercase means constant
  static bool is_const_name(const std::string& name) {
    return std::isupper(static_cast<unsigned char>(name[0]));
  }

  struct FormulaCtx {
    std::map<std::string, int> vars;
    std::vector<std::string> var_names;
    std::vector<int> var_cols;
    std::set<int> vars_in_atoms;
  };

  MLNTerm term(Cursor& cur, FormulaCtx& ctx, bool in_atom) {
    cur.skip_ws();
    int col = static_cast<int>(cur.pos) + 1;
    std::string name = cur.ident();
    if (is_const_name(name)) return {false, const_id(name)};
    auto it = ctx.vars.try_emplace(name, static_cast<int>(ctx.var_names.size())).first;
    if (it->second == static_cast<int>(ctx.var_names.size())) {
      ctx.var_names.push_back(name);
      ctx.var_cols.push_back(col);
    }
    if (in_atom) ctx.vars_in_atoms.insert(it->second);
    return {true, it->second};
  }

  MLNLiteral literal_body(Cursor& cur, FormulaCtx& ctx, bool negated, const std::string& name,
                          int name_col) {
    auto it = pred_ids.find(name);
    if (it == pred_ids.end())
      throw ParseError("unknown predicate '" + name + "'", cur.line, name_col);
    MLNLiteral lit;
    lit.negated = negated;
    lit.atom.pred = it->second;
    cur.expect('(');
    while (true) {
      lit.atom.args.push_back(term(cur, ctx, true));
      if (cur.try_consume(",")) continue;
      cur.expect(')');
      break;
    }
    if (static_cast<int>(lit.atom.args.size()) != prog.pred_arity[lit.atom.pred])
      throw ParseError("predicate '" + name + "' expects " +
                           std::to_string(prog.pred_arity[lit.atom.pred]) + " arguments",
                       cur.line, name_col);
    return lit;
  }

  MLNLiteral literal(Cursor& cur, FormulaCtx& ctx) {
    bool negated = cur.try_consume("!");
    cur.skip_ws();
    int col = static_cast<int>(cur.pos) + 1;
    std::string name = cur.ident();
    return literal_body(cur, ctx, negated, name, col);
  }

  void parse_formula(Cursor& cur) {
    MLNFormula f;
    f.weight = cur.number();
    cur.expect(':');
    FormulaCtx ctx;

    struct Item {
      bool is_guard;
      MLNGuard g;
      MLNLiteral l;
    };
    std::vector<Item> items;
    while (true) {
      cur.skip_ws();
      if (cur.peek() == '!' && cur.pos + 1 < cur.s.size() && cur.s[cur.pos + 1] != '=') {
        cur.try_consume("!");
        cur.skip_ws();
        int col = static_cast<int>(cur.pos) + 1;
        std::string name = cur.ident();
        items.push_back({false, {}, literal_body(cur, ctx, true, name, col)});
      } else {
        int col = static_cast<int>(cur.pos) + 1;
        std::string name = cur.ident();
        if (cur.peek_is('(')) {
          items.push_back({false, {}, literal_body(cur, ctx, false, name, col)});
        } else if (cur.try_consume("!=")) {
          MLNGuard g;
          g.lhs = is_const_name(name)
                      ? MLNTerm{false, const_id(name)}
                      : [&] {
                          auto it = ctx.vars.try_emplace(name, static_cast<int>(ctx.var_names.size()))
                                        .first;
                          if (it->second == static_cast<int>(ctx.var_names.size())) {
                            ctx.var_names.push_back(name);
                            ctx.var_cols.push_back(col);
                          }
                          return MLNTerm{true, it->second};
                        }();
          g.rhs = term(cur, ctx, false);
          items.push_back({true, g, {}});
        } else {
          cur.fail("expected '(' or '!=' after '" + name + "'");
        }
      }
      if (cur.try_consume(",") || cur.try_consume("&")) continue;
      break;
    }

    if (cur.try_consume("<=>")) {
      if (items.size() != 1 || items[0].is_guard)
        cur.fail("'<=>' needs exactly one literal on each side");
      f.head = {items[0].l, literal(cur, ctx)};
      f.head_iff = true;
    } else if (cur.try_consume("=>")) {
      for (auto& it : items) {
        if (it.is_guard)
          f.guards.push_back(it.g);
        else
          f.body.push_back(it.l);
      }
      f.head.push_back(literal(cur, ctx));
      if (cur.try_consume("<=>")) {
        f.head.push_back(literal(cur, ctx));
        f.head_iff = true;
      }
    } else {
      if (items.size() != 1 || items[0].is_guard)
        cur.fail("expected '=>' before the consequent");
      f.head = {items[0].l};
    }
    if (!cur.done()) cur.fail("unexpected trailing input");

    f.num_vars = static_cast<int>(ctx.var_names.size());
    f.var_names = ctx.var_names;
    for (int v = 0; v < f.num_vars; ++v)
      if (!ctx.vars_in_atoms.count(v))
        throw ParseError("variable '" + ctx.var_names[v] + "' appears only in guards", cur.line,
                         ctx.var_cols[v]);
    prog.formulas.push_back(std::move(f));
  }

  void parse_line(Cursor& cur) {
    if (cur.done()) return;
    char c = cur.peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      parse_formula(cur);
      return;
    }
    int col = static_cast<int>(cur.pos) + 1;
    std::string word = cur.ident();
    if (word == "predicate") {
      cur.skip_ws();
      int ncol = static_cast<int>(cur.pos) + 1;
      std::string name = cur.ident();
      cur.expect('/');
      long arity = cur.integer();
      if (arity < 1 || arity > kMaxArity)
        throw ParseError("arity must be between 1 and " + std::to_string(kMaxArity), cur.line,
                         ncol);
      if (pred_ids.count(name))
        throw ParseError("duplicate predicate '" + name + "'", cur.line, ncol);
      pred_ids[name] = static_cast<int>(prog.pred_names.size());
      prog.pred_names.push_back(name);
      prog.pred_arity.push_back(static_cast<int>(arity));
      if (!cur.done()) cur.fail("unexpected trailing input");
    } else if (word == "domain") {
      long n = cur.integer();
      if (n < 1) cur.fail("domain size must be positive");
      if (domain_set) throw ParseError("duplicate domain line", cur.line, col);
      domain_set = true;
      prog.default_domain = static_cast<int>(n);
      if (!cur.done()) cur.fail("unexpected trailing input");
    } else if (word == "constants") {
      while (!cur.done()) {
        cur.skip_ws();
        int ncol = static_cast<int>(cur.pos) + 1;
        std::string name = cur.ident();
        if (!is_const_name(name))
          throw ParseError("constants must start with an uppercase letter", cur.line, ncol);
        const_id(name);
      }
    } else if (word == "evidence") {
      bool value = !cur.try_consume("!");
      cur.skip_ws();
      int ncol = static_cast<int>(cur.pos) + 1;
      std::string name = cur.ident();
      auto it = pred_ids.find(name);
      if (it == pred_ids.end())
        throw ParseError("unknown predicate '" + name + "'", cur.line, ncol);
      GroundAtom a;
      a.pred = it->second;
      cur.expect('(');
      while (true) {
        cur.skip_ws();
        int acol = static_cast<int>(cur.pos) + 1;
        std::string arg = cur.ident();
        if (!is_const_name(arg))
          throw ParseError("evidence arguments must be constants", cur.line, acol);
        a.args.push_back(const_id(arg));
        if (cur.try_consume(",")) continue;
        cur.expect(')');
        break;
      }
      if (static_cast<int>(a.args.size()) != prog.pred_arity[a.pred])
        throw ParseError("predicate '" + name + "' expects " +
                             std::to_string(prog.pred_arity[a.pred]) + " arguments",
                         cur.line, ncol);
      auto [sit, fresh] = evidence_seen.try_emplace(a, std::make_pair(value, cur.line));
      if (!fresh && sit->second.first != value)
        throw ParseError("evidence conflicts with line " + std::to_string(sit->second.second),
                         cur.line, ncol);
      if (fresh) prog.evidence.push_back({a.pred, a.args, value});
      if (!cur.done()) cur.fail("unexpected trailing input");
    } else {
      throw ParseError("unknown directive '" + word + "'", cur.line, col);
    }
  }
};

}  // namespace

MLNProgram parse_mln(const std::string& text) {
  Parser parser;
  int line = 1;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string raw = text.substr(start, end - start);
    // strip comments: '#' anywhere, or '//'
    size_t cut = raw.find('#');
    size_t slashes = raw.find("//");
    if (slashes != std::string::npos && (cut == std::string::npos || slashes < cut)) cut = slashes;
    if (cut != std::string::npos) raw.resize(cut);
    Cursor cur{raw, line};
    parser.parse_line(cur);
    if (end == text.size()) break;
    start = end + 1;
    ++line;
  }
  return parser.prog;
}

namespace {

int resolve(const MLNTerm& t, const std::vector<int>& subst) {
  return t.is_var ? subst[t.id] : t.id;
}

struct PendingFeature {
  std::vector<GroundAtom> atoms;  // 1 or 2, in first-occurrence order
  std::vector<double> table;      // indexed by sum of bit i << i over atoms
  int formula;
  std::vector<int> subst;
};

}  // namespace

Grounding ground_mln(const MLNProgram& prog, int domain_size) {
  int named = static_cast<int>(prog.const_names.size());
  // fall back to the Herbrand universe of named constants
  int ds = domain_size > 0 ? domain_size : (prog.default_domain > 0 ? prog.default_domain : named);
  if (ds <= 0) throw ValidationError("ground_mln: no domain size given");
  if (ds < named) throw ValidationError("ground_mln: domain smaller than the named constants");

  Grounding g;
  g.domain_size = ds;
  g.pred_names = prog.pred_names;
  g.const_names = prog.const_names;
  for (int i = named; i < ds; ++i) g.const_names.push_back("#" + std::to_string(i));
  g.in_d0.assign(ds, 0);
  for (int i = 0; i < named; ++i) g.in_d0[i] = 1;

  std::set<int> observed;
  std::map<GroundAtom, bool> ev;
  for (const auto& e : prog.evidence) {
    observed.insert(e.pred);
    ev[{e.pred, e.constants}] = e.value;
  }
  auto atom_truth = [&](const GroundAtom& a) {
    auto it = ev.find(a);
    return it != ev.end() && it->second;
  };

  std::vector<PendingFeature> pending;
  uint64_t work = 0;

  for (size_t fi = 0; fi < prog.formulas.size(); ++fi) {
    const MLNFormula& f = prog.formulas[fi];
    std::vector<int> subst(f.num_vars, 0);
    while (true) {
      if (++work > kMaxGroundings) throw BudgetError("ground_mln: too many groundings");

      bool alive = true;
      for (const auto& gd : f.guards)
        if (resolve(gd.lhs, subst) == resolve(gd.rhs, subst)) {
          alive = false;
          break;
        }
      if (alive) {
        struct GL {
          int local = -1;
          bool fixed = false;
          bool val = false;
          bool neg = false;
        };
        std::vector<GroundAtom> open;
        std::map<GroundAtom, int> open_idx;
        auto make_gl = [&](const MLNLiteral& lit) {
          GroundAtom a;
          a.pred = lit.atom.pred;
          for (const auto& t : lit.atom.args) a.args.push_back(resolve(t, subst));
          GL gl;
          gl.neg = lit.negated;
          if (observed.count(a.pred)) {
            gl.fixed = true;
            gl.val = atom_truth(a);
          } else {
            auto it = open_idx.try_emplace(a, static_cast<int>(open.size())).first;
            if (it->second == static_cast<int>(open.size())) open.push_back(a);
            gl.local = it->second;
          }
          return gl;
        };
        std::vector<GL> body, head;
        for (const auto& lit : f.body) body.push_back(make_gl(lit));
        for (const auto& lit : f.head) head.push_back(make_gl(lit));

        int k = static_cast<int>(open.size());
        if (k > kMaxOpenAtoms)
          throw ValidationError("ground_mln: a grounding touches too many open atoms");
        std::vector<double> table(size_t{1} << k);
        for (uint32_t mask = 0; mask < (uint32_t{1} << k); ++mask) {
          auto lit_val = [&](const GL& gl) {
            bool v = gl.fixed ? gl.val : ((mask >> gl.local) & 1u) != 0;
            return gl.neg ? !v : v;
          };
          bool body_true = true;
          for (const auto& gl : body)
            if (!lit_val(gl)) {
              body_true = false;
              break;
            }
          bool value = true;
          if (body_true)
            value = f.head_iff ? lit_val(head[0]) == lit_val(head[1]) : lit_val(head[0]);
          table[mask] = value ? 1.0 : 0.0;
        }

        // drop atoms the conditioned table no longer depends on
        bool changed = true;
        while (changed && k > 0) {
          changed = false;
          for (int a = 0; a < k; ++a) {
            bool depends = false;
            for (uint32_t mask = 0; mask < (uint32_t{1} << k) && !depends; ++mask)
              if (!((mask >> a) & 1u) && table[mask] != table[mask | (uint32_t{1} << a)])
                depends = true;
            if (depends) continue;
            std::vector<double> smaller(size_t{1} << (k - 1));
            for (uint32_t mask = 0; mask < (uint32_t{1} << k); ++mask)
              if (!((mask >> a) & 1u)) {
                uint32_t low = mask & ((uint32_t{1} << a) - 1);
                uint32_t high = (mask >> (a + 1)) << a;
                smaller[low | high] = table[mask];
              }
            table = std::move(smaller);
            open.erase(open.begin() + a);
            --k;
            changed = true;
            break;
          }
        }

        if (k == 0) {
          g.offset += f.weight * table[0];
        } else if (k <= 2) {
          pending.push_back({std::move(open), std::move(table), static_cast<int>(fi), subst});
        } else {
          throw ValidationError(
              "ground_mln: a grounding of formula " + std::to_string(fi + 1) +
              " still touches " + std::to_string(k) + " open atoms after conditioning");
        }
      }

      int pos = f.num_vars - 1;
      while (pos >= 0 && subst[pos] == ds - 1) subst[pos--] = 0;
      if (pos < 0) break;
      ++subst[pos];
    }
  }

  std::map<GroundAtom, int> universe;
  for (const auto& p : pending)
    for (const auto& a : p.atoms) universe.try_emplace(a, 0);
  int next = 0;
  for (auto& [atom, id] : universe) {
    id = next++;
    g.atoms.push_back(atom);
  }

  std::vector<Feature> features;
  for (auto& p : pending) {
    Feature ft;
    ft.weight = prog.formulas[p.formula].weight;
    ft.tie_cell = p.formula;
    if (p.atoms.size() == 1) {
      ft.scope = {universe[p.atoms[0]]};
      ft.table = {p.table[0], p.table[1]};
    } else {
      int i0 = universe[p.atoms[0]], i1 = universe[p.atoms[1]];
      // local table is indexed atom0 + 2*atom1; features want 2*t0 + t1
      ft.table = {p.table[0], p.table[2], p.table[1], p.table[3]};
      if (i0 > i1) {
        std::swap(i0, i1);
        std::swap(ft.table[1], ft.table[2]);
      }
      ft.scope = {i0, i1};
    }
    features.push_back(std::move(ft));
    g.feature_origin.push_back({p.formula, p.subst});
  }

  g.model = Model::make(static_cast<int>(universe.size()), std::move(features));
  g.graph = graph_structure(g.model);
  return g;
}

std::string atom_name(const Grounding& g, int var) {
  const GroundAtom& a = g.atoms[var];
  std::string s = g.pred_names[a.pred];
  s += '(';
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += g.const_names[a.args[i]];
  }
  s += ')';
  return s;
}

namespace {

void append_canon(std::string& out, const std::vector<int>& args, const std::vector<char>& fixed,
                  std::map<int, int>& ph) {
  out += '(';
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ',';
    int a = args[i];
    if (fixed[a]) {
      out += 'K';
      out += std::to_string(a);
    } else {
      auto it = ph.try_emplace(a, static_cast<int>(ph.size())).first;
      out += '*';
      out += std::to_string(it->second);
    }
  }
  out += ')';
}

std::string atom_key(const Grounding& g, int v, const std::vector<char>& fixed,
                     std::map<int, int>& ph) {
  std::string s = "p" + std::to_string(g.atoms[v].pred);
  append_canon(s, g.atoms[v].args, fixed, ph);
  return s;
}

OrbitPartition part_from_keys(const std::vector<std::string>& keys) {
  OrbitPartition p;
  p.rep.resize(keys.size());
  std::map<std::string, int> seen;
  for (size_t i = 0; i < keys.size(); ++i) {
    auto it = seen.try_emplace(keys[i], p.num_cells()).first;
    if (it->second == p.num_cells()) p.cells.emplace_back();
    p.rep[i] = it->second;
    p.cells[it->second].push_back(static_cast<int>(i));
  }
  for (const auto& cell : p.cells) p.sizes.push_back(static_cast<int>(cell.size()));
  return p;
}

RenamingOrbits orbits_with_fixed(const Grounding& g, const std::vector<char>& fixed) {
  RenamingOrbits out;
  int nv = g.model.num_vars;

  std::vector<std::string> var_keys(nv);
  for (int v = 0; v < nv; ++v) {
    std::map<int, int> ph;
    var_keys[v] = atom_key(g, v, fixed, ph);
  }
  out.var_orbits = part_from_keys(var_keys);

  std::vector<std::string> feat_keys(g.model.num_features());
  for (int j = 0; j < g.model.num_features(); ++j) {
    std::map<int, int> ph;
    std::string s = "f" + std::to_string(g.feature_origin[j].first);
    append_canon(s, g.feature_origin[j].second, fixed, ph);
    feat_keys[j] = std::move(s);
  }
  out.feature_orbits = part_from_keys(feat_keys);

  std::vector<std::string> arc_keys(2 * g.graph.num_edges());
  std::vector<std::string> edge_keys(g.graph.num_edges());
  for (int e = 0; e < g.graph.num_edges(); ++e) {
    auto [u, v] = g.graph.edges[e];
    std::map<int, int> ph1;
    std::string kuv = atom_key(g, u, fixed, ph1);
    kuv += '|';
    kuv += atom_key(g, v, fixed, ph1);
    std::map<int, int> ph2;
    std::string kvu = atom_key(g, v, fixed, ph2);
    kvu += '|';
    kvu += atom_key(g, u, fixed, ph2);
    edge_keys[e] = std::min(kuv, kvu);
    arc_keys[2 * e + 0] = std::move(kuv);
    arc_keys[2 * e + 1] = std::move(kvu);
  }
  out.edge_orbits = part_from_keys(edge_keys);
  out.arc_orbits = part_from_keys(arc_keys);
  return out;
}

}  // namespace

RenamingOrbits renaming_orbits(const Grounding& g) {
  return orbits_with_fixed(g, std::vector<char>(g.in_d0.begin(), g.in_d0.end()));
}

RenamingOrbits renaming_orbits_fixing(const Grounding& g, int var) {
  std::vector<char> fixed(g.in_d0.begin(), g.in_d0.end());
  for (int a : g.atoms[var].args) fixed[a] = 1;
  return orbits_with_fixed(g, fixed);
}

std::vector<Permutation> renaming_generators(const Grounding& g) {
  std::vector<int> free_ids;
  for (int i = 0; i < g.domain_size; ++i)
    if (!g.in_d0[i]) free_ids.push_back(i);

  int nv = g.model.num_vars, nf = g.model.num_features();
  std::map<GroundAtom, int> atom_idx;
  for (int v = 0; v < nv; ++v) atom_idx[g.atoms[v]] = v;
  std::map<std::pair<int, std::vector<int>>, int> feat_idx;
  for (int j = 0; j < nf; ++j) feat_idx[g.feature_origin[j]] = j;

  std::vector<Permutation> out;
  for (size_t i = 0; i + 1 < free_ids.size(); ++i) {
    int a = free_ids[i], b = free_ids[i + 1];
    auto rename = [&](int c) { return c == a ? b : (c == b ? a : c); };
    Permutation p = Permutation::identity(nv + nf);
    for (int v = 0; v < nv; ++v) {
      GroundAtom img = g.atoms[v];
      for (int& arg : img.args) arg = rename(arg);
      auto it = atom_idx.find(img);
      if (it == atom_idx.end()) throw Error("renaming image of an atom is not an open atom");
      p.image[v] = it->second;
    }
    for (int j = 0; j < nf; ++j) {
      auto key = g.feature_origin[j];
      for (int& c : key.second) c = rename(c);
      auto it = feat_idx.find(key);
      if (it == feat_idx.end()) throw Error("renaming image of a feature is missing");
      p.image[nv + j] = nv + it->second;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace liftmap
