#include "liftgen/logic.hpp"

#include <array>
#include <functional>
#include <sstream>

namespace liftgen {

struct Formula::Node {
  Connective kind = Connective::Top;
  std::string predicate;
  std::vector<Term> args;
  Comparison cmp = Comparison::Eq;
  long bound = 0;
  Var var = Var::X;
  CountMode mode = CountMode::Exactly;
  int k = 0;
  std::vector<Formula> children;
};

bool compare(long lhs, Comparison cmp, long rhs) {
  switch (cmp) {
    case Comparison::Eq: return lhs == rhs;
    case Comparison::Le: return lhs <= rhs;
    case Comparison::Ge: return lhs >= rhs;
    case Comparison::Lt: return lhs < rhs;
    case Comparison::Gt: return lhs > rhs;
  }
  return false;
}

const char* comparison_symbol(Comparison cmp) {
  switch (cmp) {
    case Comparison::Eq: return "=";
    case Comparison::Le: return "<=";
    case Comparison::Ge: return ">=";
    case Comparison::Lt: return "<";
    case Comparison::Gt: return ">";
  }
  return "?";
}

Formula::Formula() : Formula(top()) {}

Formula Formula::top() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Connective::Top;
    return std::shared_ptr<const Node>(n);
  }();
  return Formula(node);
}

Formula Formula::bottom() {
  static const auto node = [] {
    auto n = std::make_shared<Node>();
    n->kind = Connective::Bottom;
    return std::shared_ptr<const Node>(n);
  }();
  return Formula(node);
}

Formula Formula::atom(std::string predicate, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Atom;
  n->predicate = std::move(predicate);
  n->args = std::move(args);
  return Formula(n);
}

Formula Formula::cardinality(std::string predicate, Comparison cmp, long bound) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Cardinality;
  n->predicate = std::move(predicate);
  n->cmp = cmp;
  n->bound = bound;
  return Formula(n);
}

Formula Formula::negation(Formula f) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Not;
  n->children.push_back(std::move(f));
  return Formula(n);
}

Formula Formula::conjunction(std::vector<Formula> parts) {
  if (parts.empty()) return top();
  if (parts.size() == 1) return parts.front();
  auto n = std::make_shared<Node>();
  n->kind = Connective::And;
  n->children = std::move(parts);
  return Formula(n);
}

Formula Formula::disjunction(std::vector<Formula> parts) {
  if (parts.empty()) return bottom();
  if (parts.size() == 1) return parts.front();
  auto n = std::make_shared<Node>();
  n->kind = Connective::Or;
  n->children = std::move(parts);
  return Formula(n);
}

Formula Formula::implies(Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Implies;
  n->children = {std::move(lhs), std::move(rhs)};
  return Formula(n);
}

Formula Formula::iff(Formula lhs, Formula rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Iff;
  n->children = {std::move(lhs), std::move(rhs)};
  return Formula(n);
}

Formula Formula::forall(Var v, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Forall;
  n->var = v;
  n->children.push_back(std::move(body));
  return Formula(n);
}

Formula Formula::exists(Var v, Formula body) {
  auto n = std::make_shared<Node>();
  n->kind = Connective::Exists;
  n->var = v;
  n->children.push_back(std::move(body));
  return Formula(n);
}

Formula Formula::counting(Var v, CountMode mode, int k, Formula body) {
  if (k < 0) throw Error("counting quantifier parameter must be non-negative");
  auto n = std::make_shared<Node>();
  n->kind = Connective::Counting;
  n->var = v;
  n->mode = mode;
  n->k = k;
  n->children.push_back(std::move(body));
  return Formula(n);
}

Connective Formula::kind() const { return node_->kind; }
const std::string& Formula::predicate() const { return node_->predicate; }
const std::vector<Term>& Formula::args() const { return node_->args; }
Comparison Formula::comparison() const { return node_->cmp; }
long Formula::bound() const { return node_->bound; }
Var Formula::variable() const { return node_->var; }
CountMode Formula::mode() const { return node_->mode; }
int Formula::count() const { return node_->k; }
const std::vector<Formula>& Formula::children() const { return node_->children; }

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Connective::Top:
    case Connective::Bottom:
      return true;
    case Connective::Atom:
      return x.predicate == y.predicate && x.args == y.args;
    case Connective::Cardinality:
      return x.predicate == y.predicate && x.cmp == y.cmp && x.bound == y.bound;
    case Connective::Forall:
    case Connective::Exists:
      if (x.var != y.var) return false;
      break;
    case Connective::Counting:
      if (x.var != y.var || x.mode != y.mode || x.k != y.k) return false;
      break;
    default:
      break;
  }
  return x.children == y.children;
}

// ---------------------------------------------------------------------------
// Vocabulary

void Vocabulary::add(const std::string& name, int arity) {
  if (arity < 0 || arity > 2)
    throw Error("predicate " + name + " has unsupported arity " + std::to_string(arity));
  auto [it, inserted] = arity_.emplace(name, arity);
  if (!inserted && it->second != arity)
    throw Error("predicate " + name + " used with arities " + std::to_string(it->second) +
                " and " + std::to_string(arity));
}

int Vocabulary::arity(const std::string& name) const {
  auto it = arity_.find(name);
  if (it == arity_.end()) throw Error("unknown predicate " + name);
  return it->second;
}

void Vocabulary::merge(const Vocabulary& other) {
  for (const auto& [name, arity] : other) add(name, arity);
}

Vocabulary Vocabulary::restricted_to(const std::vector<std::string>& names) const {
  Vocabulary out;
  for (const auto& n : names) out.add(n, arity(n));
  return out;
}

namespace {

void walk(const Formula& f, const std::function<void(const Formula&)>& fn) {
  fn(f);
  for (const auto& c : f.children()) walk(c, fn);
}

}  // namespace

Vocabulary vocabulary_of(const Formula& f) {
  Vocabulary v;
  walk(f, [&](const Formula& g) {
    if (g.kind() == Connective::Atom) v.add(g.predicate(), static_cast<int>(g.args().size()));
  });
  return v;
}

std::set<std::string> cardinality_predicates(const Formula& f) {
  std::set<std::string> out;
  walk(f, [&](const Formula& g) {
    if (g.kind() == Connective::Cardinality) out.insert(g.predicate());
  });
  return out;
}

unsigned free_variables(const Formula& f) {
  switch (f.kind()) {
    case Connective::Atom: {
      unsigned m = 0;
      for (const auto& t : f.args())
        if (t.is_variable()) m |= 1u << static_cast<int>(t.var());
      return m;
    }
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting:
      return free_variables(f.child(0)) & ~(1u << static_cast<int>(f.variable()));
    default: {
      unsigned m = 0;
      for (const auto& c : f.children()) m |= free_variables(c);
      return m;
    }
  }
}

bool has_quantifier(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& g) {
    auto k = g.kind();
    if (k == Connective::Forall || k == Connective::Exists || k == Connective::Counting)
      found = true;
  });
  return found;
}

bool has_counting(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& g) { found |= g.kind() == Connective::Counting; });
  return found;
}

bool has_cardinality(const Formula& f) {
  bool found = false;
  walk(f, [&](const Formula& g) { found |= g.kind() == Connective::Cardinality; });
  return found;
}

namespace {

Formula rebuild(const Formula& f, std::vector<Formula> children) {
  switch (f.kind()) {
    case Connective::Not: return Formula::negation(std::move(children[0]));
    case Connective::And: return Formula::conjunction(std::move(children));
    case Connective::Or: return Formula::disjunction(std::move(children));
    case Connective::Implies: return Formula::implies(std::move(children[0]), std::move(children[1]));
    case Connective::Iff: return Formula::iff(std::move(children[0]), std::move(children[1]));
    case Connective::Forall: return Formula::forall(f.variable(), std::move(children[0]));
    case Connective::Exists: return Formula::exists(f.variable(), std::move(children[0]));
    case Connective::Counting:
      return Formula::counting(f.variable(), f.mode(), f.count(), std::move(children[0]));
    default: return f;
  }
}

}  // namespace

Formula substitute(const Formula& f, Var v, Term t) {
  switch (f.kind()) {
    case Connective::Atom: {
      auto args = f.args();
      bool changed = false;
      for (auto& a : args)
        if (a.is_variable() && a.var() == v) {
          a = t;
          changed = true;
        }
      return changed ? Formula::atom(f.predicate(), std::move(args)) : f;
    }
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting:
      if (f.variable() == v) return f;
      [[fallthrough]];
    default: {
      if (f.children().empty()) return f;
      std::vector<Formula> ch;
      for (const auto& c : f.children()) ch.push_back(substitute(c, v, t));
      return rebuild(f, std::move(ch));
    }
  }
}

Formula swap_variables(const Formula& f) {
  switch (f.kind()) {
    case Connective::Atom: {
      auto args = f.args();
      for (auto& a : args)
        if (a.is_variable()) a = Term::variable(other(a.var()));
      return Formula::atom(f.predicate(), std::move(args));
    }
    case Connective::Forall:
      return Formula::forall(other(f.variable()), swap_variables(f.child(0)));
    case Connective::Exists:
      return Formula::exists(other(f.variable()), swap_variables(f.child(0)));
    case Connective::Counting:
      return Formula::counting(other(f.variable()), f.mode(), f.count(), swap_variables(f.child(0)));
    default: {
      if (f.children().empty()) return f;
      std::vector<Formula> ch;
      for (const auto& c : f.children()) ch.push_back(swap_variables(c));
      return rebuild(f, std::move(ch));
    }
  }
}

namespace {

Formula simplify_negation(const Formula& g) {
  if (g.is_top()) return Formula::bottom();
  if (g.is_bottom()) return Formula::top();
  if (g.kind() == Connective::Not) return g.child(0);
  return Formula::negation(g);
}

}  // namespace

Formula simplify(const Formula& f) {
  switch (f.kind()) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Atom:
    case Connective::Cardinality:
      return f;
    case Connective::Not:
      return simplify_negation(simplify(f.child(0)));
    case Connective::And:
    case Connective::Or: {
      const bool is_and = f.kind() == Connective::And;
      std::vector<Formula> parts;
      for (const auto& c : f.children()) {
        Formula s = simplify(c);
        if (is_and ? s.is_top() : s.is_bottom()) continue;
        if (is_and ? s.is_bottom() : s.is_top()) return s;
        if (s.kind() == f.kind()) {
          for (const auto& g : s.children()) parts.push_back(g);
        } else {
          parts.push_back(s);
        }
      }
      return is_and ? Formula::conjunction(std::move(parts)) : Formula::disjunction(std::move(parts));
    }
    case Connective::Implies: {
      Formula a = simplify(f.child(0));
      Formula b = simplify(f.child(1));
      if (a.is_bottom() || b.is_top()) return Formula::top();
      if (a.is_top()) return b;
      if (b.is_bottom()) return simplify_negation(a);
      return Formula::implies(a, b);
    }
    case Connective::Iff: {
      Formula a = simplify(f.child(0));
      Formula b = simplify(f.child(1));
      if (a.is_top()) return b;
      if (b.is_top()) return a;
      if (a.is_bottom()) return simplify_negation(b);
      if (b.is_bottom()) return simplify_negation(a);
      return Formula::iff(a, b);
    }
    case Connective::Forall:
    case Connective::Exists: {
      // Domains are non-empty, so quantifying a constant yields the constant.
      Formula b = simplify(f.child(0));
      if (b.is_top() || b.is_bottom()) return b;
      return rebuild(f, {b});
    }
    case Connective::Counting:
      return rebuild(f, {simplify(f.child(0))});
  }
  return f;
}

std::vector<Formula> conjuncts(const Formula& f) {
  std::vector<Formula> out;
  std::function<void(const Formula&)> go = [&](const Formula& g) {
    if (g.kind() == Connective::And) {
      for (const auto& c : g.children()) go(c);
    } else if (!g.is_top()) {
      out.push_back(g);
    }
  };
  go(f);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(Connective c) {
  switch (c) {
    case Connective::Iff: return 1;
    case Connective::Implies: return 2;
    case Connective::Or: return 3;
    case Connective::And: return 4;
    case Connective::Not: return 5;
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting: return 0;
    default: return 6;
  }
}

std::string term_string(const Term& t) {
  if (t.is_variable()) return std::string(1, var_name(t.var()));
  return std::to_string(t.element());
}

void print(std::ostream& os, const Formula& f, int context) {
  const int p = precedence(f.kind());
  // Quantifier bodies extend to the right, so they need parentheses anywhere
  // except at the top or directly under another quantifier.
  const bool wrap = f.children().empty() ? false : (p == 0 ? context > 0 : p < context);
  if (wrap) os << '(';
  switch (f.kind()) {
    case Connective::Top: os << "true"; break;
    case Connective::Bottom: os << "false"; break;
    case Connective::Atom: {
      os << f.predicate() << '(';
      for (std::size_t i = 0; i < f.args().size(); ++i) {
        if (i) os << ',';
        os << term_string(f.args()[i]);
      }
      os << ')';
      break;
    }
    case Connective::Cardinality:
      os << '|' << f.predicate() << "| " << comparison_symbol(f.comparison()) << ' ' << f.bound();
      break;
    case Connective::Not:
      os << '~';
      print(os, f.child(0), 5);
      break;
    case Connective::And:
    case Connective::Or: {
      const char* sep = f.kind() == Connective::And ? " & " : " | ";
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) os << sep;
        print(os, f.child(i), p + 1);
      }
      break;
    }
    case Connective::Implies:
      print(os, f.child(0), p + 1);
      os << " -> ";
      print(os, f.child(1), p);
      break;
    case Connective::Iff:
      print(os, f.child(0), p + 1);
      os << " <-> ";
      print(os, f.child(1), p + 1);
      break;
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting: {
      if (f.kind() == Connective::Forall) {
        os << "forall ";
      } else if (f.kind() == Connective::Exists) {
        os << "exists ";
      } else {
        const char* m = f.mode() == CountMode::Exactly ? "=" : f.mode() == CountMode::AtMost ? "<=" : ">=";
        os << "exists[" << m << f.count() << "] ";
      }
      os << var_name(f.variable()) << ": ";
      print(os, f.child(0), 0);
      break;
    }
  }
  if (wrap) os << ')';
}

}  // namespace

std::string to_string(const Formula& f) {
  std::ostringstream os;
  print(os, f, 0);
  return os.str();
}

std::string to_string(const GroundAtom& a) {
  std::string s = a.predicate + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(a.args[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Models and grounding

long Model::count(const std::string& predicate) const {
  auto it = true_atoms.lower_bound(GroundAtom{predicate, {}});
  long c = 0;
  for (; it != true_atoms.end() && it->predicate == predicate; ++it) ++c;
  return c;
}

Model Model::restricted_to(const std::vector<std::string>& predicates) const {
  Model m;
  m.vocabulary = vocabulary.restricted_to(predicates);
  m.domain_size = domain_size;
  for (const auto& a : true_atoms)
    if (m.vocabulary.contains(a.predicate)) m.true_atoms.insert(a);
  return m;
}

std::vector<GroundAtom> ground_atoms(const Vocabulary& vocab, int n) {
  std::vector<GroundAtom> out;
  for (const auto& [name, arity] : vocab) {
    if (arity == 0) {
      out.push_back({name, {}});
    } else if (arity == 1) {
      for (int i = 1; i <= n; ++i) out.push_back({name, {i}});
    } else {
      for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) out.push_back({name, {i, j}});
    }
  }
  return out;
}

namespace {

using Env = std::array<int, 2>;  // 0 = unbound

Formula ground_rec(const Formula& f, int n, Env env);

// Exact-count expansion: disjunction over k-subsets S of "body holds exactly on S".
Formula ground_exactly(const std::vector<Formula>& instances, int k) {
  const int n = static_cast<int>(instances.size());
  if (k > n) return Formula::bottom();
  std::vector<Formula> options;
  std::vector<int> pick(k);
  for (int i = 0; i < k; ++i) pick[i] = i;
  while (true) {
    std::vector<Formula> parts;
    int j = 0;
    for (int e = 0; e < n; ++e) {
      if (j < k && pick[j] == e) {
        parts.push_back(instances[e]);
        ++j;
      } else {
        parts.push_back(Formula::negation(instances[e]));
      }
    }
    options.push_back(Formula::conjunction(std::move(parts)));
    int i = k - 1;
    while (i >= 0 && pick[i] == n - k + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int l = i + 1; l < k; ++l) pick[l] = pick[l - 1] + 1;
  }
  return Formula::disjunction(std::move(options));
}

Formula ground_rec(const Formula& f, int n, Env env) {
  switch (f.kind()) {
    case Connective::Top:
    case Connective::Bottom:
    case Connective::Cardinality:
      return f;
    case Connective::Atom: {
      std::vector<Term> args;
      for (const auto& t : f.args()) {
        if (!t.is_variable()) {
          args.push_back(t);
          continue;
        }
        int e = env[static_cast<int>(t.var())];
        if (e == 0) throw Error("free variables: " + std::string(1, var_name(t.var())) + " is unbound");
        args.push_back(Term::element(e));
      }
      return Formula::atom(f.predicate(), std::move(args));
    }
    case Connective::Forall:
    case Connective::Exists:
    case Connective::Counting: {
      std::vector<Formula> inst;
      for (int e = 1; e <= n; ++e) {
        Env inner = env;
        inner[static_cast<int>(f.variable())] = e;
        inst.push_back(ground_rec(f.child(0), n, inner));
      }
      if (f.kind() == Connective::Forall) return Formula::conjunction(std::move(inst));
      if (f.kind() == Connective::Exists) return Formula::disjunction(std::move(inst));
      const int k = f.count();
      switch (f.mode()) {
        case CountMode::Exactly:
          return ground_exactly(inst, k);
        case CountMode::AtMost: {
          std::vector<Formula> opts;
          for (int i = 0; i <= std::min(k, n); ++i) opts.push_back(ground_exactly(inst, i));
          return Formula::disjunction(std::move(opts));
        }
        case CountMode::AtLeast: {
          if (k == 0) return Formula::top();
          std::vector<Formula> opts;
          for (int i = k; i <= n; ++i) opts.push_back(ground_exactly(inst, i));
          return Formula::disjunction(std::move(opts));
        }
      }
      return Formula::bottom();
    }
    default: {
      std::vector<Formula> ch;
      for (const auto& c : f.children()) ch.push_back(ground_rec(c, n, env));
      return rebuild(f, std::move(ch));
    }
  }
}

}  // namespace

Formula ground(const Formula& sentence, int domain_size) {
  if (domain_size < 1) throw Error("domain size must be positive");
  return ground_rec(sentence, domain_size, Env{0, 0});
}

bool evaluate(const Model& model, const Formula& g) {
  switch (g.kind()) {
    case Connective::Top: return true;
    case Connective::Bottom: return false;
    case Connective::Atom: {
      if (!model.vocabulary.contains(g.predicate()))
        throw Error("atom over unknown predicate " + g.predicate());
      GroundAtom a{g.predicate(), {}};
      for (const auto& t : g.args()) {
        if (t.is_variable()) throw Error("evaluate expects a ground formula");
        a.args.push_back(t.element());
      }
      return model.holds(a);
    }
    case Connective::Cardinality:
      if (!model.vocabulary.contains(g.predicate()))
        throw Error("cardinality atom over unknown predicate " + g.predicate());
      return compare(model.count(g.predicate()), g.comparison(), g.bound());
    case Connective::Not: return !evaluate(model, g.child(0));
    case Connective::And:
      for (const auto& c : g.children())
        if (!evaluate(model, c)) return false;
      return true;
    case Connective::Or:
      for (const auto& c : g.children())
        if (evaluate(model, c)) return true;
      return false;
    case Connective::Implies: return !evaluate(model, g.child(0)) || evaluate(model, g.child(1));
    case Connective::Iff: return evaluate(model, g.child(0)) == evaluate(model, g.child(1));
    default: throw Error("evaluate expects a quantifier-free formula");
  }
}

}  // namespace liftgen
