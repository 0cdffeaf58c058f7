#include "liftgen/wfomc.hpp"

#include <algorithm>
#include <type_traits>

namespace liftgen {

// ---------------------------------------------------------------------------
// Cardinality constraints

CardinalityConstraint::CardinalityConstraint(const Formula& f, const std::map<std::string, int>& var_of) {
  Formula s = simplify(f);
  if (s.is_top()) return;
  compile(s, var_of);
}

int CardinalityConstraint::compile(const Formula& f, const std::map<std::string, int>& var_of) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.op = f.kind();
  switch (f.kind()) {
    case Connective::Top:
    case Connective::Bottom:
      break;
    case Connective::Cardinality: {
      auto it = var_of.find(f.predicate());
      if (it == var_of.end()) throw Error("cardinality constraint on untracked predicate " + f.predicate());
      node.var = it->second;
      node.cmp = f.comparison();
      node.bound = f.bound();
      break;
    }
    case Connective::Not:
    case Connective::And:
    case Connective::Or:
    case Connective::Implies:
    case Connective::Iff:
      for (const auto& c : f.children()) node.children.push_back(compile(c, var_of));
      break;
    default:
      throw UnsupportedFragment("cardinality constraints may only combine |P| op q atoms");
  }
  nodes_[id] = std::move(node);
  return id;
}

bool CardinalityConstraint::eval(int i, const std::vector<long>& c) const {
  const Node& n = nodes_[i];
  switch (n.op) {
    case Connective::Top: return true;
    case Connective::Bottom: return false;
    case Connective::Cardinality: return compare(c[n.var], n.cmp, n.bound);
    case Connective::Not: return !eval(n.children[0], c);
    case Connective::And:
      for (int ch : n.children)
        if (!eval(ch, c)) return false;
      return true;
    case Connective::Or:
      for (int ch : n.children)
        if (eval(ch, c)) return true;
      return false;
    case Connective::Implies: return !eval(n.children[0], c) || eval(n.children[1], c);
    case Connective::Iff: return eval(n.children[0], c) == eval(n.children[1], c);
    default: return false;
  }
}

bool CardinalityConstraint::holds(const std::vector<long>& counts) const {
  return nodes_.empty() || eval(0, counts);
}

Truth CardinalityConstraint::eval3(int i, const std::vector<long>& fixed) const {
  const Node& n = nodes_[i];
  auto neg = [](Truth t) { return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True); };
  switch (n.op) {
    case Connective::Top: return Truth::True;
    case Connective::Bottom: return Truth::False;
    case Connective::Cardinality: {
      // The final count is fixed + (something ≥ 0). Only a bound already
      // exceeded decides the atom.
      if (fixed[n.var] <= n.bound) return Truth::Unknown;
      switch (n.cmp) {
        case Comparison::Eq:
        case Comparison::Le:
        case Comparison::Lt: return Truth::False;
        case Comparison::Ge:
        case Comparison::Gt: return Truth::True;
      }
      return Truth::Unknown;
    }
    case Connective::Not: return neg(eval3(n.children[0], fixed));
    case Connective::And: {
      Truth acc = Truth::True;
      for (int ch : n.children) {
        Truth t = eval3(ch, fixed);
        if (t == Truth::False) return t;
        if (t == Truth::Unknown) acc = t;
      }
      return acc;
    }
    case Connective::Or: {
      Truth acc = Truth::False;
      for (int ch : n.children) {
        Truth t = eval3(ch, fixed);
        if (t == Truth::True) return t;
        if (t == Truth::Unknown) acc = t;
      }
      return acc;
    }
    case Connective::Implies: {
      Truth a = neg(eval3(n.children[0], fixed));
      Truth b = eval3(n.children[1], fixed);
      if (a == Truth::True || b == Truth::True) return Truth::True;
      if (a == Truth::False && b == Truth::False) return Truth::False;
      return Truth::Unknown;
    }
    case Connective::Iff: {
      Truth a = eval3(n.children[0], fixed);
      Truth b = eval3(n.children[1], fixed);
      if (a == Truth::Unknown || b == Truth::Unknown) return Truth::Unknown;
      return a == b ? Truth::True : Truth::False;
    }
    default: return Truth::Unknown;
  }
}

bool CardinalityConstraint::feasible(const std::vector<long>& fixed) const {
  return nodes_.empty() || eval3(0, fixed) != Truth::False;
}

std::vector<long> CardinalityConstraint::max_bounds(int vars) const {
  std::vector<long> out(vars, -1);
  for (const auto& n : nodes_)
    if (n.op == Connective::Cardinality) out[n.var] = std::max(out[n.var], n.bound);
  return out;
}

// ---------------------------------------------------------------------------
// Value algebras: plain scaled integers, or polynomials in the tracked
// cardinalities.

namespace {

using Key = ExponentSpace::Key;

struct ScalarOps {
  using V = BigInt;
  static V one(const ExponentSpace*) { return 1; }
  static V zero(const ExponentSpace*) { return 0; }
  static V mono(const ExponentSpace*, const BigInt& c, Key) { return c; }
  static bool is_zero(const V& v) { return v == 0; }
  static V pow(const V& b, unsigned long e) {
    V r;
    mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
    return r;
  }
  static void mul(V& a, const V& b) { a *= b; }
  static void scale(V& a, const BigInt& c) { a *= c; }
  static void add(V& a, const V& b) { a += b; }
  static void neg(V& a) { mpz_neg(a.get_mpz_t(), a.get_mpz_t()); }
  static V type_pow(const ExponentSpace*, const BigInt& w, Key, unsigned long e) { return pow(w, e); }
};

struct PolyOps {
  using V = Polynomial;
  static V one(const ExponentSpace* s) { return Polynomial::constant(s, 1); }
  static V zero(const ExponentSpace* s) { return Polynomial(s); }
  static V mono(const ExponentSpace* s, const BigInt& c, Key k) { return Polynomial(s, c, k); }
  static bool is_zero(const V& v) { return v.is_zero(); }
  static V pow(const V& b, unsigned long e) { return b.pow(e); }
  static void mul(V& a, const V& b) { a = a * b; }
  static void scale(V& a, const BigInt& c) { a *= c; }
  static void add(V& a, const V& b) { a += b; }
  static void neg(V& a) { a *= BigInt(-1); }
  static V type_pow(const ExponentSpace* s, const BigInt& w, Key k, unsigned long e) {
    BigInt c;
    mpz_pow_ui(c.get_mpz_t(), w.get_mpz_t(), e);
    return Polynomial(s, std::move(c), s->times(k, e));
  }
};

template <class V>
using OpsFor = std::conditional_t<std::is_same_v<V, BigInt>, ScalarOps, PolyOps>;

std::vector<std::uint32_t> submasks(std::uint32_t block) {
  std::vector<std::uint32_t> out;
  std::uint32_t s = 0;
  do {
    out.push_back(s);
    s = (s - block) & block;
  } while (s != 0);
  return out;
}

BigInt lcm_den(const BigRational& a, const BigRational& b) {
  BigInt l;
  mpz_lcm(l.get_mpz_t(), a.get_den_mpz_t(), b.get_den_mpz_t());
  return l;
}

}  // namespace

template <class V>
struct CountingEngine::Caches {
  std::mutex mu;
  std::unordered_map<std::uint64_t, V> pair;
  std::map<std::vector<int>, V> cond;
};

template <class V>
CountingEngine::Caches<V>& CountingEngine::caches() const {
  if constexpr (std::is_same_v<V, BigInt>) {
    return *scalar_caches_;
  } else {
    return *poly_caches_;
  }
}

CountingEngine::~CountingEngine() = default;

CountingEngine::CountingEngine(LiftedProblem problem, EngineOptions options)
    : problem_(std::move(problem)),
      layout_(AtomLayout::of(problem_.vocabulary)),
      scalar_caches_(std::make_unique<Caches<BigInt>>()),
      poly_caches_(std::make_unique<Caches<Polynomial>>()) {
  const int n = problem_.domain_size;
  auto max_count = [&](const std::string& p) -> long {
    int ar = problem_.vocabulary.arity(p);
    return ar == 0 ? 1 : ar == 1 ? n : static_cast<long>(n) * n;
  };
  std::vector<std::string> order;
  for (const auto& p : options.tracked) {
    if (!problem_.vocabulary.contains(p)) throw Error("cannot track unknown predicate " + p);
    if (vars_.count(p)) continue;
    vars_[p] = static_cast<int>(order.size());
    order.push_back(p);
  }
  tracked_ = order;
  for (const auto& p : cardinality_predicates(problem_.cardinality)) {
    if (!problem_.vocabulary.contains(p)) throw Error("cardinality constraint on unknown predicate " + p);
    if (vars_.count(p)) continue;
    vars_[p] = static_cast<int>(order.size());
    order.push_back(p);
  }
  constraint_ = CardinalityConstraint(problem_.cardinality, vars_);
  std::vector<long> bounds = constraint_.max_bounds(static_cast<int>(order.size()));
  std::vector<unsigned> caps;
  for (std::size_t v = 0; v < order.size(); ++v) {
    long cap = max_count(order[v]);
    if (v >= tracked_.size()) cap = std::min(cap, std::max(0L, bounds[v] + 1));
    caps.push_back(static_cast<unsigned>(cap));
  }
  space_ = ExponentSpace(caps);
  symbolic_ = !order.empty();

  scale_ = 1;
  for (const auto& [name, arity] : problem_.vocabulary) {
    WeightPair w = problem_.weight(name);
    BigInt d = lcm_den(w.positive, w.negative);
    BigRational pos = w.positive * d, negw = w.negative * d;
    scaled_[name] = WeightPair{pos, negw};
    BigInt f;
    mpz_pow_ui(f.get_mpz_t(), d.get_mpz_t(), static_cast<unsigned long>(max_count(name)));
    scale_ *= f;
  }
  auto int_weight = [&](const std::string& p, bool value) -> BigInt {
    const WeightPair& w = scaled_.at(p);
    return BigInt(value ? w.positive.get_num() : w.negative.get_num());
  };

  if (layout_.nullary.size() > 8) throw UnsupportedFragment("too many nullary predicates");
  if (problem_.existentials.size() > 16) throw UnsupportedFragment("too many existential conjuncts");
  const std::uint32_t contexts = 1u << layout_.nullary.size();
  for (std::uint32_t bits = 0; bits < contexts; ++bits) {
    Context ctx;
    ctx.nullary = bits;
    ctx.weight = 1;
    ctx.offset.assign(order.size(), 0);
    std::map<std::string, bool> values;
    for (std::size_t i = 0; i < layout_.nullary.size(); ++i) {
      const std::string& p = layout_.nullary[i];
      const bool v = (bits >> i) & 1;
      values[p] = v;
      ctx.weight *= int_weight(p, v);
      if (v && vars_.count(p)) ctx.offset[vars_.at(p)] += 1;
    }
    ctx.psi = LocalFormula(problem_.matrix, layout_, values);
    for (const auto& phi : problem_.existentials) ctx.phis.emplace_back(phi, layout_, values);
    for (OneType t : valid_1types(layout_, ctx.psi)) {
      TypeInfo info;
      info.type = t;
      info.weight = 1;
      std::vector<unsigned long> exps(order.size(), 0);
      for (int i = 0; i < layout_.num_one_atoms(); ++i) {
        const bool v = (t.bits >> i) & 1;
        info.weight *= int_weight(layout_.one_atoms[i], v);
        auto it = vars_.find(layout_.one_atoms[i]);
        if (v && it != vars_.end()) exps[it->second] += 1;
      }
      info.key = space_.make(exps);
      for (std::size_t k = 0; k < ctx.phis.size(); ++k)
        if (!ctx.phis[k].holds_reflexive(t)) info.initial_block |= 1u << k;
      ctx.types.push_back(std::move(info));
    }
    if (ctx.types.size() >= 4096) throw UnsupportedFragment("too many valid 1-types");
    contexts_.push_back(std::move(ctx));
  }
}

int CountingEngine::var_of(const std::string& predicate) const {
  auto it = vars_.find(predicate);
  return it == vars_.end() ? -1 : it->second;
}

const std::vector<CountingEngine::TableInfo>& CountingEngine::tables(int a, int i, int j) const {
  std::lock_guard<std::mutex> lock(table_mu_);
  auto& slot = tables_[{a, i, j}];
  if (slot) return *slot;
  const Context& ctx = contexts_[a];
  const OneType ta = ctx.types[i].type, tb = ctx.types[j].type;
  auto out = std::make_unique<std::vector<TableInfo>>();
  for (TwoTable pi : coherent_tables(layout_, ctx.psi, ta, tb)) {
    TableInfo info;
    info.table = pi;
    info.weight = 1;
    std::vector<unsigned long> exps(space_.size(), 0);
    for (int r = 0; r < layout_.num_binary(); ++r) {
      const std::string& p = layout_.binary[r];
      const WeightPair& w = scaled_.at(p);
      const int var = var_of(p);
      for (int d = 0; d < 2; ++d) {
        const bool v = (pi.bits >> (2 * r + d)) & 1;
        info.weight *= v ? w.positive.get_num() : w.negative.get_num();
        if (v && var >= 0) exps[var] += 1;
      }
    }
    info.key = space_.make(exps);
    LocalAssignment s{ta.bits, ~0u, tb.bits, ~0u, pi.bits, ~0ull};
    for (std::size_t k = 0; k < ctx.phis.size(); ++k) {
      if (ctx.phis[k].eval(s) == Truth::True) info.forward |= 1u << k;
      if (ctx.phis[k].eval_swapped(s) == Truth::True) info.backward |= 1u << k;
    }
    out->push_back(std::move(info));
  }
  slot = std::move(out);
  return *slot;
}

template <class V>
V CountingEngine::pair_factor(int a, int i, std::uint32_t ti, int j, std::uint32_t tj) const {
  using Ops = OpsFor<V>;
  const std::uint64_t key = (static_cast<std::uint64_t>(a) << 56) | (static_cast<std::uint64_t>(i) << 44) |
                            (static_cast<std::uint64_t>(ti) << 28) | (static_cast<std::uint64_t>(j) << 16) |
                            static_cast<std::uint64_t>(tj);
  auto& c = caches<V>();
  {
    std::lock_guard<std::mutex> lock(c.mu);
    auto it = c.pair.find(key);
    if (it != c.pair.end()) return it->second;
  }
  V sum = Ops::zero(&space_);
  for (const auto& t : tables(a, i, j))
    if (!(t.forward & ti) && !(t.backward & tj)) Ops::add(sum, Ops::mono(&space_, t.weight, t.key));
  std::lock_guard<std::mutex> lock(c.mu);
  c.pair.emplace(key, sum);
  return sum;
}

namespace {

// Depth-first expansion of cells into Skolem-encoded extended types. Every
// element of a cell carries a subset T of its block whose obligations are
// replaced by "no witness anywhere" with sign (-1)^|T|.
template <class V, class Engine, class PairFn>
class Expander {
 public:
  using Ops = OpsFor<V>;
  struct Ext {
    int type;
    std::uint32_t t;
    int count;
  };

  Expander(const Engine& engine, int a, PairFn pair) : engine_(engine), a_(a), pair_(pair) {}

  template <class K>
  void cell(int type, std::uint32_t block, int count, const V& acc, K&& next) {
    if (count == 0) {
      next(acc);
      return;
    }
    const auto subs = submasks(block);
    split(type, subs, 0, count, acc, next);
  }

 private:
  template <class K>
  void split(int type, const std::vector<std::uint32_t>& subs, std::size_t s, int remaining, const V& acc, K& next) {
    if (remaining == 0) {
      next(acc);
      return;
    }
    const bool last = s + 1 == subs.size();
    for (int c = last ? remaining : 0; c <= remaining; ++c) {
      V f = acc;
      if (!last) Ops::scale(f, binomial(static_cast<unsigned>(remaining), static_cast<unsigned>(c)));
      const std::size_t mark = chosen_.size();
      if (c > 0) {
        const auto& info = engine_.context(a_).types[type];
        const std::uint32_t t = subs[s];
        Ops::mul(f, Ops::type_pow(&engine_.space(), info.weight, info.key, static_cast<unsigned long>(c)));
        if ((__builtin_popcount(t) * c) & 1) Ops::neg(f);
        if (c >= 2 && !Ops::is_zero(f)) {
          const unsigned long pairs = static_cast<unsigned long>(c) * (c - 1) / 2;
          Ops::mul(f, Ops::pow(pair_(type, t, type, t), pairs));
        }
        for (const Ext& g : chosen_) {
          if (Ops::is_zero(f)) break;
          Ops::mul(f, Ops::pow(pair_(g.type, g.t, type, t), static_cast<unsigned long>(g.count) * c));
        }
        chosen_.push_back(Ext{type, t, c});
      }
      if (!Ops::is_zero(f)) split(type, subs, s + 1, remaining - c, f, next);
      chosen_.resize(mark);
    }
  }

  const Engine& engine_;
  int a_;
  PairFn pair_;
  std::vector<Ext> chosen_;
};

}  // namespace

template <class V>
V CountingEngine::conditioned_impl(int a, const std::vector<Cell>& cells) const {
  using Ops = OpsFor<V>;
  std::vector<Cell> sorted;
  for (const auto& c : cells)
    if (c.count > 0) sorted.push_back(c);
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> key{a};
  for (const auto& c : sorted) {
    key.push_back(c.type);
    key.push_back(static_cast<int>(c.block));
    key.push_back(c.count);
  }
  auto& cache = caches<V>();
  {
    std::lock_guard<std::mutex> lock(cache.mu);
    auto it = cache.cond.find(key);
    if (it != cache.cond.end()) return it->second;
  }
  auto pair = [this, a](int i, std::uint32_t ti, int j, std::uint32_t tj) { return pair_factor<V>(a, i, ti, j, tj); };
  Expander<V, CountingEngine, decltype(pair)> ex(*this, a, pair);
  V total = Ops::zero(&space_);
  std::function<void(std::size_t, const V&)> go = [&](std::size_t ci, const V& acc) {
    if (ci == sorted.size()) {
      Ops::add(total, acc);
      return;
    }
    const Cell& c = sorted[ci];
    ex.cell(c.type, c.block & contexts_[a].types[c.type].initial_block, c.count, acc,
            [&](const V& v) { go(ci + 1, v); });
  };
  go(0, Ops::one(&space_));
  std::lock_guard<std::mutex> lock(cache.mu);
  cache.cond.emplace(std::move(key), total);
  return total;
}

template <class V>
V CountingEngine::context_sum(int a) const {
  using Ops = OpsFor<V>;
  const Context& ctx = contexts_[a];
  const int types = static_cast<int>(ctx.types.size());
  V total = Ops::zero(&space_);
  if (types == 0) return total;
  auto pair = [this, a](int i, std::uint32_t ti, int j, std::uint32_t tj) { return pair_factor<V>(a, i, ti, j, tj); };
  Expander<V, CountingEngine, decltype(pair)> ex(*this, a, pair);
  // Choose how many elements take each 1-type in turn; binomials over the
  // remaining elements multiply up to the multinomial of the configuration.
  std::function<void(int, int, const V&)> go = [&](int i, int remaining, const V& acc) {
    if (remaining == 0 || i == types) {
      if (remaining == 0) Ops::add(total, acc);
      return;
    }
    const bool last = i + 1 == types;
    for (int c = last ? remaining : 0; c <= remaining; ++c) {
      V f = acc;
      Ops::scale(f, binomial(static_cast<unsigned>(remaining), static_cast<unsigned>(c)));
      ex.cell(i, ctx.types[i].initial_block, c, f, [&](const V& v) { go(i + 1, remaining - c, v); });
    }
  };
  go(0, problem_.domain_size, Ops::one(&space_));
  return total;
}

Polynomial CountingEngine::conditioned_poly(int a, const std::vector<Cell>& cells) const {
  return conditioned_impl<Polynomial>(a, cells);
}

BigInt CountingEngine::conditioned_scalar(int a, const std::vector<Cell>& cells) const {
  return conditioned_impl<BigInt>(a, cells);
}

BigInt CountingEngine::extract(const Polynomial& p, const std::vector<long>& offset) const {
  BigInt sum = 0;
  std::vector<long> counts(space_.size());
  for (const auto& [key, coef] : p.terms()) {
    for (int v = 0; v < space_.size(); ++v) counts[v] = static_cast<long>(space_.get(key, v)) + offset[v];
    if (constraint_.holds(counts)) sum += coef;
  }
  return sum;
}

BigInt CountingEngine::conditioned(int a, const std::vector<Cell>& cells, const std::vector<long>& offset) const {
  if (!symbolic_) return conditioned_scalar(a, cells);
  return extract(conditioned_poly(a, cells), offset);
}

BigInt CountingEngine::context_total(int a) const {
  if (!symbolic_) return context_sum<BigInt>(a);
  return extract(context_sum<Polynomial>(a), contexts_[a].offset);
}

BigRational CountingEngine::count() const {
  BigInt total = 0;
  for (int a = 0; a < num_contexts(); ++a) {
    if (contexts_[a].weight == 0) continue;
    total += contexts_[a].weight * context_total(a);
  }
  if (total < 0) throw Error("internal error: negative model count");
  BigRational r(total, scale_);
  r.canonicalize();
  return r;
}

std::map<std::vector<long>, BigRational> CountingEngine::tracked_distribution() const {
  std::map<std::vector<long>, BigInt> acc;
  std::vector<long> counts(space_.size());
  for (int a = 0; a < num_contexts(); ++a) {
    const Context& ctx = contexts_[a];
    if (ctx.weight == 0) continue;
    Polynomial p = context_sum<Polynomial>(a);
    for (const auto& [key, coef] : p.terms()) {
      for (int v = 0; v < space_.size(); ++v) counts[v] = static_cast<long>(space_.get(key, v)) + ctx.offset[v];
      if (!constraint_.holds(counts)) continue;
      std::vector<long> tracked(counts.begin(), counts.begin() + static_cast<long>(tracked_.size()));
      acc[tracked] += coef * ctx.weight;
    }
  }
  std::map<std::vector<long>, BigRational> out;
  for (auto& [k, v] : acc) {
    if (v < 0) throw Error("internal error: negative model count");
    if (v == 0) continue;
    BigRational r(v, scale_);
    r.canonicalize();
    out.emplace(k, r);
  }
  return out;
}

// ---------------------------------------------------------------------------

BigRational weight_of(const std::vector<std::pair<GroundAtom, bool>>& literals, const Weighting& weights) {
  std::map<GroundAtom, bool> seen;
  BigRational w = 1;
  for (const auto& [atom, value] : literals) {
    auto [it, inserted] = seen.emplace(atom, value);
    if (!inserted) {
      if (it->second != value) throw Error("inconsistent literal set: " + to_string(atom));
      continue;
    }
    auto wi = weights.find(atom.predicate);
    if (wi == weights.end()) continue;
    w *= value ? wi->second.positive : wi->second.negative;
  }
  return w;
}

BigRational wfomc(const LiftedProblem& problem) {
  CountingEngine engine(problem);
  return engine.count() / problem.multiplicity;
}

BigRational wfomc(const Problem& problem) { return wfomc(compile(problem)); }

BigRational wfomc_conditioned(const CountingEngine& engine, const std::vector<CellType>& conditioning) {
  if (static_cast<int>(conditioning.size()) != engine.problem().domain_size)
    throw Error("conditioning must assign a cell to every element");
  BigInt total = 0;
  for (int a = 0; a < engine.num_contexts(); ++a) {
    const auto& ctx = engine.context(a);
    if (ctx.weight == 0) continue;
    std::map<std::pair<int, std::uint32_t>, int> groups;
    bool possible = true;
    for (const auto& c : conditioning) {
      auto it = std::find_if(ctx.types.begin(), ctx.types.end(),
                             [&](const auto& t) { return t.type == c.one_type; });
      if (it == ctx.types.end()) {
        possible = false;
        break;
      }
      const int idx = static_cast<int>(it - ctx.types.begin());
      ++groups[{idx, c.block.bits & it->initial_block}];
    }
    if (!possible) continue;
    std::vector<Cell> cells;
    for (const auto& [k, cnt] : groups) cells.push_back(Cell{k.first, k.second, cnt});
    total += ctx.weight * engine.conditioned(a, cells, ctx.offset);
  }
  BigRational r(total, engine.scale());
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Brute force

namespace {

struct GroundCircuit {
  struct Node {
    Connective op = Connective::Top;
    int atom = -1;  // Atom: position; Cardinality: predicate id
    Comparison cmp = Comparison::Eq;
    long bound = 0;
    std::vector<int> children;
  };
  std::vector<Node> nodes;
  int trigger = -1;
};

class BruteSearch {
 public:
  BruteSearch(const Problem& problem, const BruteOptions& options) : problem_(problem) {
    const int n = problem.domain_size;
    if (n > options.max_domain)
      throw CapExceeded("brute force: domain size " + std::to_string(n) + " exceeds cap " +
                        std::to_string(options.max_domain));
    auto atoms = ground_atoms(problem.vocabulary, n);
    if (static_cast<int>(atoms.size()) > options.max_atoms)
      throw CapExceeded("brute force: " + std::to_string(atoms.size()) + " ground atoms exceed cap " +
                        std::to_string(options.max_atoms));
    auto max_index = [](const GroundAtom& a) {
      int m = 0;
      for (int e : a.args) m = std::max(m, e);
      return m;
    };
    std::stable_sort(atoms.begin(), atoms.end(), [&](const GroundAtom& a, const GroundAtom& b) {
      return std::make_tuple(max_index(a), a.predicate, a.args) < std::make_tuple(max_index(b), b.predicate, b.args);
    });
    atoms_ = atoms;
    for (std::size_t i = 0; i < atoms_.size(); ++i) position_[atoms_[i]] = static_cast<int>(i);
    for (const auto& [name, arity] : problem.vocabulary) {
      pred_id_[name] = static_cast<int>(pred_names_.size());
      pred_names_.push_back(name);
      WeightPair w = problem.weight(name);
      weights_.push_back(w);
      if (!(w == WeightPair{})) unit_weights_ = false;
    }
    pred_last_.assign(pred_names_.size(), -1);
    atom_pred_.resize(atoms_.size());
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      int p = pred_id_.at(atoms_[i].predicate);
      atom_pred_[i] = p;
      pred_last_[p] = std::max(pred_last_[p], static_cast<int>(i));
    }
    Formula g = ground(Formula::conjunction({problem.sentence, problem.cardinality}), n);
    by_trigger_.resize(atoms_.size() + 1);
    for (const auto& c : conjuncts(g)) {
      GroundCircuit circ;
      compile(circ, c);
      by_trigger_[circ.trigger + 1].push_back(std::move(circ));
    }
  }

  template <class Leaf>
  void run(Leaf&& leaf) {
    value_.assign(atoms_.size(), 0);
    pred_count_.assign(pred_names_.size(), 0);
    for (const auto& c : by_trigger_[0])
      if (!eval(c, 0)) return;
    std::vector<BigRational> partial(atoms_.size() + 1, BigRational(1));
    dfs(0, partial, leaf);
  }

  Model model() const {
    Model m;
    m.vocabulary = problem_.vocabulary;
    m.domain_size = problem_.domain_size;
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (value_[i]) m.true_atoms.insert(atoms_[i]);
    return m;
  }

 private:
  int compile(GroundCircuit& circ, const Formula& f) {
    const int id = static_cast<int>(circ.nodes.size());
    circ.nodes.emplace_back();
    GroundCircuit::Node node;
    node.op = f.kind();
    switch (f.kind()) {
      case Connective::Top:
      case Connective::Bottom:
        break;
      case Connective::Atom: {
        GroundAtom a{f.predicate(), {}};
        for (const auto& t : f.args()) a.args.push_back(t.element());
        auto it = position_.find(a);
        if (it == position_.end()) throw Error("atom over unknown predicate " + f.predicate());
        node.atom = it->second;
        circ.trigger = std::max(circ.trigger, node.atom);
        break;
      }
      case Connective::Cardinality: {
        auto it = pred_id_.find(f.predicate());
        if (it == pred_id_.end()) throw Error("cardinality atom over unknown predicate " + f.predicate());
        node.atom = it->second;
        node.cmp = f.comparison();
        node.bound = f.bound();
        circ.trigger = std::max(circ.trigger, pred_last_[it->second]);
        break;
      }
      default:
        for (const auto& c : f.children()) node.children.push_back(compile(circ, c));
    }
    circ.nodes[id] = std::move(node);
    return id;
  }

  bool eval(const GroundCircuit& c, int i) const {
    const auto& n = c.nodes[i];
    switch (n.op) {
      case Connective::Top: return true;
      case Connective::Bottom: return false;
      case Connective::Atom: return value_[n.atom];
      case Connective::Cardinality: return compare(pred_count_[n.atom], n.cmp, n.bound);
      case Connective::Not: return !eval(c, n.children[0]);
      case Connective::And:
        for (int ch : n.children)
          if (!eval(c, ch)) return false;
        return true;
      case Connective::Or:
        for (int ch : n.children)
          if (eval(c, ch)) return true;
        return false;
      case Connective::Implies: return !eval(c, n.children[0]) || eval(c, n.children[1]);
      case Connective::Iff: return eval(c, n.children[0]) == eval(c, n.children[1]);
      default: throw Error("unexpected node in ground formula");
    }
  }

  template <class Leaf>
  void dfs(std::size_t pos, std::vector<BigRational>& partial, Leaf& leaf) {
    if (pos == atoms_.size()) {
      leaf(partial[pos]);
      return;
    }
    const int p = atom_pred_[pos];
    for (int v = 0; v < 2; ++v) {
      value_[pos] = static_cast<char>(v);
      pred_count_[p] += v;
      bool ok = true;
      for (const auto& c : by_trigger_[pos + 1]) {
        if (!eval(c, 0)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        if (unit_weights_) {
          dfs(pos + 1, partial, leaf);
        } else {
          const WeightPair& w = weights_[p];
          partial[pos + 1] = partial[pos] * (v ? w.positive : w.negative);
          if (partial[pos + 1] != 0) dfs(pos + 1, partial, leaf);
        }
      }
      pred_count_[p] -= v;
    }
    value_[pos] = 0;
  }

  const Problem& problem_;
  std::vector<GroundAtom> atoms_;
  std::map<GroundAtom, int> position_;
  std::map<std::string, int> pred_id_;
  std::vector<std::string> pred_names_;
  std::vector<WeightPair> weights_;
  bool unit_weights_ = true;
  std::vector<int> pred_last_;
  std::vector<int> atom_pred_;
  std::vector<std::vector<GroundCircuit>> by_trigger_;
  std::vector<char> value_;
  std::vector<long> pred_count_;
};

}  // namespace

void brute_enumerate(const Problem& problem, const std::function<void(const Model&, const BigRational&)>& visit,
                     const BruteOptions& options) {
  BruteSearch search(problem, options);
  search.run([&](const BigRational& w) { visit(search.model(), w); });
}

BigRational brute_wfomc(const Problem& problem, const BruteOptions& options) {
  BruteSearch search(problem, options);
  BigRational total = 0;
  BigInt count = 0;
  search.run([&](const BigRational& w) {
    total += w;
  });
  (void)count;
  return total;
}

}  // namespace liftgen
