#include "liftgen/cells.hpp"

#include <functional>

namespace liftgen {

AtomLayout AtomLayout::of(const Vocabulary& vocabulary) {
  AtomLayout l;
  for (const auto& [name, arity] : vocabulary) {
    if (arity == 0) {
      l.nullary.push_back(name);
      continue;
    }
    l.one_index[name] = static_cast<int>(l.one_atoms.size());
    l.one_atoms.push_back(name);
    if (arity == 2) {
      l.binary_index[name] = static_cast<int>(l.binary.size());
      l.binary.push_back(name);
      l.binary_one_atom.push_back(l.one_index[name]);
    }
  }
  if (l.one_atoms.size() > 30) throw UnsupportedFragment("too many unary/binary predicates for the lifted engine");
  if (l.binary.size() > 15) throw UnsupportedFragment("too many binary predicates for the lifted engine");
  return l;
}

std::string AtomLayout::describe(OneType t) const {
  std::string s;
  for (int i = 0; i < num_one_atoms(); ++i) {
    if (!s.empty()) s += " & ";
    if (!((t.bits >> i) & 1)) s += '~';
    s += one_atoms[i];
    s += binary_index.count(one_atoms[i]) ? "(x,x)" : "(x)";
  }
  return s.empty() ? "true" : s;
}

std::string AtomLayout::describe(TwoTable t) const {
  std::string s;
  for (int r = 0; r < num_binary(); ++r) {
    for (int d = 0; d < 2; ++d) {
      if (!s.empty()) s += " & ";
      if (!((t.bits >> (2 * r + d)) & 1)) s += '~';
      s += binary[r];
      s += d == 0 ? "(x,y)" : "(y,x)";
    }
  }
  return s.empty() ? "true" : s;
}

// ---------------------------------------------------------------------------

LocalFormula::LocalFormula(const Formula& f, const AtomLayout& layout,
                           const std::map<std::string, bool>& nullary_values) {
  if (has_quantifier(f)) throw Error("local formulas must be quantifier-free");
  nodes_.reserve(16);
  compile(f, layout, nullary_values);
}

int LocalFormula::compile(const Formula& f, const AtomLayout& layout,
                          const std::map<std::string, bool>& nullary) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{Op::True, 0, 0, {}});
  Node node{Op::True, 0, 0, {}};
  switch (f.kind()) {
    case Connective::Top: node.op = Op::True; break;
    case Connective::Bottom: node.op = Op::False; break;
    case Connective::Cardinality:
      throw Error("cardinality atoms cannot appear inside the matrix");
    case Connective::Atom: {
      const auto& args = f.args();
      for (const auto& t : args)
        if (!t.is_variable()) throw Error("element constants cannot appear inside the matrix");
      if (args.empty()) {
        auto it = nullary.find(f.predicate());
        if (it == nullary.end()) throw Error("nullary atom " + f.predicate() + "() has no fixed value");
        node.op = it->second ? Op::True : Op::False;
      } else if (args.size() == 1) {
        node.op = args[0].var() == Var::X ? Op::XAtom : Op::YAtom;
        node.bit = layout.one_index.at(f.predicate());
      } else {
        const int r = layout.binary_index.at(f.predicate());
        const Var a = args[0].var(), b = args[1].var();
        node.refl_bit = layout.binary_one_atom[r];
        if (a == b) {
          node.op = a == Var::X ? Op::XAtom : Op::YAtom;
          node.bit = layout.binary_one_atom[r];
        } else {
          node.op = a == Var::X ? Op::XYAtom : Op::YXAtom;
          node.bit = r;
        }
      }
      break;
    }
    case Connective::Not: node.op = Op::Not; break;
    case Connective::And: node.op = Op::And; break;
    case Connective::Or: node.op = Op::Or; break;
    case Connective::Implies: node.op = Op::Implies; break;
    case Connective::Iff: node.op = Op::Iff; break;
    default: throw Error("local formulas must be quantifier-free");
  }
  for (const auto& c : f.children()) node.children.push_back(compile(c, layout, nullary));
  nodes_[id] = std::move(node);
  return id;
}

namespace {

inline Truth bit_truth(std::uint64_t value, std::uint64_t known, int bit) {
  if (!((known >> bit) & 1)) return Truth::Unknown;
  return ((value >> bit) & 1) ? Truth::True : Truth::False;
}

inline Truth negate(Truth t) {
  return t == Truth::Unknown ? t : (t == Truth::True ? Truth::False : Truth::True);
}

}  // namespace

Truth LocalFormula::eval_node(int i, const LocalAssignment& s, Role role) const {
  const Node& n = nodes_[i];
  switch (n.op) {
    case Op::True: return Truth::True;
    case Op::False: return Truth::False;
    case Op::XAtom:
      return role == Role::Backward ? bit_truth(s.b, s.b_known, n.bit) : bit_truth(s.a, s.a_known, n.bit);
    case Op::YAtom:
      return role == Role::Forward ? bit_truth(s.b, s.b_known, n.bit) : bit_truth(s.a, s.a_known, n.bit);
    case Op::XYAtom:
    case Op::YXAtom: {
      if (role == Role::Reflexive) return bit_truth(s.a, s.a_known, n.refl_bit);
      const bool forward_literal = (n.op == Op::XYAtom) == (role == Role::Forward);
      return bit_truth(s.pi, s.pi_known, 2 * n.bit + (forward_literal ? 0 : 1));
    }
    case Op::Not: return negate(eval_node(n.children[0], s, role));
    case Op::And: {
      Truth acc = Truth::True;
      for (int c : n.children) {
        Truth t = eval_node(c, s, role);
        if (t == Truth::False) return Truth::False;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
    case Op::Or: {
      Truth acc = Truth::False;
      for (int c : n.children) {
        Truth t = eval_node(c, s, role);
        if (t == Truth::True) return Truth::True;
        if (t == Truth::Unknown) acc = Truth::Unknown;
      }
      return acc;
    }
    case Op::Implies: {
      Truth a = eval_node(n.children[0], s, role);
      if (a == Truth::False) return Truth::True;
      Truth b = eval_node(n.children[1], s, role);
      if (b == Truth::True) return Truth::True;
      if (a == Truth::True) return b;
      return Truth::Unknown;
    }
    case Op::Iff: {
      Truth a = eval_node(n.children[0], s, role);
      if (a == Truth::Unknown) return Truth::Unknown;
      Truth b = eval_node(n.children[1], s, role);
      if (b == Truth::Unknown) return Truth::Unknown;
      return a == b ? Truth::True : Truth::False;
    }
  }
  return Truth::Unknown;
}

bool LocalFormula::holds(OneType a, TwoTable pi, OneType b) const {
  LocalAssignment s{a.bits, ~0u, b.bits, ~0u, pi.bits, ~0ull};
  return eval(s) == Truth::True;
}

bool LocalFormula::holds_reflexive(OneType a) const {
  LocalAssignment s{a.bits, ~0u, a.bits, ~0u, 0, ~0ull};
  return eval_reflexive(s) == Truth::True;
}

std::vector<FlaggedOneType> enumerate_1types(const AtomLayout& layout, const LocalFormula& psi) {
  std::vector<FlaggedOneType> out;
  const std::uint32_t count = 1u << layout.num_one_atoms();
  for (std::uint32_t bits = 0; bits < count; ++bits)
    out.push_back({OneType{bits}, psi.holds_reflexive(OneType{bits})});
  return out;
}

std::vector<TwoTable> enumerate_2tables(const AtomLayout& layout) {
  std::vector<TwoTable> out;
  const std::uint32_t count = 1u << (2 * layout.num_binary());
  for (std::uint32_t bits = 0; bits < count; ++bits) out.push_back(TwoTable{bits});
  return out;
}

bool coherent(TwoTable pi, OneType a, OneType b, const LocalFormula& psi) {
  LocalAssignment s{a.bits, ~0u, b.bits, ~0u, pi.bits, ~0ull};
  return psi.eval(s) == Truth::True && psi.eval_swapped(s) == Truth::True;
}

std::vector<OneType> valid_1types(const AtomLayout& layout, const LocalFormula& psi) {
  std::vector<OneType> out;
  const int k = layout.num_one_atoms();
  // Assign bits from the most significant down so that results come out in
  // increasing numeric order.
  std::function<void(int, std::uint32_t, std::uint32_t)> go = [&](int i, std::uint32_t val, std::uint32_t known) {
    LocalAssignment s{val, known, val, known, 0, 0};
    Truth t = psi.eval_reflexive(s);
    if (t == Truth::False) return;
    if (i < 0) {
      if (t == Truth::True) out.push_back(OneType{val});
      return;
    }
    go(i - 1, val, known | (1u << i));
    go(i - 1, val | (1u << i), known | (1u << i));
  };
  go(k - 1, 0, 0);
  return out;
}

std::vector<TwoTable> coherent_tables(const AtomLayout& layout, const LocalFormula& psi, OneType a, OneType b) {
  std::vector<TwoTable> out;
  const int bits = 2 * layout.num_binary();
  std::function<void(int, std::uint64_t, std::uint64_t)> go = [&](int i, std::uint64_t val, std::uint64_t known) {
    LocalAssignment s{a.bits, ~0u, b.bits, ~0u, val, known};
    Truth f = psi.eval(s);
    if (f == Truth::False) return;
    Truth g = psi.eval_swapped(s);
    if (g == Truth::False) return;
    if (i < 0) {
      if (f == Truth::True && g == Truth::True) out.push_back(TwoTable{static_cast<std::uint32_t>(val)});
      return;
    }
    go(i - 1, val, known | (1ull << i));
    go(i - 1, val | (1ull << i), known | (1ull << i));
  };
  go(bits - 1, 0, 0);
  return out;
}

BlockType relax_block(BlockType beta, TwoTable pi, const std::vector<int>& registry) {
  BlockType out = beta;
  for (std::size_t k = 0; k < registry.size(); ++k) {
    if (((beta.bits >> k) & 1) && ((pi.bits >> (2 * registry[k] + 1)) & 1)) out.bits &= ~(1u << k);
  }
  return out;
}

// ---------------------------------------------------------------------------

ConfigSpace::ConfigSpace(int total, int parts) : total_(total), parts_(parts) {
  if (parts < 1) throw Error("configuration space needs at least one part");
  if (total < 0) throw Error("configuration total must be non-negative");
}

ConfigSpace::iterator ConfigSpace::begin() const {
  iterator it;
  it.current_.assign(parts_, 0);
  it.current_[0] = total_;
  it.done_ = false;
  return it;
}

ConfigSpace::iterator& ConfigSpace::iterator::operator++() {
  if (!done_ && !next_configuration(current_)) done_ = true;
  return *this;
}

ConfigSpace config_space(int total, int parts) { return ConfigSpace(total, parts); }

bool next_configuration(Configuration& c) {
  const int m = static_cast<int>(c.size());
  if (m <= 1) return false;
  int tail = c[m - 1];
  int i = m - 2;
  while (i >= 0 && c[i] == 0) --i;
  if (i < 0) return false;
  c[m - 1] = 0;
  --c[i];
  c[i + 1] = tail + 1;
  return true;
}

}  // namespace liftgen
