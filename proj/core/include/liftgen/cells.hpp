#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "liftgen/logic.hpp"

namespace liftgen {

// Bit i is the polarity of the i-th 1-atom of the layout.
struct OneType {
  std::uint32_t bits = 0;
  auto operator<=>(const OneType&) const = default;
};

// Bit 2r is R_r(x,y), bit 2r+1 is R_r(y,x) for the r-th binary predicate.
struct TwoTable {
  std::uint32_t bits = 0;
  auto operator<=>(const TwoTable&) const = default;
};

// Bit k set: the element still owes the k-th existential obligation.
struct BlockType {
  std::uint32_t bits = 0;
  int size() const { return __builtin_popcount(bits); }
  auto operator<=>(const BlockType&) const = default;
};

struct CellType {
  BlockType block;
  OneType one_type;
  auto operator<=>(const CellType&) const = default;
};

using Configuration = std::vector<int>;

// Partial 1-type: literals fixed positive or negative, the rest open.
struct EvidenceType {
  std::uint32_t positive = 0;
  std::uint32_t negative = 0;
  bool consistent() const { return (positive & negative) == 0; }
  bool admits(OneType t) const { return (t.bits & positive) == positive && (t.bits & negative) == 0; }
};

// Fixed ordering of the literals of a vocabulary. Predicates are taken in name
// order; every unary and binary predicate owns one 1-atom (P(x) or R(x,x)),
// every binary predicate owns two table bits.
struct AtomLayout {
  std::vector<std::string> nullary;
  std::vector<std::string> one_atoms;
  std::vector<std::string> binary;
  std::vector<int> binary_one_atom;  // position of R(x,x) among one_atoms
  std::map<std::string, int> one_index;
  std::map<std::string, int> binary_index;

  static AtomLayout of(const Vocabulary& vocabulary);
  int num_one_atoms() const { return static_cast<int>(one_atoms.size()); }
  int num_binary() const { return static_cast<int>(binary.size()); }
  std::string describe(OneType t) const;
  std::string describe(TwoTable t) const;
};

enum class Truth : std::uint8_t { False, True, Unknown };

// Partial assignment to the local atoms of an element pair (a, b).
struct LocalAssignment {
  std::uint32_t a = 0, a_known = 0;
  std::uint32_t b = 0, b_known = 0;
  std::uint64_t pi = 0, pi_known = 0;
};

// A quantifier-free formula over x, y compiled against a layout. Nullary atoms
// must be fixed at construction.
class LocalFormula {
 public:
  LocalFormula() = default;
  LocalFormula(const Formula& f, const AtomLayout& layout,
               const std::map<std::string, bool>& nullary_values = {});

  // ψ(a,b): x is a, y is b.
  Truth eval(const LocalAssignment& s) const { return eval_node(0, s, Role::Forward); }
  // ψ(b,a).
  Truth eval_swapped(const LocalAssignment& s) const { return eval_node(0, s, Role::Backward); }
  // ψ(a,a); table literals read the reflexive bits of a.
  Truth eval_reflexive(const LocalAssignment& s) const { return eval_node(0, s, Role::Reflexive); }

  bool holds(OneType a, TwoTable pi, OneType b) const;
  bool holds_reflexive(OneType a) const;

 private:
  enum class Role : std::uint8_t { Forward, Backward, Reflexive };
  enum class Op : std::uint8_t { True, False, XAtom, YAtom, XYAtom, YXAtom, Not, And, Or, Implies, Iff };
  struct Node {
    Op op;
    int bit = 0;       // 1-atom index for XAtom/YAtom, binary index for XYAtom/YXAtom
    int refl_bit = 0;  // R(x,x) position, used in the reflexive role
    std::vector<int> children;
  };
  int compile(const Formula& f, const AtomLayout& layout, const std::map<std::string, bool>& nullary);
  Truth eval_node(int i, const LocalAssignment& s, Role role) const;

  std::vector<Node> nodes_;
};

struct FlaggedOneType {
  OneType type;
  bool valid = false;
};

// All 2^(#1-atoms) 1-types in increasing bit order; valid iff ψ(x,x) holds.
std::vector<FlaggedOneType> enumerate_1types(const AtomLayout& layout, const LocalFormula& psi);
// All 4^B 2-tables in increasing bit order.
std::vector<TwoTable> enumerate_2tables(const AtomLayout& layout);
bool coherent(TwoTable pi, OneType a, OneType b, const LocalFormula& psi);

// Valid 1-types and coherent tables found by pruned search, same order as the
// full enumerations.
std::vector<OneType> valid_1types(const AtomLayout& layout, const LocalFormula& psi);
std::vector<TwoTable> coherent_tables(const AtomLayout& layout, const LocalFormula& psi, OneType a,
                                      OneType b);

// registry[k] is the binary-predicate index of R_k in the layout.
BlockType relax_block(BlockType beta, TwoTable pi, const std::vector<int>& registry);

// Every vector of m non-negative integers summing to M, starting at (M,0,..,0)
// and ending at (0,..,0,M).
class ConfigSpace {
 public:
  ConfigSpace(int total, int parts);

  class iterator {
   public:
    using value_type = Configuration;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    const Configuration& operator*() const { return current_; }
    const Configuration* operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator old = *this;
      ++*this;
      return old;
    }
    bool operator==(const iterator& o) const { return done_ == o.done_ && (done_ || current_ == o.current_); }

   private:
    friend class ConfigSpace;
    Configuration current_;
    bool done_ = true;
  };

  iterator begin() const;
  iterator end() const { return iterator(); }

 private:
  int total_, parts_;
};

ConfigSpace config_space(int total, int parts);
// Advances c to the next configuration in ConfigSpace order; false at the end.
bool next_configuration(Configuration& c);

}  // namespace liftgen
