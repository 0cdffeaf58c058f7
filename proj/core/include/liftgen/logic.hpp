#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftgen {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is outside the two-variable fragment this engine handles.
class UnsupportedFragment : public Error {
 public:
  using Error::Error;
};

// The sentence has no models (or only weight-zero models) on the domain.
class NoModels : public Error {
 public:
  using Error::Error;
};

// A brute-force routine was asked for more than its configured caps allow.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

enum class Var : std::uint8_t { X = 0, Y = 1 };

inline Var other(Var v) { return v == Var::X ? Var::Y : Var::X; }
inline char var_name(Var v) { return v == Var::X ? 'x' : 'y'; }

struct Term {
  enum class Kind : std::uint8_t { Variable, Element };
  Kind kind = Kind::Variable;
  int value = 0;  // Var index for variables, 1-based index for elements

  static Term variable(Var v) { return {Kind::Variable, static_cast<int>(v)}; }
  static Term element(int e) { return {Kind::Element, e}; }
  bool is_variable() const { return kind == Kind::Variable; }
  Var var() const { return static_cast<Var>(value); }
  int element() const { return value; }

  auto operator<=>(const Term&) const = default;
};

enum class Connective : std::uint8_t {
  Top,
  Bottom,
  Atom,
  Cardinality,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Forall,
  Exists,
  Counting
};

enum class CountMode : std::uint8_t { Exactly, AtMost, AtLeast };
enum class Comparison : std::uint8_t { Eq, Le, Ge, Lt, Gt };

bool compare(long lhs, Comparison cmp, long rhs);
const char* comparison_symbol(Comparison cmp);

// Immutable formula handle. Copies share structure.
class Formula {
 public:
  Formula();  // ⊤

  static Formula top();
  static Formula bottom();
  static Formula atom(std::string predicate, std::vector<Term> args);
  static Formula cardinality(std::string predicate, Comparison cmp, long bound);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> parts);
  static Formula disjunction(std::vector<Formula> parts);
  static Formula implies(Formula lhs, Formula rhs);
  static Formula iff(Formula lhs, Formula rhs);
  static Formula forall(Var v, Formula body);
  static Formula exists(Var v, Formula body);
  static Formula counting(Var v, CountMode mode, int k, Formula body);

  Connective kind() const;
  const std::string& predicate() const;  // Atom, Cardinality
  const std::vector<Term>& args() const;  // Atom
  Comparison comparison() const;          // Cardinality
  long bound() const;                     // Cardinality
  Var variable() const;                   // quantifiers
  CountMode mode() const;                 // Counting
  int count() const;                      // Counting
  const std::vector<Formula>& children() const;
  const Formula& child(std::size_t i) const { return children()[i]; }

  bool is_top() const { return kind() == Connective::Top; }
  bool is_bottom() const { return kind() == Connective::Bottom; }

  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct Node;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

class Vocabulary {
 public:
  // Adds or checks a predicate. Conflicting arities throw.
  void add(const std::string& name, int arity);
  bool contains(const std::string& name) const { return arity_.count(name) != 0; }
  int arity(const std::string& name) const;
  std::size_t size() const { return arity_.size(); }
  bool empty() const { return arity_.empty(); }
  auto begin() const { return arity_.begin(); }
  auto end() const { return arity_.end(); }
  void merge(const Vocabulary& other);
  Vocabulary restricted_to(const std::vector<std::string>& names) const;
  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::map<std::string, int> arity_;
};

// Predicates occurring in atoms. Predicates that only occur in cardinality
// atoms are not included (their arity is unknown from the formula alone).
Vocabulary vocabulary_of(const Formula& f);
std::set<std::string> cardinality_predicates(const Formula& f);

// Bit 0: x free, bit 1: y free.
unsigned free_variables(const Formula& f);
bool has_quantifier(const Formula& f);
bool has_counting(const Formula& f);
bool has_cardinality(const Formula& f);

// Replaces free occurrences of variable v by t.
Formula substitute(const Formula& f, Var v, Term t);
// Exchanges x and y everywhere (bound occurrences included).
Formula swap_variables(const Formula& f);
// Constant folding and flattening of nested and/or.
Formula simplify(const Formula& f);
// Top-level conjuncts after flattening nested conjunctions.
std::vector<Formula> conjuncts(const Formula& f);

std::string to_string(const Formula& f);

struct GroundAtom {
  std::string predicate;
  std::vector<int> args;
  auto operator<=>(const GroundAtom&) const = default;
};

std::string to_string(const GroundAtom& a);

// Total interpretation over a vocabulary and a domain {1..n}: atoms listed in
// true_atoms hold, every other ground atom is false.
struct Model {
  Vocabulary vocabulary;
  int domain_size = 0;
  std::set<GroundAtom> true_atoms;

  bool holds(const GroundAtom& a) const { return true_atoms.count(a) != 0; }
  long count(const std::string& predicate) const;
  // Reduct onto the given predicates.
  Model restricted_to(const std::vector<std::string>& predicates) const;
  friend bool operator==(const Model&, const Model&) = default;
  friend auto operator<=>(const Model& a, const Model& b) {
    return a.true_atoms <=> b.true_atoms;
  }
};

// All ground atoms of a vocabulary over {1..n}, sorted by (predicate, args).
std::vector<GroundAtom> ground_atoms(const Vocabulary& vocab, int n);

Formula ground(const Formula& sentence, int domain_size);
bool evaluate(const Model& model, const Formula& ground_formula);

}  // namespace liftgen
