#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "liftgen/cells.hpp"
#include "liftgen/normalize.hpp"
#include "liftgen/numeric.hpp"
#include "liftgen/poly.hpp"
#include "liftgen/textio.hpp"

namespace liftgen {

using SymbolicWeight = Polynomial;

// Boolean combination of |P| op q atoms, evaluated against count vectors
// indexed by the engine's indeterminates.
class CardinalityConstraint {
 public:
  CardinalityConstraint() = default;
  CardinalityConstraint(const Formula& f, const std::map<std::string, int>& var_of);

  bool trivial() const { return nodes_.empty(); }
  bool holds(const std::vector<long>& counts) const;
  // False only if the constraint is already violated once every atom whose
  // bound lies below the fixed count is decided.
  bool feasible(const std::vector<long>& fixed) const;
  // Largest bound mentioned per variable (-1 if none).
  std::vector<long> max_bounds(int vars) const;

 private:
  struct Node {
    Connective op = Connective::Top;
    int var = -1;
    Comparison cmp = Comparison::Eq;
    long bound = 0;
    std::vector<int> children;
  };
  int compile(const Formula& f, const std::map<std::string, int>& var_of);
  bool eval(int i, const std::vector<long>& counts) const;
  Truth eval3(int i, const std::vector<long>& fixed) const;
  std::vector<Node> nodes_;
};

struct EngineOptions {
  // Predicates whose exact counts are kept symbolically (count distributions).
  std::vector<std::string> tracked;
};

// A group of remaining elements sharing a 1-type (index into the context's
// type list) and a block of pending existential obligations.
struct Cell {
  int type = 0;
  std::uint32_t block = 0;
  int count = 0;
  auto operator<=>(const Cell&) const = default;
};

// Lifted counter for a compiled problem. Weights are scaled per predicate to
// integers; every count returned as BigInt is scaled, `scale()` undoes it.
// Thread-safe: caches are guarded internally.
class CountingEngine {
 public:
  using Key = ExponentSpace::Key;

  struct TypeInfo {
    OneType type;
    std::uint32_t initial_block = 0;  // obligations not met by the element itself
    BigInt weight;
    Key key = 0;
  };

  struct TableInfo {
    TwoTable table;
    BigInt weight;
    Key key = 0;
    std::uint32_t forward = 0;   // k with φ_k(x,y) true: discharges x's obligation
    std::uint32_t backward = 0;  // k with φ_k(y,x) true: discharges y's obligation
  };

  // One assignment of the nullary predicates.
  struct Context {
    std::uint32_t nullary = 0;
    BigInt weight;
    std::vector<long> offset;  // counts contributed by nullary atoms
    LocalFormula psi;
    std::vector<LocalFormula> phis;
    std::vector<TypeInfo> types;
  };

  explicit CountingEngine(LiftedProblem problem, EngineOptions options = {});
  ~CountingEngine();
  CountingEngine(const CountingEngine&) = delete;
  CountingEngine& operator=(const CountingEngine&) = delete;

  const LiftedProblem& problem() const { return problem_; }
  const AtomLayout& layout() const { return layout_; }
  const ExponentSpace& space() const { return space_; }
  const CardinalityConstraint& constraint() const { return constraint_; }
  bool symbolic() const { return symbolic_; }
  int num_vars() const { return space_.size(); }
  // Indeterminate of a predicate, -1 when untracked.
  int var_of(const std::string& predicate) const;
  const BigInt& scale() const { return scale_; }
  int num_existentials() const { return static_cast<int>(problem_.existentials.size()); }

  int num_contexts() const { return static_cast<int>(contexts_.size()); }
  const Context& context(int a) const { return contexts_[a]; }
  // Coherent tables for (types[i] at x, types[j] at y), in table order.
  const std::vector<TableInfo>& tables(int a, int i, int j) const;

  // Scaled weight of structures over the cells (Skolem-encoded obligations),
  // restricted to count vectors c with Υ(c + offset) true.
  BigInt conditioned(int a, const std::vector<Cell>& cells, const std::vector<long>& offset) const;
  Polynomial conditioned_poly(int a, const std::vector<Cell>& cells) const;
  BigInt conditioned_scalar(int a, const std::vector<Cell>& cells) const;
  BigInt extract(const Polynomial& p, const std::vector<long>& offset) const;

  // Scaled WFOMC restricted to one nullary context, Υ applied, context
  // weight excluded.
  BigInt context_total(int a) const;
  // Exact WFOMC of the lifted problem.
  BigRational count() const;
  // Unnormalized, unscaled weight per count vector of the tracked predicates.
  std::map<std::vector<long>, BigRational> tracked_distribution() const;

 private:
  template <class V>
  struct Caches;
  template <class V>
  V conditioned_impl(int a, const std::vector<Cell>& cells) const;
  template <class V>
  V pair_factor(int a, int i, std::uint32_t ti, int j, std::uint32_t tj) const;
  template <class V>
  Caches<V>& caches() const;
  template <class V>
  V context_sum(int a) const;

  LiftedProblem problem_;
  AtomLayout layout_;
  ExponentSpace space_;
  std::map<std::string, int> vars_;
  std::vector<std::string> tracked_;
  CardinalityConstraint constraint_;
  bool symbolic_ = false;
  BigInt scale_;
  std::map<std::string, WeightPair> scaled_;
  std::vector<Context> contexts_;

  mutable std::mutex table_mu_;
  mutable std::map<std::tuple<int, int, int>, std::unique_ptr<std::vector<TableInfo>>> tables_;
  std::unique_ptr<Caches<BigInt>> scalar_caches_;
  std::unique_ptr<Caches<Polynomial>> poly_caches_;
};

// Product of w over true and w̄ over false literals.
BigRational weight_of(const std::vector<std::pair<GroundAtom, bool>>& literals, const Weighting& weights);

BigRational wfomc(const Problem& problem);
BigRational wfomc(const LiftedProblem& problem);

// WFOMC of the compiled problem with element i fixed to conditioning[i]
// (1-type over the compiled layout and block of pending obligations).
BigRational wfomc_conditioned(const CountingEngine& engine, const std::vector<CellType>& conditioning);

struct BruteOptions {
  int max_domain = 6;
  int max_atoms = 30;
};

// Calls visit for every model of the problem (sentence and cardinality
// constraint) with its weight.
void brute_enumerate(const Problem& problem, const std::function<void(const Model&, const BigRational&)>& visit,
                     const BruteOptions& options = {});
BigRational brute_wfomc(const Problem& problem, const BruteOptions& options = {});

}  // namespace liftgen
