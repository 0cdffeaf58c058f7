#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "liftgen/cells.hpp"
#include "liftgen/normalize.hpp"
#include "liftgen/numeric.hpp"
#include "liftgen/wfomc.hpp"

namespace liftgen {

// Deterministic source of uniform integers. The stream depends only on the seed.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next64() { return engine_(); }
  // Uniform in [0, bound); bound > 0.
  std::uint64_t uniform_below(std::uint64_t bound);
  BigInt uniform_below(const BigInt& bound);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Index i with probability weights[i] / Σ weights, exactly.
std::size_t sample_discrete(const std::vector<BigInt>& weights, RandomSource& rng);
std::size_t sample_discrete(const std::vector<BigRational>& weights, RandomSource& rng);
// Same, with precomputed running sums (cumulative.back() is the total).
std::size_t sample_cumulative(const std::vector<BigInt>& cumulative, RandomSource& rng);

// Uniformly random ordered partition of items into blocks of the given sizes.
std::vector<std::vector<int>> random_partition(std::vector<int> items, const Configuration& config,
                                               RandomSource& rng);
void shuffle(std::vector<int>& items, RandomSource& rng);

// A sampled structure of the compiled problem: nullary context, 1-type of
// every element (index into the context's type list) and the 2-table of every
// pair i < j with i in the x position.
struct Structure {
  int context = 0;
  std::vector<int> types;
  std::vector<std::uint32_t> tables;  // n*n, entry i*n+j for i < j

  std::uint32_t table(int i, int j, int n) const;
};

struct SampleResult {
  Model model;  // visible predicates
  Model full;   // every predicate of the input problem
  BigRational probability;  // of `full` among models of the input problem
};

struct SamplerOptions {
  // Pick the lowest remaining index at every recursion step instead of the
  // element with the largest block.
  bool index_order = false;
};

// Distribution over the tables joining the selected element t to the other
// remaining elements, grouped into cells.
struct StepDistribution {
  std::vector<Cell> cells;
  std::vector<const std::vector<CountingEngine::TableInfo>*> tables;  // per cell, t at x
  std::vector<std::vector<int>> outcomes;  // concatenated per-cell configurations over tables
  std::vector<BigInt> cumulative;

  const BigInt& total() const { return cumulative.back(); }
  BigInt weight(std::size_t i) const { return i == 0 ? cumulative[0] : BigInt(cumulative[i] - cumulative[i - 1]); }
};

class Sampler {
 public:
  explicit Sampler(const Problem& problem, SamplerOptions options = {});
  Sampler(LiftedProblem problem, SamplerOptions options);
  Sampler(const Sampler&) = delete;
  Sampler& operator=(const Sampler&) = delete;

  const CountingEngine& engine() const { return *engine_; }
  const LiftedProblem& problem() const { return engine_->problem(); }
  int domain_size() const { return engine_->problem().domain_size; }
  // WFOMC of the input problem.
  const BigRational& count() const { return count_; }

  // Draws a structure; if probability is non-null it receives the exact
  // probability of the structure under the compiled problem.
  Structure sample_structure(RandomSource& rng, BigRational* probability = nullptr) const;
  SampleResult sample(RandomSource& rng) const;

  Model to_model(const Structure& s, bool visible_only) const;
  // '0'/'1' per visible ground atom, atoms in ground_atoms order.
  std::string model_key(const Structure& s) const;
  // Number of true ground atoms per predicate.
  std::vector<long> count_vector(const Structure& s, const std::vector<std::string>& predicates) const;

  // Weight of each nullary context (scaled, includes its WFOMC).
  const std::vector<BigInt>& context_weights() const { return context_weights_; }
  // Configurations over the context's 1-types with weight multinomial · conditioned count.
  const std::vector<std::pair<Configuration, BigInt>>& one_type_distribution(int a) const;
  StepDistribution step_distribution(int a, int t_type, std::uint32_t t_block, std::vector<Cell> others,
                                     const std::vector<long>& offset) const;

  // Feasibility of g (per other cell, counts over every 2-table in layout
  // order, t at x): zero on incoherent tables, every obligation of t met,
  // cardinality bounds not yet exceeded.
  bool ex_sat(int a, int t_type, std::uint32_t t_block, const std::vector<Cell>& others,
              const std::vector<std::vector<int>>& g, const std::vector<long>& offset) const;

 private:
  struct Trace;
  struct Source {
    enum Kind : std::uint8_t { Nullary, OneAtom, Table } kind;
    int bit;      // nullary index, 1-atom index, or binary index r
    int i, j;     // element arguments (0-based)
  };

  void init(SamplerOptions options);
  void sample_ufo2(int a, const std::vector<int>& remaining, Structure& s, Trace& trace, RandomSource& rng) const;
  std::shared_ptr<const StepDistribution> cached_step(int a, int t_type, std::uint32_t t_block,
                                                      const std::vector<Cell>& others,
                                                      const std::vector<long>& offset) const;
  bool atom_value(const Structure& s, const std::string& predicate, const std::vector<int>& args) const;
  std::vector<long> clamp(std::vector<long> offset) const;

  std::unique_ptr<CountingEngine> engine_;
  SamplerOptions options_;
  BigRational count_;
  std::vector<BigInt> context_weights_;
  std::vector<BigInt> context_cumulative_;
  std::vector<GroundAtom> visible_atoms_;
  std::vector<Source> visible_sources_;

  mutable std::mutex mu_;
  mutable std::map<int, std::vector<std::pair<Configuration, BigInt>>> one_types_;
  mutable std::map<int, std::vector<BigInt>> one_type_cumulative_;
  mutable std::map<std::vector<long>, std::shared_ptr<const StepDistribution>> steps_;
};

// Swaps the roles of x and y in a 2-table.
std::uint32_t swap_table(std::uint32_t bits, int num_binary);

SampleResult sample_model(const Problem& problem, RandomSource& rng);

}  // namespace liftgen
