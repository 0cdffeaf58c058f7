#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "liftgen/normalize.hpp"
#include "liftgen/sampler.hpp"
#include "liftgen/textio.hpp"
#include "liftgen/wfomc.hpp"

namespace liftgen {

struct Preset {
  std::string name;
  Problem problem;                  // MLN presets: the reduced weighted problem
  std::optional<MlnSpec> mln;       // set for MLN presets
  std::vector<std::string> tested;  // predicates whose count distribution is checked
  std::vector<std::string> warnings;
};

const std::vector<std::string>& preset_names();
bool is_mln_preset(const std::string& name);
// k is used by k-regular only.
Preset make_preset(const std::string& name, int n, int k = 2);

using ExactDistribution = std::map<Model, BigRational>;
using CountVector = std::vector<long>;
using CountDistribution = std::map<CountVector, BigRational>;

// W(μ)/WFOMC for every model, by enumeration. Empty for unsatisfiable problems.
ExactDistribution exact_distribution(const Problem& problem, const BruteOptions& options = {});
// Same mass aggregated onto the visible predicates.
std::map<std::string, BigRational> visible_distribution(const Problem& problem, const BruteOptions& options = {});

// Lifted: P(|P_1| = c_1, ...) for the given predicates.
CountDistribution count_distribution(const Problem& problem, const std::vector<std::string>& predicates);
CountDistribution count_histogram(const ExactDistribution& distribution, const std::vector<std::string>& predicates);
// Ground MLN semantics with exp(w) rationalized like the reduction does:
// the weight of a world is the product over soft formulas of exp(w)^{#satisfied groundings}.
CountDistribution mln_count_distribution_brute(const MlnSpec& spec, const std::vector<std::string>& predicates,
                                               const BruteOptions& options = {}, double rel_error = 1e-12);

// '0'/'1' per ground atom of the vocabulary, ground_atoms order.
std::string model_key(const Model& model, const Vocabulary& vocabulary);

double dkw_bound(long n_samples, int k, double alpha);

template <class Key>
struct EmpiricalDistribution {
  long n_samples = 0;
  std::map<Key, long> frequency;

  void add(const Key& key, long times = 1) {
    frequency[key] += times;
    n_samples += times;
  }
  void merge(const EmpiricalDistribution& o) {
    for (const auto& [k, c] : o.frequency) add(k, c);
  }
};

struct KsResult {
  double max_deviation = 0;
  double dkw_bound = 0;
  bool rejected = false;
  double alpha = 0.05;
  long n_samples = 0;
  int k = 1;
};

// Univariate test over outcomes ordered lexicographically.
KsResult ks_test(const EmpiricalDistribution<std::string>& samples, const std::map<std::string, BigRational>& reference,
                 double alpha);
// Multivariate test over count vectors, CDF taken componentwise.
KsResult ks_test(const EmpiricalDistribution<CountVector>& samples, const CountDistribution& reference, double alpha);

// Worker count: requested (0 = hardware), capped by LIFTGEN_THREADS.
int resolve_threads(int requested);

// Draws count samples; sample i uses the RandomSource of its chunk, seeded
// master + i / kChunkSize, so streams do not depend on the thread count.
inline constexpr long kChunkSize = 4096;
// With trace set, the visitor also receives the exact structure probability.
using SampleVisitor = std::function<void(long index, const Structure&, const BigRational* probability)>;
void for_each_sample(const Sampler& sampler, std::uint64_t seed, long count, int threads, const SampleVisitor& visit,
                     bool trace = false);

enum class ValidateMode { Model, Count };

struct ValidateOptions {
  long samples = 100000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  int threads = 0;
  ValidateMode mode = ValidateMode::Model;
  std::vector<std::string> predicates;  // count mode
  BruteOptions brute;                   // model mode reference
};

struct ValidateReport {
  KsResult ks;
  long distinct_outcomes = 0;
  long reference_outcomes = 0;
};

// Samples with a fresh sampler and tests against the exact reference: brute
// force over models, or lifted count distributions.
ValidateReport validate(const Problem& problem, const ValidateOptions& options);
ValidateReport validate(const Sampler& sampler, const Problem& problem, const ValidateOptions& options);

}  // namespace liftgen
