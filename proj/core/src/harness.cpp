#include "liftgen/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <thread>

namespace liftgen {

namespace {

const char* kSymmetricIrreflexive = "forall x: forall y: ((E(x,y) -> E(y,x)) & ~E(x,x))";

Problem combinatorial(const std::vector<std::string>& lines, int n) {
  std::vector<Formula> parts;
  for (const auto& l : lines) parts.push_back(parse_formula(l));
  return make_problem(Formula::conjunction(std::move(parts)), n);
}

MlnSpec mln(int n, const std::vector<std::pair<std::optional<std::string>, std::string>>& rows) {
  MlnSpec spec;
  spec.domain_size = n;
  for (const auto& [w, f] : rows) {
    MlnFormula mf;
    if (w) mf.weight = parse_rational(*w);
    mf.formula = parse_formula(f);
    spec.formulas.push_back(std::move(mf));
  }
  return spec;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "two-colored-graphs", "no-isolated-vertices", "k-regular",       "functions", "functions-no-fixpoint",
      "permutations",       "derangements",         "friends-smokers", "employment", "deskmate"};
  return names;
}

bool is_mln_preset(const std::string& name) {
  return name == "friends-smokers" || name == "employment" || name == "deskmate";
}

Preset make_preset(const std::string& name, int n, int k) {
  if (n < 1) throw Error("domain size must be positive");
  Preset p;
  p.name = name;
  if (name == "two-colored-graphs") {
    p.problem = combinatorial({"forall x: ~E(x,x)", "forall x: forall y: (E(x,y) -> E(y,x))",
                               "forall x: (Red(x) | Black(x))", "forall x: (~Red(x) | ~Black(x))",
                               "forall x: forall y: (E(x,y) -> ~(Red(x) & Red(y)) & ~(Black(x) & Black(y)))"},
                              n);
  } else if (name == "no-isolated-vertices") {
    p.problem = combinatorial({kSymmetricIrreflexive, "forall x: exists y: E(x,y)"}, n);
  } else if (name == "k-regular") {
    if (k < 0) throw Error("k must be non-negative");
    if (k >= n)
      p.warnings.push_back("k = " + std::to_string(k) + " is not below n = " + std::to_string(n) +
                           "; the count decides satisfiability");
    p.problem = combinatorial({kSymmetricIrreflexive, "forall x: exists[=" + std::to_string(k) + "] y: E(x,y)"}, n);
  } else if (name == "functions") {
    p.problem = combinatorial({"forall x: exists[=1] y: f(x,y)"}, n);
  } else if (name == "functions-no-fixpoint") {
    p.problem = combinatorial({"forall x: exists[=1] y: f(x,y)", "forall x: ~f(x,x)"}, n);
  } else if (name == "permutations") {
    p.problem = combinatorial({"forall x: exists[=1] y: Per(x,y)", "forall y: exists[=1] x: Per(x,y)"}, n);
  } else if (name == "derangements") {
    p.problem = combinatorial(
        {"forall x: exists[=1] y: Per(x,y)", "forall y: exists[=1] x: Per(x,y)", "forall x: ~Per(x,x)"}, n);
  } else if (name == "friends-smokers") {
    p.mln = mln(n, {{std::nullopt, "forall x: ~fr(x,x)"},
                    {std::nullopt, "forall x: forall y: (fr(x,y) -> fr(y,x))"},
                    {std::nullopt, "forall x: exists y: fr(x,y)"},
                    {"0", "sm(x)"},
                    {"0.2", "fr(x,y) & sm(x) -> sm(y)"}});
    p.tested = {"fr", "sm"};
  } else if (name == "employment") {
    p.mln = mln(n, {{"1.3", "exists y: workfor(x,y) | boss(x)"}});
    p.tested = {"workfor", "boss"};
  } else if (name == "deskmate") {
    p.mln = mln(n, {{std::nullopt, "forall x: (~mate(x,x) & ~fr(x,x))"},
                    {std::nullopt, "forall x: forall y: (mate(x,y) -> mate(y,x))"},
                    {std::nullopt, "forall x: exists[=1] y: mate(x,y)"},
                    {std::nullopt, "forall y: exists[=1] x: mate(x,y)"},
                    {"1.0", "mate(x,y) -> fr(x,y)"}});
    p.tested = {"mate", "fr"};
  } else {
    throw Error("unknown preset '" + name + "'");
  }
  if (p.mln) p.problem = mln_to_wfoms(*p.mln).transformed;
  return p;
}

// ---------------------------------------------------------------------------

ExactDistribution exact_distribution(const Problem& problem, const BruteOptions& options) {
  ExactDistribution out;
  BigRational total = 0;
  brute_enumerate(
      problem,
      [&](const Model& m, const BigRational& w) {
        if (w == 0) return;
        out.emplace(m, w);
        total += w;
      },
      options);
  if (total == 0) return {};
  for (auto& [m, w] : out) w /= total;
  return out;
}

std::string model_key(const Model& model, const Vocabulary& vocabulary) {
  auto atoms = ground_atoms(vocabulary, model.domain_size);
  std::string key(atoms.size(), '0');
  for (std::size_t i = 0; i < atoms.size(); ++i)
    if (model.holds(atoms[i])) key[i] = '1';
  return key;
}

std::map<std::string, BigRational> visible_distribution(const Problem& problem, const BruteOptions& options) {
  Vocabulary visible;
  for (const auto& p : problem.output_predicates()) visible.add(p, problem.vocabulary.arity(p));
  std::map<std::string, BigRational> out;
  for (const auto& [m, w] : exact_distribution(problem, options)) out[model_key(m, visible)] += w;
  return out;
}

CountDistribution count_distribution(const Problem& problem, const std::vector<std::string>& predicates) {
  for (const auto& p : predicates)
    if (!problem.vocabulary.contains(p)) throw Error("unknown predicate " + p);
  LiftedProblem lp = compile(problem);
  EngineOptions opts;
  opts.tracked = predicates;
  CountingEngine engine(lp, opts);
  auto raw = engine.tracked_distribution();
  BigRational total = 0;
  for (const auto& [k, w] : raw) total += w;
  CountDistribution out;
  if (total == 0) return out;
  for (auto& [k, w] : raw) {
    // Tracked predicates may repeat; engine indices follow first occurrence.
    CountVector key;
    for (const auto& p : predicates) key.push_back(k[engine.var_of(p)]);
    out[key] += w / total;
  }
  return out;
}

CountDistribution count_histogram(const ExactDistribution& distribution, const std::vector<std::string>& predicates) {
  CountDistribution out;
  for (const auto& [m, w] : distribution) {
    CountVector key;
    for (const auto& p : predicates) key.push_back(m.count(p));
    out[key] += w;
  }
  return out;
}

CountDistribution mln_count_distribution_brute(const MlnSpec& spec, const std::vector<std::string>& predicates,
                                               const BruteOptions& options, double rel_error) {
  const int n = spec.domain_size;
  std::vector<Formula> hard;
  Vocabulary vocab;
  struct Soft {
    BigRational weight;
    std::vector<Formula> groundings;
  };
  std::vector<Soft> soft;
  for (const auto& mf : spec.formulas) {
    vocab.merge(vocabulary_of(mf.formula));
    const unsigned fv = free_variables(mf.formula);
    std::vector<Formula> groundings;
    for (int i = 1; i <= ((fv & 1u) ? n : 1); ++i)
      for (int j = 1; j <= ((fv & 2u) ? n : 1); ++j) {
        Formula g = mf.formula;
        if (fv & 1u) g = substitute(g, Var::X, Term::element(i));
        if (fv & 2u) g = substitute(g, Var::Y, Term::element(j));
        groundings.push_back(ground(g, n));
      }
    if (!mf.weight) {
      for (auto& g : groundings) hard.push_back(std::move(g));
    } else {
      soft.push_back(Soft{exp_rational(*mf.weight, rel_error), std::move(groundings)});
    }
  }
  Problem p;
  p.sentence = Formula::conjunction(hard);
  p.domain_size = n;
  p.vocabulary = vocab;
  p.cardinality = Formula::top();
  CountDistribution raw;
  BigRational total = 0;
  brute_enumerate(
      p,
      [&](const Model& m, const BigRational&) {
        BigRational w = 1;
        for (const auto& s : soft) {
          unsigned long sat = 0;
          for (const auto& g : s.groundings) sat += evaluate(m, g) ? 1 : 0;
          BigRational f;
          mpz_pow_ui(f.get_num_mpz_t(), s.weight.get_num_mpz_t(), sat);
          mpz_pow_ui(f.get_den_mpz_t(), s.weight.get_den_mpz_t(), sat);
          w *= f;
        }
        CountVector key;
        for (const auto& pr : predicates) key.push_back(m.count(pr));
        raw[key] += w;
        total += w;
      },
      options);
  if (total == 0) return {};
  for (auto& [k, w] : raw) w /= total;
  return raw;
}

// ---------------------------------------------------------------------------

double dkw_bound(long n_samples, int k, double alpha) {
  if (n_samples < 1 || k < 1 || !(alpha > 0 && alpha < 1)) throw Error("dkw_bound: invalid arguments");
  const double nn = static_cast<double>(n_samples);
  const double c = k == 1 ? 2.0 : static_cast<double>(k) * (nn + 1);
  return std::sqrt(std::log(c / alpha) / (2 * nn));
}

namespace {

KsResult finish(double deviation, long n, int k, double alpha) {
  KsResult r;
  r.max_deviation = deviation;
  r.n_samples = n;
  r.k = k;
  r.alpha = alpha;
  r.dkw_bound = dkw_bound(n, k, alpha);
  r.rejected = deviation > r.dkw_bound;
  return r;
}

}  // namespace

KsResult ks_test(const EmpiricalDistribution<std::string>& samples, const std::map<std::string, BigRational>& reference,
                 double alpha) {
  if (samples.n_samples == 0) throw Error("ks_test: no samples");
  std::set<std::string> keys;
  for (const auto& [k, v] : samples.frequency) keys.insert(k);
  for (const auto& [k, v] : reference) keys.insert(k);
  BigRational emp = 0, ref = 0, worst = 0;
  const BigRational scale(1, samples.n_samples);
  for (const auto& k : keys) {
    auto e = samples.frequency.find(k);
    if (e != samples.frequency.end()) emp += BigRational(e->second) * scale;
    auto r = reference.find(k);
    if (r != reference.end()) ref += r->second;
    BigRational d = abs(BigRational(emp - ref));
    if (d > worst) worst = d;
  }
  return finish(worst.get_d(), samples.n_samples, 1, alpha);
}

KsResult ks_test(const EmpiricalDistribution<CountVector>& samples, const CountDistribution& reference, double alpha) {
  if (samples.n_samples == 0) throw Error("ks_test: no samples");
  std::size_t dim = 0;
  if (!samples.frequency.empty()) dim = samples.frequency.begin()->first.size();
  if (!reference.empty()) dim = std::max(dim, reference.begin()->first.size());
  std::vector<std::set<long>> axes(dim);
  for (const auto& [k, v] : samples.frequency)
    for (std::size_t d = 0; d < dim; ++d) axes[d].insert(k[d]);
  for (const auto& [k, v] : reference)
    for (std::size_t d = 0; d < dim; ++d) axes[d].insert(k[d]);
  std::vector<std::vector<long>> grid(dim);
  for (std::size_t d = 0; d < dim; ++d) grid[d].assign(axes[d].begin(), axes[d].end());
  // Supremum of |F_n - F| is attained at grid points built from support coordinates.
  std::vector<std::pair<CountVector, BigRational>> diff;
  std::map<CountVector, BigRational> mass;
  for (const auto& [k, c] : samples.frequency) mass[k] += BigRational(c, samples.n_samples);
  for (const auto& [k, w] : reference) mass[k] -= w;
  for (auto& [k, w] : mass) {
    w.canonicalize();
    diff.emplace_back(k, w);
  }
  BigRational worst = 0;
  std::vector<std::size_t> idx(dim, 0);
  while (dim > 0) {
    BigRational f = 0;
    for (const auto& [k, w] : diff) {
      bool below = true;
      for (std::size_t d = 0; d < dim && below; ++d) below = k[d] <= grid[d][idx[d]];
      if (below) f += w;
    }
    BigRational a = abs(f);
    if (a > worst) worst = a;
    std::size_t d = 0;
    while (d < dim && ++idx[d] == grid[d].size()) idx[d++] = 0;
    if (d == dim) break;
  }
  return finish(worst.get_d(), samples.n_samples, static_cast<int>(std::max<std::size_t>(dim, 1)), alpha);
}

// ---------------------------------------------------------------------------

int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LIFTGEN_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

void for_each_sample(const Sampler& sampler, std::uint64_t seed, long count, int threads, const SampleVisitor& visit,
                     bool trace) {
  const long chunks = (count + kChunkSize - 1) / kChunkSize;
  auto run_chunk = [&](long c) {
    RandomSource rng(seed + static_cast<std::uint64_t>(c));
    const long end = std::min(count, (c + 1) * kChunkSize);
    BigRational p;
    for (long i = c * kChunkSize; i < end; ++i) {
      Structure s = sampler.sample_structure(rng, trace ? &p : nullptr);
      visit(i, s, trace ? &p : nullptr);
    }
  };
  threads = static_cast<int>(std::min<long>(std::max(1, threads), std::max(1L, chunks)));
  if (threads == 1) {
    for (long c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<long> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      try {
        for (long c; (c = next++) < chunks;) run_chunk(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

ValidateReport validate(const Sampler& sampler, const Problem& problem, const ValidateOptions& options) {
  ValidateReport report;
  const int threads = resolve_threads(options.threads);
  std::mutex mu;
  if (options.mode == ValidateMode::Model) {
    auto reference = visible_distribution(problem, options.brute);
    if (reference.empty()) throw NoModels("sentence has no models over this domain");
    EmpiricalDistribution<std::string> samples;
    for_each_sample(sampler, options.seed, options.samples, threads, [&](long, const Structure& s, const BigRational*) {
      std::string key = sampler.model_key(s);
      std::lock_guard<std::mutex> lock(mu);
      samples.add(key);
    });
    report.ks = ks_test(samples, reference, options.alpha);
    report.distinct_outcomes = static_cast<long>(samples.frequency.size());
    report.reference_outcomes = static_cast<long>(reference.size());
  } else {
    if (options.predicates.empty()) throw Error("count mode needs at least one predicate");
    auto reference = count_distribution(problem, options.predicates);
    if (reference.empty()) throw NoModels("sentence has no models over this domain");
    EmpiricalDistribution<CountVector> samples;
    for_each_sample(sampler, options.seed, options.samples, threads, [&](long, const Structure& s, const BigRational*) {
      CountVector key = sampler.count_vector(s, options.predicates);
      std::lock_guard<std::mutex> lock(mu);
      samples.add(key);
    });
    report.ks = ks_test(samples, reference, options.alpha);
    report.distinct_outcomes = static_cast<long>(samples.frequency.size());
    report.reference_outcomes = static_cast<long>(reference.size());
  }
  return report;
}

ValidateReport validate(const Problem& problem, const ValidateOptions& options) {
  Sampler sampler(problem);
  return validate(sampler, problem, options);
}

}  // namespace liftgen
