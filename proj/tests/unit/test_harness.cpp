#include <doctest.h>

#include <cstdlib>

#include "../support/oracles.hpp"
#include "liftgen/harness.hpp"

using namespace liftgen;

namespace {

template <class K>
BigRational mass(const std::map<K, BigRational>& d) {
  BigRational s = 0;
  for (const auto& [k, p] : d) s += p;
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("preset catalog") {
    CHECK(preset_names().size() == 10);
    CHECK(wfomc(make_preset("permutations", 4).problem) == 24);
    CHECK(wfomc(make_preset("derangements", 4).problem) == 9);
    for (int n = 1; n <= 7; ++n) {
      CHECK(wfomc(make_preset("permutations", n).problem) == BigRational(oracle::fact(n)));
      CHECK(wfomc(make_preset("derangements", n).problem) == BigRational(oracle::subfactorial(n)));
      CHECK(wfomc(make_preset("functions", n).problem) == BigRational(oracle::pow(n, n)));
      CHECK(wfomc(make_preset("functions-no-fixpoint", n).problem) == BigRational(oracle::pow(n - 1, n)));
      CHECK(wfomc(make_preset("k-regular", n, 2).problem) == BigRational(oracle::two_regular(n)));
    }
    CHECK_THROWS_AS(make_preset("cliques", 3), Error);
    CHECK(make_preset("k-regular", 3, 3).warnings.size() == 1);
    CHECK(wfomc(make_preset("k-regular", 3, 3).problem) == 0);
    CHECK(make_preset("k-regular", 5, 2).warnings.empty());
  }

  TEST_CASE("mln presets") {
    for (const auto& name : preset_names()) CHECK(is_mln_preset(name) == make_preset(name, 3).mln.has_value());
    Preset d = make_preset("deskmate", 4);
    LiftedProblem lp = compile(d.problem);
    auto ccs = cardinality_predicates(lp.cardinality);
    CHECK(ccs.count("mate") == 1);
    CHECK(lp.visible == std::vector<std::string>{"fr", "mate"});
    CHECK(d.tested == std::vector<std::string>{"mate", "fr"});
  }

  TEST_CASE("exact distributions") {
    auto g = exact_distribution(make_preset("no-isolated-vertices", 3).problem);
    CHECK(g.size() == 4);
    for (const auto& [m, p] : g) CHECK(p == BigRational(1, 4));

    Problem tc = make_preset("two-colored-graphs", 4).problem;
    tc.weights["Red"] = {2, 1};
    auto d = exact_distribution(tc);
    CHECK(mass(d) == 1);
    BigRational two_red = 0;
    for (const auto& [m, p] : d)
      if (m.count("Red") == 2) two_red += p;
    CHECK(two_red == BigRational(384, 721));
    CHECK(exact_distribution(make_preset("no-isolated-vertices", 1).problem).empty());
  }

  TEST_CASE("count distributions") {
    Problem ex2 = parse_problem("domain 2\nsentence forall x: forall y: ((E(x,y) -> E(y,x)) & ~E(x,x))\nweight E 3 1\n");
    auto d = count_distribution(ex2, {"E"});
    CHECK(d.size() == 2);
    CHECK(d[{0}] == BigRational(1, 10));
    CHECK(d[{2}] == BigRational(9, 10));
    CHECK_THROWS_AS(count_distribution(ex2, {"F"}), Error);
  }

  TEST_CASE("lifted count distributions match enumeration") {
    for (const auto& name : preset_names())
      for (int n = 1; n <= 3; ++n) {
        Preset p = make_preset(name, n);
        std::vector<std::string> preds = p.tested.empty() ? p.problem.output_predicates() : p.tested;
        CAPTURE(name);
        CAPTURE(n);
        BruteOptions wide;
        wide.max_atoms = 64;
        auto exact = exact_distribution(p.problem, wide);
        auto lifted = count_distribution(p.problem, preds);
        if (exact.empty()) {
          CHECK(lifted.empty());
          continue;
        }
        CHECK(mass(lifted) == 1);
        CHECK(lifted == count_histogram(exact, preds));
      }
  }

  TEST_CASE("friends-smokers count distribution against ground semantics") {
    Preset p = make_preset("friends-smokers", 5);
    auto lifted = count_distribution(p.problem, p.tested);
    auto ground_dist = mln_count_distribution_brute(*p.mln, p.tested);
    CHECK(mass(lifted) == 1);
    CHECK(lifted == ground_dist);
    Preset e = make_preset("employment", 3);
    CHECK(count_distribution(e.problem, e.tested) == mln_count_distribution_brute(*e.mln, e.tested));
  }

  TEST_CASE("dkw bounds") {
    CHECK(dkw_bound(100000, 2, 0.05) == doctest::Approx(0.0087).epsilon(0.01));
    CHECK(dkw_bound(100000, 1, 0.05) == doctest::Approx(std::sqrt(std::log(40.0) / 2e5)));
    CHECK(dkw_bound(100000, 1, 0.05) == doctest::Approx(0.0043).epsilon(0.01));
    double prev = 1e9;
    for (long n = 10; n <= 10000000; n *= 10) {
      for (int k : {1, 2, 3}) CHECK(dkw_bound(n, k, 0.05) > 0);
      double b = dkw_bound(n, 2, 0.05);
      CHECK(b < prev);
      prev = b;
    }
    CHECK_THROWS_AS(dkw_bound(0, 1, 0.05), Error);
  }

  TEST_CASE("empirical distributions") {
    EmpiricalDistribution<std::string> a, b;
    a.add("x");
    a.add("y", 3);
    b.add("x", 2);
    a.merge(b);
    CHECK(a.n_samples == 6);
    CHECK(a.frequency["x"] == 3);
    long total = 0;
    for (const auto& [k, c] : a.frequency) total += c;
    CHECK(total == a.n_samples);
  }

  TEST_CASE("ks tests") {
    std::map<std::string, BigRational> ref{{"00", BigRational(1, 4)}, {"01", BigRational(3, 4)}};
    EmpiricalDistribution<std::string> exact;
    exact.add("00", 250);
    exact.add("01", 750);
    KsResult r = ks_test(exact, ref, 0.05);
    CHECK(r.max_deviation == 0);
    CHECK_FALSE(r.rejected);
    EmpiricalDistribution<std::string> biased;
    biased.add("01", 1000);
    KsResult r2 = ks_test(biased, ref, 0.05);
    CHECK(r2.max_deviation == doctest::Approx(0.25));
    CHECK(r2.rejected);
    CHECK(r2.rejected == (r2.max_deviation > r2.dkw_bound));
    CHECK_THROWS_AS(ks_test(EmpiricalDistribution<std::string>{}, ref, 0.05), Error);

    CountDistribution cref{{{0, 0}, BigRational(1, 2)}, {{1, 1}, BigRational(1, 2)}};
    EmpiricalDistribution<CountVector> swapped;
    swapped.add({0, 1}, 500);
    swapped.add({1, 0}, 500);
    KsResult r3 = ks_test(swapped, cref, 0.05);
    CHECK(r3.k == 2);
    CHECK(r3.max_deviation == doctest::Approx(0.5));
  }

  TEST_CASE("own samples pass, a constant sampler fails") {
    Problem g = make_preset("no-isolated-vertices", 3).problem;
    Sampler s(g);
    auto ref = visible_distribution(g);
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      EmpiricalDistribution<std::string> emp;
      for_each_sample(s, seed * 1000, 10000, 1,
                      [&](long, const Structure& st, const BigRational*) { emp.add(s.model_key(st)); });
      rejected += ks_test(emp, ref, 0.05).rejected;
    }
    CHECK(rejected <= 1);

    EmpiricalDistribution<std::string> constant;
    constant.add(ref.begin()->first, 100000);
    CHECK(ks_test(constant, ref, 0.05).rejected);
  }

  TEST_CASE("validation pipeline") {
    ValidateOptions opt;
    opt.samples = 20000;
    opt.threads = 2;
    ValidateReport r = validate(make_preset("functions", 3).problem, opt);
    CHECK(r.reference_outcomes == 27);
    CHECK(r.distinct_outcomes == 27);
    CHECK_FALSE(r.ks.rejected);

    opt.mode = ValidateMode::Count;
    opt.predicates = {"fr", "sm"};
    ValidateReport c = validate(make_preset("friends-smokers", 5).problem, opt);
    CHECK(c.ks.k == 2);
    CHECK_FALSE(c.ks.rejected);
  }

  TEST_CASE("sample streams do not depend on the thread count") {
    Sampler s(make_preset("employment", 5).problem);
    auto run = [&](int threads) {
      std::vector<std::string> keys(10000);
      for_each_sample(s, 77, static_cast<long>(keys.size()), threads,
                      [&](long i, const Structure& st, const BigRational*) { keys[i] = s.model_key(st); });
      return keys;
    };
    auto one = run(1);
    CHECK(one == run(3));
    CHECK(one == run(1));
  }

  TEST_CASE("thread cap from the environment") {
    setenv("LIFTGEN_THREADS", "2", 1);
    CHECK(resolve_threads(8) == 2);
    CHECK(resolve_threads(1) == 1);
    unsetenv("LIFTGEN_THREADS");
    CHECK(resolve_threads(5) == 5);
    CHECK(resolve_threads(0) >= 1);
  }

  TEST_CASE("model keys follow ground atom order") {
    Vocabulary v;
    v.add("E", 2);
    v.add("P", 1);
    Model m;
    m.vocabulary = v;
    m.domain_size = 2;
    m.true_atoms = {{"E", {1, 2}}, {"P", {2}}};
    CHECK(model_key(m, v) == "010001");
  }
}
