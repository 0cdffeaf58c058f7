#include <doctest.h>

#include "../support/corpus.hpp"
#include "../support/oracles.hpp"
#include "liftgen/logic.hpp"
#include "liftgen/textio.hpp"

using namespace liftgen;

namespace {

Model model_of(const Vocabulary& v, int n, std::initializer_list<GroundAtom> atoms) {
  Model m;
  m.vocabulary = v;
  m.domain_size = n;
  m.true_atoms.insert(atoms.begin(), atoms.end());
  return m;
}

Formula ga(const std::string& p, std::vector<int> args) {
  std::vector<Term> t;
  for (int a : args) t.push_back(Term::element(a));
  return Formula::atom(p, t);
}

// Same truth value under every total interpretation of the vocabulary.
void check_equivalent(const Formula& a, const Formula& b, const Vocabulary& v, int n) {
  oracle::World w = oracle::make_world(v, n);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << w.index.size()); ++bits) {
    w.bits = bits;
    Model m = oracle::to_model(w, v);
    REQUIRE(evaluate(m, a) == evaluate(m, b));
  }
}

}  // namespace

TEST_SUITE("logic") {
  TEST_CASE("ground expands forall and exists over the domain") {
    Vocabulary v;
    v.add("R", 2);
    Formula g = ground(parse_formula("forall x: exists y: R(x,y)"), 2);
    CHECK_FALSE(has_quantifier(g));
    Formula expected = Formula::conjunction({Formula::disjunction({ga("R", {1, 1}), ga("R", {1, 2})}),
                                             Formula::disjunction({ga("R", {2, 1}), ga("R", {2, 2})})});
    check_equivalent(g, expected, v, 2);
  }

  TEST_CASE("ground of an irreflexivity axiom on one element") {
    Vocabulary v;
    v.add("E", 2);
    Formula g = ground(parse_formula("forall x: ~E(x,x)"), 1);
    check_equivalent(g, Formula::negation(ga("E", {1, 1})), v, 1);
  }

  TEST_CASE("ground of exactly-one is exactly one per row") {
    Vocabulary v;
    v.add("f", 2);
    Formula g = ground(parse_formula("forall x: exists[=1] y: f(x,y)"), 2);
    CHECK_FALSE(has_quantifier(g));
    auto exactly_one = [](Formula a, Formula b) {
      return Formula::disjunction({Formula::conjunction({a, Formula::negation(b)}),
                                   Formula::conjunction({Formula::negation(a), b})});
    };
    check_equivalent(g,
                     Formula::conjunction({exactly_one(ga("f", {1, 1}), ga("f", {1, 2})),
                                           exactly_one(ga("f", {2, 1}), ga("f", {2, 2}))}),
                     v, 2);
  }

  TEST_CASE("ground rejects open formulas") {
    CHECK_THROWS_WITH_AS(ground(parse_formula("exists y: R(x,y)"), 2), doctest::Contains("free variables"), Error);
  }

  TEST_CASE("ground is pure") {
    Formula s = parse_formula("forall x: exists[<=1] y: (E(x,y) & P(y))");
    CHECK(ground(s, 3) == ground(s, 3));
  }

  TEST_CASE("evaluate on small models") {
    Vocabulary v;
    v.add("E", 2);
    Model m = model_of(v, 2, {{"E", {1, 2}}, {"E", {2, 1}}});
    CHECK(evaluate(m, Formula::negation(ga("E", {1, 1}))));
    CHECK(evaluate(m, Formula::cardinality("E", Comparison::Eq, 2)));
    CHECK_FALSE(evaluate(m, Formula::cardinality("E", Comparison::Gt, 2)));

    Vocabulary r;
    r.add("R", 2);
    Model empty = model_of(r, 2, {});
    CHECK_FALSE(evaluate(empty, Formula::disjunction({ga("R", {1, 1}), ga("R", {1, 2})})));
  }

  TEST_CASE("evaluate rejects unknown predicates") {
    Vocabulary v;
    v.add("E", 2);
    Model m = model_of(v, 2, {});
    CHECK_THROWS_AS(evaluate(m, ga("Q", {1})), Error);
    CHECK_THROWS_AS(evaluate(m, Formula::cardinality("Q", Comparison::Eq, 0)), Error);
  }

  TEST_CASE("evaluate of the grounding agrees with direct satisfaction") {
    corpus::Options opt;
    opt.binary = {"E"};
    opt.unary = {"P"};
    for (unsigned seed = 0; seed < 25; ++seed) {
      corpus::Generator gen(seed, opt);
      for (int n = 1; n <= 3; ++n) {
        Problem p = gen.problem(n);
        CAPTURE(to_string(p.sentence));
        Formula g = ground(p.sentence, n);
        oracle::World w = oracle::make_world(p.vocabulary, n);
        for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << w.index.size()); ++bits) {
          w.bits = bits;
          REQUIRE(evaluate(oracle::to_model(w, p.vocabulary), g) == oracle::satisfies(w, p.sentence));
        }
      }
    }
  }

  TEST_CASE("counting quantifiers ground to their counts") {
    Vocabulary v;
    v.add("E", 2);
    for (const char* text : {"forall x: exists[<=1] y: E(x,y)", "exists[>=2] x: E(x,x)",
                             "forall y: exists[=2] x: E(x,y)", "exists[=0] x: forall y: E(x,y)"}) {
      CAPTURE(text);
      Formula s = parse_formula(text);
      Formula g = ground(s, 3);
      oracle::World w = oracle::make_world(v, 3);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << 9); ++bits) {
        w.bits = bits;
        REQUIRE(evaluate(oracle::to_model(w, v), g) == oracle::satisfies(w, s));
      }
    }
  }

  TEST_CASE("ground atoms are sorted by predicate then arguments") {
    Vocabulary v;
    v.add("b", 1);
    v.add("A", 2);
    auto atoms = ground_atoms(v, 2);
    REQUIRE(atoms.size() == 6);
    CHECK(atoms.front() == GroundAtom{"A", {1, 1}});
    CHECK(atoms[3] == GroundAtom{"A", {2, 2}});
    CHECK(atoms.back() == GroundAtom{"b", {2}});
    CHECK(std::is_sorted(atoms.begin(), atoms.end()));
  }

  TEST_CASE("vocabulary rejects conflicting arities") {
    Vocabulary v;
    v.add("E", 2);
    CHECK_THROWS_AS(v.add("E", 1), Error);
    CHECK_THROWS_AS(v.add("T", 3), Error);
  }

  TEST_CASE("free variables and substitution") {
    Formula f = parse_formula("exists y: E(x,y)");
    CHECK(free_variables(f) == 1u);
    CHECK(free_variables(substitute(f, Var::X, Term::element(2))) == 0u);
    CHECK(free_variables(parse_formula("forall x: exists y: E(x,y)")) == 0u);
  }
}
