#pragma once

// Seeded generator of small two-variable sentences with random weights.

#include <random>
#include <string>
#include <vector>

#include "liftgen/logic.hpp"
#include "liftgen/textio.hpp"

namespace corpus {

using liftgen::Formula;
using liftgen::Term;
using liftgen::Var;

struct Options {
  std::vector<std::string> binary{"E", "F"};
  std::vector<std::string> unary{"P", "Q"};
  bool universal_only = false;  // UFO²: ∀x∀y over a quantifier-free matrix
};

class Generator {
 public:
  Generator(unsigned seed, Options options) : rng_(seed), opt_(std::move(options)) {}

  // Quantifier-free formula over the given free variables (bit 0 x, bit 1 y).
  Formula matrix(int depth, unsigned vars) {
    if (depth == 0 || pick(3) == 0) return atom(vars);
    switch (pick(5)) {
      case 0: return Formula::negation(matrix(depth - 1, vars));
      case 1: return Formula::conjunction({matrix(depth - 1, vars), matrix(depth - 1, vars)});
      case 2: return Formula::disjunction({matrix(depth - 1, vars), matrix(depth - 1, vars)});
      case 3: return Formula::implies(matrix(depth - 1, vars), matrix(depth - 1, vars));
      default: return Formula::iff(matrix(depth - 1, vars), matrix(depth - 1, vars));
    }
  }

  Formula clause() {
    using F = Formula;
    if (opt_.universal_only) return F::forall(Var::X, F::forall(Var::Y, matrix(2, 3)));
    switch (pick(7)) {
      case 0: return F::forall(Var::X, F::forall(Var::Y, matrix(2, 3)));
      case 1: return F::forall(Var::X, F::exists(Var::Y, matrix(2, 3)));
      case 2: return F::exists(Var::X, F::forall(Var::Y, matrix(1, 3)));
      case 3: return F::forall(Var::X, F::implies(matrix(1, 1), F::exists(Var::Y, matrix(1, 3))));
      case 4: return F::exists(Var::X, matrix(1, 1));
      case 5: return F::negation(F::forall(Var::X, F::exists(Var::Y, matrix(1, 3))));
      default: return F::forall(Var::Y, F::iff(matrix(1, 2), F::forall(Var::X, matrix(1, 3))));
    }
  }

  liftgen::Problem problem(int n) {
    std::vector<Formula> parts{clause()};
    if (pick(2)) parts.push_back(clause());
    liftgen::Weighting w;
    static const char* values[] = {"1", "2", "1/2", "3"};
    for (const auto& p : opt_.binary) w[p] = {liftgen::parse_rational(values[pick(4)]), liftgen::parse_rational(values[pick(4)])};
    for (const auto& p : opt_.unary) w[p] = {liftgen::parse_rational(values[pick(4)]), liftgen::parse_rational(values[pick(4)])};
    liftgen::Problem p = liftgen::make_problem(Formula::conjunction(parts), n);
    // Predicates the sentence does not mention are still part of the vocabulary.
    for (const auto& b : opt_.binary) p.vocabulary.add(b, 2);
    for (const auto& u : opt_.unary) p.vocabulary.add(u, 1);
    p.weights = std::move(w);
    return p;
  }

 private:
  int pick(int k) { return std::uniform_int_distribution<int>(0, k - 1)(rng_); }

  Term var(unsigned vars) {
    if (vars == 3) return Term::variable(pick(2) ? Var::Y : Var::X);
    return Term::variable(vars == 1 ? Var::X : Var::Y);
  }

  Formula atom(unsigned vars) {
    const std::size_t total = opt_.binary.size() + opt_.unary.size();
    const std::size_t i = static_cast<std::size_t>(pick(static_cast<int>(total)));
    if (i < opt_.binary.size()) return Formula::atom(opt_.binary[i], {var(vars), var(vars)});
    return Formula::atom(opt_.unary[i - opt_.binary.size()], {var(vars)});
  }

  std::mt19937 rng_;
  Options opt_;
};

}  // namespace corpus
