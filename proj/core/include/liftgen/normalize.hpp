#pragma once

#include <string>
#include <utility>
#include <vector>

#include "liftgen/logic.hpp"
#include "liftgen/numeric.hpp"
#include "liftgen/textio.hpp"

namespace liftgen {

// A transformed problem together with how to get back: models of the
// transformed problem map to models of the source by taking the reduct onto
// `kept`; `multiplicity` source models' worth of weight per transformed model
// class (the count ratio of the reduction).
struct Reduction {
  Problem transformed;
  std::vector<std::string> kept;
  BigRational multiplicity{1};

  Model back_map(const Model& model) const { return model.restricted_to(kept); }
};

// ∀x∀y: universal ∧ ⋀_k ∀x∃y: existentials[k]
struct SnfSentence {
  Formula universal = Formula::top();
  std::vector<Formula> existentials;

  Formula to_formula() const;
};

struct SnfReduction : Reduction {
  SnfSentence snf;
};

struct TseitinEntry {
  std::string z;  // unary Tseitin predicate Z_k
  std::string r;  // binary R_k with ∀x: Z_k(x) <-> ∃y: R_k(x,y)
};

struct TseitinReduction : Reduction {
  std::vector<TseitinEntry> registry;
  SnfSentence relaxed;  // ψ' and the R_k(x,y) atoms
};

// Only ∃=k remains afterwards; ∃=k with k > n becomes ⊥.
Formula expand_counting(const Formula& sentence, int domain_size);

// Requires a sentence without counting quantifiers.
SnfReduction to_snf(const Problem& problem);

// The transformed sentence carries the evidence Z_k(e) for every element and
// every k, so its models correspond one-to-one to the source models.
TseitinReduction tseitin_existentials(const Problem& problem, const SnfSentence& snf);

// Replaces top-level ∀x∃=k y and ∃=k x∀y conjuncts by cardinality
// constraints over FO² sentences. Counting quantifiers elsewhere are rejected.
Reduction sc2_to_cc(const Problem& problem);

// Soft formula i becomes ∀: __xi<i> <-> α_i with weight exp(w_i) rationalized
// to the given relative error; hard formulas are closed and conjoined.
Reduction mln_to_wfoms(const MlnSpec& spec, double rel_error = 1e-12);

// Everything the lifted engine needs: the SNF matrix, the existential
// conjuncts φ_k(x,y), and the cardinality constraint.
struct LiftedProblem {
  int domain_size = 1;
  Vocabulary vocabulary;
  Weighting weights;
  Formula matrix = Formula::top();
  std::vector<Formula> existentials;
  Formula cardinality = Formula::top();
  std::vector<std::string> original;  // vocabulary of the input problem
  std::vector<std::string> visible;   // predicates reported to the user
  BigRational multiplicity{1};

  WeightPair weight(const std::string& p) const;
};

LiftedProblem compile(const Problem& problem);

}  // namespace liftgen
