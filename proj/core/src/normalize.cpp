#include "liftgen/normalize.hpp"

namespace liftgen {

namespace {

class NameSupply {
 public:
  explicit NameSupply(Vocabulary& vocab) : vocab_(vocab) {}

  std::string fresh(const std::string& prefix, int arity) {
    int& counter = counters_[prefix];
    while (true) {
      std::string name = "__" + prefix + std::to_string(++counter);
      if (!vocab_.contains(name)) {
        vocab_.add(name, arity);
        return name;
      }
    }
  }

 private:
  Vocabulary& vocab_;
  std::map<std::string, int> counters_;
};

Formula var_atom(const std::string& p, std::initializer_list<Var> vars) {
  std::vector<Term> args;
  for (Var v : vars) args.push_back(Term::variable(v));
  return Formula::atom(p, std::move(args));
}

// Renames so that `outer` becomes x (and the other variable y).
Formula with_outer(const Formula& f, Var outer) { return outer == Var::X ? f : swap_variables(f); }

std::vector<std::string> names_of(const Vocabulary& v) {
  std::vector<std::string> out;
  for (const auto& [name, arity] : v) out.push_back(name);
  return out;
}

class SnfBuilder {
 public:
  explicit SnfBuilder(Vocabulary& vocab) : names_(vocab) {}

  void add_conjunct(const Formula& c) {
    if (!has_quantifier(c)) {
      universal_.push_back(abstract(c));
      return;
    }
    if (c.kind() == Connective::Forall) {
      const Var v = c.variable();
      const Formula& body = c.child(0);
      if (!has_quantifier(body)) {
        universal_.push_back(with_outer(body, v));
        return;
      }
      if ((body.kind() == Connective::Forall || body.kind() == Connective::Exists) &&
          body.variable() != v && !has_quantifier(body.child(0))) {
        Formula inner = with_outer(body.child(0), v);
        if (body.kind() == Connective::Forall) {
          universal_.push_back(inner);
        } else {
          existential_.push_back(inner);
        }
        return;
      }
      universal_.push_back(with_outer(abstract(body), v));
      return;
    }
    if (c.kind() == Connective::Exists && !has_quantifier(c.child(0))) {
      // ∃v: φ(v) as ∀x∃y: φ(y)
      existential_.push_back(with_outer(c.child(0), other(c.variable())));
      return;
    }
    universal_.push_back(abstract(c));
  }

  SnfSentence result() const {
    SnfSentence s;
    s.universal = Formula::conjunction(universal_);
    s.existentials = existential_;
    return s;
  }

 private:
  // Replaces every quantified subformula, innermost first, by a fresh atom
  // A(u) (or A() when closed) with the two defining axioms.
  Formula abstract(const Formula& f) {
    switch (f.kind()) {
      case Connective::Top:
      case Connective::Bottom:
      case Connective::Atom:
      case Connective::Cardinality:
        return f;
      case Connective::Counting:
        throw UnsupportedFragment("counting quantifier present: run expand_counting / sc2 path first");
      case Connective::Forall:
      case Connective::Exists: {
        const Var v = f.variable();
        Formula body = abstract(f.child(0));
        const bool universal = f.kind() == Connective::Forall;
        const unsigned fv = free_variables(body) & ~(1u << static_cast<int>(v));
        Formula a_here, a_norm, body_norm;
        if (fv == 0) {
          std::string a = names_.fresh("A", 0);
          a_here = a_norm = Formula::atom(a, {});
          body_norm = with_outer(body, other(v));  // body over y only
        } else {
          std::string a = names_.fresh("A", 1);
          a_here = var_atom(a, {other(v)});
          a_norm = var_atom(a, {Var::X});
          body_norm = with_outer(body, other(v));
        }
        // Q = ∀: ∀x∀y (A → φ), ∀x∃y (φ → A).  Q = ∃: ∀x∃y (A → φ), ∀x∀y (φ → A).
        Formula forward = Formula::implies(a_norm, body_norm);
        Formula backward = Formula::implies(body_norm, a_norm);
        if (universal) {
          universal_.push_back(forward);
          existential_.push_back(backward);
        } else {
          existential_.push_back(forward);
          universal_.push_back(backward);
        }
        return a_here;
      }
      default: {
        std::vector<Formula> ch;
        for (const auto& c : f.children()) ch.push_back(abstract(c));
        switch (f.kind()) {
          case Connective::Not: return Formula::negation(ch[0]);
          case Connective::And: return Formula::conjunction(ch);
          case Connective::Or: return Formula::disjunction(ch);
          case Connective::Implies: return Formula::implies(ch[0], ch[1]);
          case Connective::Iff: return Formula::iff(ch[0], ch[1]);
          default: return f;
        }
      }
    }
  }

  NameSupply names_;
  std::vector<Formula> universal_;
  std::vector<Formula> existential_;
};

// ∃=0 v: φ is ∀v: ¬φ wherever it occurs.
Formula eliminate_zero_counting(const Formula& f) {
  if (f.children().empty()) return f;
  std::vector<Formula> ch;
  for (const auto& c : f.children()) ch.push_back(eliminate_zero_counting(c));
  switch (f.kind()) {
    case Connective::Counting:
      if (f.mode() == CountMode::Exactly && f.count() == 0)
        return Formula::forall(f.variable(), Formula::negation(ch[0]));
      return Formula::counting(f.variable(), f.mode(), f.count(), ch[0]);
    case Connective::Not: return Formula::negation(ch[0]);
    case Connective::And: return Formula::conjunction(ch);
    case Connective::Or: return Formula::disjunction(ch);
    case Connective::Implies: return Formula::implies(ch[0], ch[1]);
    case Connective::Iff: return Formula::iff(ch[0], ch[1]);
    case Connective::Forall: return Formula::forall(f.variable(), ch[0]);
    case Connective::Exists: return Formula::exists(f.variable(), ch[0]);
    default: return f;
  }
}

}  // namespace

Formula SnfSentence::to_formula() const {
  std::vector<Formula> parts;
  if (!universal.is_top())
    parts.push_back(Formula::forall(Var::X, Formula::forall(Var::Y, universal)));
  for (const auto& e : existentials) parts.push_back(Formula::forall(Var::X, Formula::exists(Var::Y, e)));
  return Formula::conjunction(std::move(parts));
}

Formula expand_counting(const Formula& f, int n) {
  if (f.kind() != Connective::Counting) {
    if (f.children().empty()) return f;
    std::vector<Formula> ch;
    for (const auto& c : f.children()) ch.push_back(expand_counting(c, n));
    switch (f.kind()) {
      case Connective::Not: return Formula::negation(ch[0]);
      case Connective::And: return Formula::conjunction(ch);
      case Connective::Or: return Formula::disjunction(ch);
      case Connective::Implies: return Formula::implies(ch[0], ch[1]);
      case Connective::Iff: return Formula::iff(ch[0], ch[1]);
      case Connective::Forall: return Formula::forall(f.variable(), ch[0]);
      case Connective::Exists: return Formula::exists(f.variable(), ch[0]);
      default: return f;
    }
  }
  Formula body = expand_counting(f.child(0), n);
  const Var v = f.variable();
  const int k = f.count();
  switch (f.mode()) {
    case CountMode::Exactly:
      return k > n ? Formula::bottom() : Formula::counting(v, CountMode::Exactly, k, body);
    case CountMode::AtMost: {
      std::vector<Formula> opts;
      for (int i = 0; i <= k && i <= n; ++i) opts.push_back(Formula::counting(v, CountMode::Exactly, i, body));
      return Formula::disjunction(std::move(opts));
    }
    case CountMode::AtLeast: {
      if (k == 0) return Formula::top();
      return Formula::negation(expand_counting(Formula::counting(v, CountMode::AtMost, k - 1, body), n));
    }
  }
  return f;
}

SnfReduction to_snf(const Problem& problem) {
  if (has_counting(problem.sentence))
    throw UnsupportedFragment("counting quantifier present: run expand_counting / sc2 path first");
  SnfReduction out;
  Vocabulary vocab = problem.vocabulary;
  SnfBuilder builder(vocab);
  for (const auto& c : conjuncts(problem.sentence)) builder.add_conjunct(c);
  out.snf = builder.result();
  out.transformed = problem;
  out.transformed.sentence = out.snf.to_formula();
  out.transformed.vocabulary = vocab;
  out.kept = names_of(problem.vocabulary);
  return out;
}

TseitinReduction tseitin_existentials(const Problem& problem, const SnfSentence& snf) {
  TseitinReduction out;
  Vocabulary vocab = problem.vocabulary;
  NameSupply names(vocab);
  std::vector<Formula> universal{snf.universal};
  std::vector<Formula> parts;
  for (const auto& phi : snf.existentials) {
    TseitinEntry e;
    const bool atomic = phi.kind() == Connective::Atom && phi.args().size() == 2 &&
                        phi.args()[0] == Term::variable(Var::X) && phi.args()[1] == Term::variable(Var::Y);
    if (atomic) {
      e.r = phi.predicate();
    } else {
      e.r = names.fresh("R", 2);
      universal.push_back(Formula::iff(var_atom(e.r, {Var::X, Var::Y}), phi));
    }
    e.z = names.fresh("Z", 1);
    out.relaxed.existentials.push_back(var_atom(e.r, {Var::X, Var::Y}));
    out.registry.push_back(e);
  }
  out.relaxed.universal = Formula::conjunction(universal);
  if (snf.existentials.empty()) {
    out.transformed = problem;
    out.kept = names_of(problem.vocabulary);
    return out;
  }
  parts.push_back(Formula::forall(Var::X, Formula::forall(Var::Y, out.relaxed.universal)));
  for (const auto& e : out.registry)
    parts.push_back(Formula::forall(
        Var::X, Formula::iff(var_atom(e.z, {Var::X}), Formula::exists(Var::Y, var_atom(e.r, {Var::X, Var::Y})))));
  for (int i = 1; i <= problem.domain_size; ++i)
    for (const auto& e : out.registry) parts.push_back(Formula::atom(e.z, {Term::element(i)}));
  out.transformed = problem;
  out.transformed.sentence = Formula::conjunction(std::move(parts));
  out.transformed.vocabulary = vocab;
  out.kept = names_of(problem.vocabulary);
  return out;
}

Reduction sc2_to_cc(const Problem& problem) {
  const int n = problem.domain_size;
  Vocabulary vocab = problem.vocabulary;
  NameSupply names(vocab);
  std::vector<Formula> fo2;
  std::vector<Formula> cc;
  if (!problem.cardinality.is_top()) cc.push_back(problem.cardinality);
  BigRational multiplicity = 1;
  const Formula expanded = simplify(expand_counting(problem.sentence, n));

  for (const auto& c : conjuncts(expanded)) {
    if (!has_counting(c)) {
      fo2.push_back(c);
      continue;
    }
    // ∀v ∃=k u: φ
    if (c.kind() == Connective::Forall && c.child(0).kind() == Connective::Counting &&
        c.child(0).mode() == CountMode::Exactly && c.child(0).variable() != c.variable() &&
        !has_quantifier(c.child(0).child(0))) {
      const int k = c.child(0).count();
      Formula phi = with_outer(c.child(0).child(0), c.variable());
      if (k == 0) {
        fo2.push_back(Formula::forall(Var::X, Formula::forall(Var::Y, Formula::negation(phi))));
        continue;
      }
      std::string p;
      if (phi.kind() == Connective::Atom && phi.args().size() == 2 &&
          phi.args()[0] == Term::variable(Var::X) && phi.args()[1] == Term::variable(Var::Y)) {
        p = phi.predicate();
      } else {
        p = names.fresh("P", 2);
        fo2.push_back(Formula::forall(Var::X, Formula::forall(Var::Y, Formula::iff(var_atom(p, {Var::X, Var::Y}), phi))));
      }
      cc.push_back(Formula::cardinality(p, Comparison::Eq, static_cast<long>(k) * n));
      if (k == 1) {
        fo2.push_back(Formula::forall(Var::X, Formula::exists(Var::Y, var_atom(p, {Var::X, Var::Y}))));
        continue;
      }
      std::vector<std::string> rs;
      for (int i = 0; i < k; ++i) rs.push_back(names.fresh("skR", 2));
      std::vector<Formula> any, disjoint;
      for (int i = 0; i < k; ++i) {
        any.push_back(var_atom(rs[i], {Var::X, Var::Y}));
        fo2.push_back(Formula::forall(Var::X, Formula::exists(Var::Y, var_atom(rs[i], {Var::X, Var::Y}))));
        for (int j = i + 1; j < k; ++j)
          disjoint.push_back(Formula::negation(
              Formula::conjunction({var_atom(rs[i], {Var::X, Var::Y}), var_atom(rs[j], {Var::X, Var::Y})})));
      }
      std::vector<Formula> body{Formula::iff(var_atom(p, {Var::X, Var::Y}), Formula::disjunction(any))};
      body.insert(body.end(), disjoint.begin(), disjoint.end());
      fo2.push_back(Formula::forall(Var::X, Formula::forall(Var::Y, Formula::conjunction(body))));
      BigInt per = factorial(static_cast<unsigned>(k));
      BigInt total;
      mpz_pow_ui(total.get_mpz_t(), per.get_mpz_t(), static_cast<unsigned long>(n));
      multiplicity *= BigRational(total);
      continue;
    }
    // ∃=k v ∀u: φ, or ∃=k v: φ(v)
    if (c.kind() == Connective::Counting && c.mode() == CountMode::Exactly) {
      const Var v = c.variable();
      const Formula& body = c.child(0);
      std::optional<Formula> definition;
      if (body.kind() == Connective::Forall && body.variable() != v && !has_quantifier(body.child(0))) {
        definition = Formula::forall(Var::Y, with_outer(body.child(0), v));
      } else if (!has_quantifier(body)) {
        definition = with_outer(body, v);
      }
      if (definition) {
        std::string u = names.fresh("U", 1);
        fo2.push_back(Formula::forall(Var::X, Formula::iff(var_atom(u, {Var::X}), *definition)));
        cc.push_back(Formula::cardinality(u, Comparison::Eq, c.count()));
        continue;
      }
    }
    Formula rest = eliminate_zero_counting(c);
    if (has_counting(rest))
      throw UnsupportedFragment("beyond implemented fragment (general C² sampling out of scope): " + to_string(c));
    fo2.push_back(rest);
  }

  Reduction out;
  out.transformed = problem;
  out.transformed.sentence = Formula::conjunction(std::move(fo2));
  out.transformed.cardinality = Formula::conjunction(std::move(cc));
  out.transformed.vocabulary = vocab;
  out.kept = names_of(problem.vocabulary);
  out.multiplicity = multiplicity;
  return out;
}

Reduction mln_to_wfoms(const MlnSpec& spec, double rel_error) {
  Vocabulary mln_vocab;
  for (const auto& f : spec.formulas) mln_vocab.merge(vocabulary_of(f.formula));
  Vocabulary vocab = mln_vocab;
  NameSupply names(vocab);
  std::vector<Formula> parts;
  Weighting weights;
  auto close = [](Formula f, unsigned fv) {
    if (fv & 2u) f = Formula::forall(Var::Y, f);
    if (fv & 1u) f = Formula::forall(Var::X, f);
    return f;
  };
  for (const auto& mf : spec.formulas) {
    const unsigned fv = free_variables(mf.formula);
    if (!mf.weight) {
      parts.push_back(close(mf.formula, fv));
      continue;
    }
    std::vector<Var> args;
    if (fv & 1u) args.push_back(Var::X);
    if (fv & 2u) args.push_back(Var::Y);
    std::string xi = names.fresh("xi", static_cast<int>(args.size()));
    std::vector<Term> terms;
    for (Var v : args) terms.push_back(Term::variable(v));
    parts.push_back(close(Formula::iff(Formula::atom(xi, terms), mf.formula), fv));
    weights[xi] = WeightPair{exp_rational(*mf.weight, rel_error), BigRational(1)};
  }
  Reduction out;
  out.transformed = make_problem(Formula::conjunction(std::move(parts)), spec.domain_size, weights);
  out.kept = names_of(mln_vocab);
  out.transformed.visible = out.kept;
  return out;
}

WeightPair LiftedProblem::weight(const std::string& p) const {
  auto it = weights.find(p);
  return it == weights.end() ? WeightPair{} : it->second;
}

LiftedProblem compile(const Problem& problem) {
  for (const auto& c : conjuncts(problem.sentence))
    if (has_cardinality(c))
      throw UnsupportedFragment("cardinality atoms are only supported as top-level constraints");
  Reduction cc = sc2_to_cc(problem);
  SnfReduction snf = to_snf(cc.transformed);
  LiftedProblem lp;
  lp.domain_size = problem.domain_size;
  lp.vocabulary = snf.transformed.vocabulary;
  lp.weights = problem.weights;
  lp.matrix = simplify(snf.snf.universal);
  for (const auto& e : snf.snf.existentials) {
    Formula s = simplify(e);
    if (!s.is_top()) lp.existentials.push_back(s);
  }
  lp.cardinality = simplify(cc.transformed.cardinality);
  lp.original = names_of(problem.vocabulary);
  lp.visible = problem.output_predicates();
  lp.multiplicity = cc.multiplicity;
  if (lp.existentials.size() > 16) throw UnsupportedFragment("too many existential conjuncts");
  return lp;
}

}  // namespace liftgen
