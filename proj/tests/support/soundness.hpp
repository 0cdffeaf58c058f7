#pragma once

// Exact check that a reduction preserves sampling probabilities: the mass of
// the transformed problem pushed through the back-map must equal the mass of
// the source problem, model by model.

#include <map>

#include "liftgen/normalize.hpp"
#include "liftgen/wfomc.hpp"
#include "oracles.hpp"

namespace soundness {

using liftgen::BigRational;
using liftgen::Model;
using Dist = std::map<Model, BigRational>;

inline Dist normalized(Dist d) {
  BigRational total = 0;
  for (const auto& [m, w] : d) total += w;
  for (auto& [m, w] : d) w /= total;
  return d;
}

// Oracle enumeration when the transformed vocabulary is small enough for it,
// the pruned brute force otherwise.
inline Dist pushed_forward(const liftgen::Reduction& r, const liftgen::Vocabulary& source) {
  Dist out;
  auto visit = [&](Model m, const BigRational& w) {
    if (w == 0) return;
    m = r.back_map(m);
    m.vocabulary = source;
    out[m] += w;
  };
  if (oracle::make_world(r.transformed.vocabulary, r.transformed.domain_size).index.size() <= 22) {
    oracle::enumerate(r.transformed, [&](const oracle::World& w, const BigRational& x) {
      visit(oracle::to_model(w, r.transformed.vocabulary), x);
    });
  } else {
    liftgen::BruteOptions opts;
    opts.max_atoms = 64;
    liftgen::brute_enumerate(r.transformed, visit, opts);
  }
  return normalized(std::move(out));
}

inline bool same(const Dist& a, const Dist& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [m, p] : a) {
    auto it = b.find(m);
    if (it == b.end() || it->second != p) return false;
  }
  return true;
}

inline bool sound(const liftgen::Problem& source, const liftgen::Reduction& r) {
  return same(pushed_forward(r, source.vocabulary), oracle::distribution(source));
}

// MLN semantics on the MLN's own vocabulary: hard formulas must hold for every
// grounding, each satisfied grounding of a soft formula contributes exp(w),
// rationalized exactly as the reduction does.
inline Dist mln_distribution(const liftgen::MlnSpec& spec, double rel_error = 1e-12) {
  liftgen::Vocabulary v;
  for (const auto& f : spec.formulas) v.merge(liftgen::vocabulary_of(f.formula));
  std::vector<BigRational> factors;
  for (const auto& f : spec.formulas) factors.push_back(f.weight ? liftgen::exp_rational(*f.weight, rel_error) : 1);
  oracle::World w = oracle::make_world(v, spec.domain_size);
  Dist out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << w.index.size()); ++bits) {
    w.bits = bits;
    BigRational x = 1;
    for (std::size_t i = 0; i < spec.formulas.size() && x != 0; ++i) {
      const auto& f = spec.formulas[i];
      const unsigned fv = liftgen::free_variables(f.formula);
      long sat = 0, groundings = 0;
      for (int a = 1; a <= ((fv & 1u) ? w.n : 1); ++a)
        for (int b = 1; b <= ((fv & 2u) ? w.n : 1); ++b) {
          ++groundings;
          sat += oracle::satisfies(w, f.formula, {a, b});
        }
      if (!f.weight) {
        if (sat != groundings) x = 0;
        continue;
      }
      for (long k = 0; k < sat; ++k) x *= factors[i];
    }
    if (x != 0) out[oracle::to_model(w, v)] += x;
  }
  return normalized(std::move(out));
}

inline bool mln_sound(const liftgen::MlnSpec& spec, const liftgen::Reduction& r) {
  liftgen::Vocabulary v = r.transformed.vocabulary.restricted_to(r.kept);
  return same(pushed_forward(r, v), mln_distribution(spec));
}

}  // namespace soundness
