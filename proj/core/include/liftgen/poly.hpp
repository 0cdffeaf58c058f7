#pragma once

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "liftgen/numeric.hpp"

namespace liftgen {

// Packs one exponent per indeterminate into a 64-bit key. Exponents saturate
// at a per-variable cap; callers choose caps so that saturated values are
// indistinguishable for every constraint they evaluate.
class ExponentSpace {
 public:
  using Key = std::uint64_t;

  ExponentSpace() = default;
  explicit ExponentSpace(std::vector<unsigned> caps);

  int size() const { return static_cast<int>(caps_.size()); }
  unsigned cap(int var) const { return caps_[var]; }
  unsigned get(Key k, int var) const { return static_cast<unsigned>((k >> shift_[var]) & mask_[var]); }
  Key add(Key a, Key b) const;
  Key times(Key a, unsigned long factor) const;
  Key make(const std::vector<unsigned long>& exponents) const;
  std::vector<long> unpack(Key k) const;

 private:
  std::vector<unsigned> caps_;
  std::vector<unsigned> shift_;
  std::vector<Key> mask_;
};

// Sparse polynomial with integer coefficients over an ExponentSpace.
class Polynomial {
 public:
  using Key = ExponentSpace::Key;
  using Term = std::pair<Key, BigInt>;

  Polynomial() = default;
  explicit Polynomial(const ExponentSpace* space) : space_(space) {}
  Polynomial(const ExponentSpace* space, BigInt coefficient, Key key);

  static Polynomial constant(const ExponentSpace* space, long c) { return Polynomial(space, BigInt(c), 0); }

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  const ExponentSpace* space() const { return space_; }

  Polynomial& operator+=(const Polynomial& o);
  Polynomial operator*(const Polynomial& o) const;
  Polynomial& operator*=(const BigInt& c);
  Polynomial pow(unsigned long e) const;

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

 private:
  void normalize();
  const ExponentSpace* space_ = nullptr;
  std::vector<Term> terms_;  // sorted by key, no zero coefficients
};

}  // namespace liftgen
