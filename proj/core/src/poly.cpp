#include "liftgen/poly.hpp"

#include <algorithm>
#include <bit>

#include "liftgen/logic.hpp"

namespace liftgen {

ExponentSpace::ExponentSpace(std::vector<unsigned> caps) : caps_(std::move(caps)) {
  unsigned shift = 0;
  for (unsigned c : caps_) {
    const unsigned width = std::bit_width(c);
    shift_.push_back(shift);
    mask_.push_back(width == 0 ? 0 : ((Key{1} << width) - 1));
    shift += width;
  }
  if (shift > 64) throw UnsupportedFragment("too many tracked cardinalities for exact bookkeeping");
}

ExponentSpace::Key ExponentSpace::add(Key a, Key b) const {
  if ((a | b) == 0) return a;
  Key out = 0;
  for (std::size_t v = 0; v < caps_.size(); ++v) {
    Key s = ((a >> shift_[v]) & mask_[v]) + ((b >> shift_[v]) & mask_[v]);
    if (s > caps_[v]) s = caps_[v];
    out |= s << shift_[v];
  }
  return out;
}

ExponentSpace::Key ExponentSpace::times(Key a, unsigned long factor) const {
  if (a == 0) return 0;
  Key out = 0;
  for (std::size_t v = 0; v < caps_.size(); ++v) {
    unsigned long e = (a >> shift_[v]) & mask_[v];
    unsigned long s = factor == 0 ? 0 : (e > caps_[v] / factor ? caps_[v] : e * factor);
    if (s > caps_[v]) s = caps_[v];
    out |= Key{s} << shift_[v];
  }
  return out;
}

ExponentSpace::Key ExponentSpace::make(const std::vector<unsigned long>& exponents) const {
  Key out = 0;
  for (std::size_t v = 0; v < caps_.size(); ++v) {
    unsigned long e = std::min<unsigned long>(exponents[v], caps_[v]);
    out |= Key{e} << shift_[v];
  }
  return out;
}

std::vector<long> ExponentSpace::unpack(Key k) const {
  std::vector<long> out(caps_.size());
  for (std::size_t v = 0; v < caps_.size(); ++v) out[v] = static_cast<long>(get(k, static_cast<int>(v)));
  return out;
}

Polynomial::Polynomial(const ExponentSpace* space, BigInt coefficient, Key key) : space_(space) {
  if (coefficient != 0) terms_.emplace_back(key, std::move(coefficient));
}

void Polynomial::normalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < terms_.size();) {
    std::size_t j = i + 1;
    BigInt sum = std::move(terms_[i].second);
    while (j < terms_.size() && terms_[j].first == terms_[i].first) sum += terms_[j++].second;
    if (sum != 0) {
      terms_[out].first = terms_[i].first;
      terms_[out].second = std::move(sum);
      ++out;
    }
    i = j;
  }
  terms_.resize(out);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  if (!space_) space_ = o.space_;
  if (o.terms_.empty()) return *this;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  std::size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    if (j == o.terms_.size() || (i < terms_.size() && terms_[i].first < o.terms_[j].first)) {
      merged.push_back(std::move(terms_[i++]));
    } else if (i == terms_.size() || o.terms_[j].first < terms_[i].first) {
      merged.push_back(o.terms_[j++]);
    } else {
      BigInt s = terms_[i].second + o.terms_[j].second;
      if (s != 0) merged.emplace_back(terms_[i].first, std::move(s));
      ++i;
      ++j;
    }
  }
  terms_ = std::move(merged);
  return *this;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial out(space_ ? space_ : o.space_);
  if (terms_.empty() || o.terms_.empty()) return out;
  const ExponentSpace* sp = out.space_;
  out.terms_.reserve(terms_.size() * o.terms_.size());
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) out.terms_.emplace_back(sp->add(ka, kb), ca * cb);
  if (terms_.size() > 1 && o.terms_.size() > 1) {
    out.normalize();
  } else {
    // One side is a monomial: keys stay distinct unless saturation merged them.
    bool sorted = std::is_sorted(out.terms_.begin(), out.terms_.end(),
                                 [](const Term& a, const Term& b) { return a.first <= b.first; });
    if (!sorted) out.normalize();
  }
  return out;
}

Polynomial& Polynomial::operator*=(const BigInt& c) {
  if (c == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& t : terms_) t.second *= c;
  return *this;
}

Polynomial Polynomial::pow(unsigned long e) const {
  Polynomial result = constant(space_, 1);
  if (e == 0) return result;
  if (terms_.size() == 1) {
    BigInt c;
    mpz_pow_ui(c.get_mpz_t(), terms_[0].second.get_mpz_t(), e);
    return Polynomial(space_, std::move(c), space_->times(terms_[0].first, e));
  }
  Polynomial base = *this;
  while (true) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (!e) break;
    base = base * base;
  }
  return result;
}

}  // namespace liftgen
