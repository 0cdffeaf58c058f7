#include "liftgen/numeric.hpp"

#include <mpfr.h>

#include <cctype>
#include <cmath>
#include <deque>
#include <mutex>

#include "liftgen/logic.hpp"

namespace liftgen {

BigRational parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw Error("empty number");
  auto slash = s.find('/');
  if (slash != std::string::npos) {
    BigInt num, den;
    if (num.set_str(s.substr(0, slash), 10) != 0 || den.set_str(s.substr(slash + 1), 10) != 0)
      throw Error("malformed rational '" + s + "'");
    if (den == 0) throw Error("zero denominator in '" + s + "'");
    BigRational r(num, den);
    r.canonicalize();
    return r;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_point = false, seen_digit = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits += c;
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw Error("malformed number '" + s + "'");
  long exponent = 0;
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw Error("malformed number '" + s + "'");
    try {
      std::size_t used = 0;
      exponent = std::stol(s.substr(i + 1), &used);
      if (used != s.size() - i - 1) throw Error("");
    } catch (...) {
      throw Error("malformed exponent in '" + s + "'");
    }
  }
  BigInt num(digits, 10);
  if (negative) num = -num;
  long shift = exponent - scale;
  BigInt ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  BigRational r = shift >= 0 ? BigRational(num * ten_pow) : BigRational(num, ten_pow);
  r.canonicalize();
  return r;
}

std::string to_string(const BigInt& v) { return v.get_str(); }
std::string to_string(const BigRational& v) { return v.get_str(); }

const BigInt& factorial(unsigned n) {
  static std::mutex mu;
  static std::deque<BigInt> table{BigInt(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= n) table.push_back(table.back() * static_cast<unsigned long>(table.size()));
  return table[n];
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  BigInt r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

BigInt multinomial(const std::vector<int>& parts) {
  BigInt r = 1;
  unsigned total = 0;
  for (int p : parts) {
    if (p < 0) throw Error("negative multinomial part");
    total += static_cast<unsigned>(p);
    r *= binomial(total, static_cast<unsigned>(p));
  }
  return r;
}

BigRational exp_rational(const BigRational& w, double rel_error) {
  if (!(rel_error > 0 && rel_error < 1)) throw Error("exp precision must lie in (0,1)");
  const long bits = static_cast<long>(std::ceil(-std::log2(rel_error))) + 64;
  mpfr_t x, y;
  mpfr_init2(x, bits);
  mpfr_init2(y, bits);
  mpfr_set_q(x, w.get_mpq_t(), MPFR_RNDN);
  mpfr_exp(y, x, MPFR_RNDN);
  BigRational target;
  mpfr_get_q(target.get_mpq_t(), y);
  mpfr_clear(x);
  mpfr_clear(y);

  // Walk the continued-fraction convergents of the high-precision value and
  // stop at the first one within half the error budget.
  BigRational tolerance = target * BigRational(rel_error / 2);
  BigRational rest = target;
  BigInt h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  for (int step = 0; step < 4096; ++step) {
    BigInt a;
    mpz_fdiv_q(a.get_mpz_t(), rest.get_num_mpz_t(), rest.get_den_mpz_t());
    BigInt h = a * h_prev + h_prev2;
    BigInt k = a * k_prev + k_prev2;
    BigRational approx(h, k);
    approx.canonicalize();
    BigRational diff = approx - target;
    if (abs(diff) <= tolerance) return approx;
    BigRational frac = rest - a;
    if (frac == 0) return approx;
    rest = 1 / frac;
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = k;
  }
  return target;
}

}  // namespace liftgen
