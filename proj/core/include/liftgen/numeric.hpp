#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <vector>

namespace liftgen {

using BigInt = mpz_class;
using BigRational = mpq_class;

// Accepts "7", "-3", "2/5", "0.25", "-1.5e-2". Decimals are converted exactly.
BigRational parse_rational(std::string_view text);
std::string to_string(const BigInt& v);
std::string to_string(const BigRational& v);

const BigInt& factorial(unsigned n);
BigInt binomial(unsigned n, unsigned k);
BigInt multinomial(const std::vector<int>& parts);

// Rational approximation of exp(w) with relative error at most rel_error.
BigRational exp_rational(const BigRational& w, double rel_error);

}  // namespace liftgen
