#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace lll {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "a/b", "a" or "-a/b". The result is canonicalized; a zero
/// denominator is rejected.
Rational parse_rational(std::string_view text);

/// Canonical text form: "a/b" in lowest terms, or "a" when the denominator is 1.
std::string to_string(const Rational& value);

Rational pow(const Rational& base, std::uint64_t exponent);
BigInt pow(const BigInt& base, std::uint64_t exponent);

double to_double(const Rational& value);

}  // namespace lll
