#pragma once

#include <functional>

#include "lll/rational.hpp"

namespace lll {

/// Closed rational interval [lo, hi]. Arithmetic below assumes both
/// endpoints are nonnegative wherever multiplication or powers are used.
struct Interval {
  Rational lo;
  Rational hi;

  static Interval exact(const Rational& value) { return {value, value}; }
  bool contains(const Rational& value) const { return lo <= value && value <= hi; }
  Rational width() const { return hi - lo; }
};

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator*(const Interval& a, const Interval& b);
/// Reciprocal of a strictly positive interval.
Interval reciprocal(const Interval& a);
Interval pow(const Interval& base, std::uint64_t exponent);

/// Enclosure of Euler's number from the Taylor series truncated after
/// `terms` terms: lo = sum_{k<terms} 1/k!, hi = lo + 1/((terms-1)! (terms-1)).
Interval e_interval(unsigned terms);

/// Decides `expr(e) < bound` where expr maps an enclosure of e to an
/// enclosure of the quantity. Precision doubles until the enclosure clears
/// the bound. Throws internal_invariant if no decision is reached.
bool certified_less(const std::function<Interval(const Interval&)>& expr, const Rational& bound);

/// Same as certified_less but for `expr(e) <= bound`.
bool certified_less_equal(const std::function<Interval(const Interval&)>& expr,
                          const Rational& bound);

}  // namespace lll
