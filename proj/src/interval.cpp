#include "lll/interval.hpp"

#include <algorithm>
#include <optional>

#include "lll/error.hpp"

namespace lll {

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }

Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  Rational c[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c))};
}

Interval reciprocal(const Interval& a) {
  if (a.lo <= 0) throw Error(ErrorKind::invalid_parameter, "reciprocal of a non-positive interval");
  return {1 / a.hi, 1 / a.lo};
}

Interval pow(const Interval& base, std::uint64_t exponent) {
  if (base.lo < 0) throw Error(ErrorKind::invalid_parameter, "power of a negative interval");
  return {pow(base.lo, exponent), pow(base.hi, exponent)};
}

Interval e_interval(unsigned terms) {
  terms = std::max(terms, 2U);
  Rational sum = 0;
  Rational term = 1;  // 1/k!
  for (unsigned k = 0; k < terms; ++k) {
    if (k > 0) term /= k;
    sum += term;
  }
  // The tail sum_{k >= terms} 1/k! is below 1/((terms-1)! (terms-1)).
  Rational tail = term / (terms - 1);
  return {sum, sum + tail};
}

namespace {

template <class Decide>
bool refine(const std::function<Interval(const Interval&)>& expr, Decide decide) {
  for (unsigned terms = 8; terms <= 4096; terms *= 2) {
    auto verdict = decide(expr(e_interval(terms)));
    if (verdict.has_value()) return *verdict;
  }
  throw Error(ErrorKind::internal_invariant, "certified comparison undecided at maximum precision");
}

}  // namespace

bool certified_less(const std::function<Interval(const Interval&)>& expr, const Rational& bound) {
  return refine(expr, [&](const Interval& value) -> std::optional<bool> {
    if (value.hi < bound) return true;
    if (value.lo >= bound) return false;
    return std::nullopt;
  });
}

bool certified_less_equal(const std::function<Interval(const Interval&)>& expr,
                          const Rational& bound) {
  return refine(expr, [&](const Interval& value) -> std::optional<bool> {
    if (value.hi <= bound) return true;
    if (value.lo > bound) return false;
    return std::nullopt;
  });
}

}  // namespace lll
