#pragma once

#include <gmpxx.h>

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cubealg::exactnum {

// Arbitrary-precision rational, always canonical (reduced, positive
// denominator) after construction through the helpers below.
using Rational = mpq_class;

// Accepts "p", "p/q", and decimals such as "-49.99". Throws ValidationError.
Rational parse_rational(std::string_view text);
// "p" when the denominator is 1, "p/q" otherwise.
std::string render_rational(const Rational& value);

// An element of Q adjoined with square roots of primes, kept as a sorted map
// from squarefree radical key to nonzero rational coefficient. Key 1 carries
// the rational part; the empty map is zero. Two values are equal iff their
// term lists are identical.
class ExactValue {
 public:
  struct Term {
    mpz_class key;
    Rational coeff;

    bool operator==(const Term& other) const {
      return key == other.key && coeff == other.coeff;
    }
  };

  ExactValue() = default;
  ExactValue(const Rational& value);  // NOLINT: implicit by design of Q ⊂ Q(√P)
  ExactValue(long value) : ExactValue(Rational(value)) {}  // NOLINT

  // coeff * sqrt(key). `key` must be squarefree and positive.
  static ExactValue radical(const mpz_class& key, const Rational& coeff = 1);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_rational() const;
  std::optional<Rational> as_rational() const;
  // The coefficient of key 1.
  Rational rational_part() const;
  // Exactly 0 or exactly 1.
  bool is_boolean() const;

  friend bool operator==(const ExactValue& a, const ExactValue& b) {
    return a.terms_ == b.terms_;
  }
  // Arbitrary but total order on normal forms, for use as a map key.
  friend bool operator<(const ExactValue& a, const ExactValue& b);

  // Map-backed accumulator for long sums.
  class Accumulator {
   public:
    void add(const ExactValue& v);
    void add_term(const mpz_class& key, const Rational& coeff);
    ExactValue value() const;

   private:
    std::map<mpz_class, Rational> terms_;
  };

 private:
  friend ExactValue ev_add(const ExactValue&, const ExactValue&);
  friend ExactValue ev_mul(const ExactValue&, const ExactValue&);
  friend ExactValue ev_div(const ExactValue&, const ExactValue&);
  friend ExactValue ev_neg(const ExactValue&);

  std::vector<Term> terms_;
};

ExactValue ev_add(const ExactValue& a, const ExactValue& b);
ExactValue ev_neg(const ExactValue& a);
// sqrt(S) * sqrt(T) = g * sqrt(S*T/g^2) with g = gcd(S, T).
ExactValue ev_mul(const ExactValue& a, const ExactValue& b);
// Divisor must be rational; throws EvaluationError("irrational divisor")
// otherwise. a / 0 := a.
ExactValue ev_div(const ExactValue& a, const ExactValue& b);

inline ExactValue operator+(const ExactValue& a, const ExactValue& b) {
  return ev_add(a, b);
}
inline ExactValue operator-(const ExactValue& a) { return ev_neg(a); }
inline ExactValue operator-(const ExactValue& a, const ExactValue& b) {
  return ev_add(a, ev_neg(b));
}
inline ExactValue operator*(const ExactValue& a, const ExactValue& b) {
  return ev_mul(a, b);
}
inline ExactValue operator/(const ExactValue& a, const ExactValue& b) {
  return ev_div(a, b);
}

// Canonical text: "c0 + c1*sqrt(k1) - c2*sqrt(k2)", keys ascending, "0" for
// zero. parse_exact accepts exactly what to_string emits (and a few looser
// spellings such as "2 * sqrt(3)"), and rejects non-squarefree keys.
std::string to_string(const ExactValue& value);
ExactValue parse_exact(std::string_view text);

// Decimal approximation for display. Never used in computation.
std::string approximate(const ExactValue& value, int digits);

// Trial division below 2^20 plus a perfect-square test on the cofactor;
// exact whenever at most two prime factors (with multiplicity) exceed 2^20.
bool is_squarefree(const mpz_class& key);

}  // namespace cubealg::exactnum
