#include "cubealg/exactnum/exact_value.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "cubealg/error.hpp"

namespace cubealg::exactnum {

namespace {

[[noreturn]] void malformed(std::string_view what, std::string_view text) {
  throw ValidationError("malformed " + std::string(what) + ": '" +
                        std::string(text) + "'");
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  Rational result;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) malformed("rational", text);
    mpz_class d(std::string(den), 10);
    if (d == 0) malformed("rational (zero denominator)", text);
    result = Rational(mpz_class(std::string(num), 10), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot), frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) ||
        (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      malformed("rational", text);
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class digits(std::string(whole.empty() ? "0" : whole) +
                         std::string(frac),
                     10);
    result = Rational(digits, scale);
  } else {
    if (!all_digits(s)) malformed("rational", text);
    result = Rational(mpz_class(std::string(s), 10));
  }
  result.canonicalize();
  return negative ? Rational(-result) : result;
}

std::string render_rational(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

ExactValue::ExactValue(const Rational& value) {
  if (value != 0) {
    Rational c = value;
    c.canonicalize();
    terms_.push_back({mpz_class(1), c});
  }
}

ExactValue ExactValue::radical(const mpz_class& key, const Rational& coeff) {
  ExactValue out;
  if (key <= 0 || !is_squarefree(key)) {
    throw ValidationError("radical key " + key.get_str() + " is not squarefree");
  }
  if (coeff != 0) {
    Rational c = coeff;
    c.canonicalize();
    out.terms_.push_back({key, c});
  }
  return out;
}

bool ExactValue::is_rational() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].key == 1);
}

std::optional<Rational> ExactValue::as_rational() const {
  if (!is_rational()) return std::nullopt;
  return rational_part();
}

Rational ExactValue::rational_part() const {
  if (!terms_.empty() && terms_[0].key == 1) return terms_[0].coeff;
  return 0;
}

bool ExactValue::is_boolean() const {
  return terms_.empty() ||
         (terms_.size() == 1 && terms_[0].key == 1 && terms_[0].coeff == 1);
}

bool operator<(const ExactValue& a, const ExactValue& b) {
  std::size_t n = std::min(a.terms_.size(), b.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    int c = cmp(a.terms_[i].key, b.terms_[i].key);
    if (c != 0) return c < 0;
    c = cmp(a.terms_[i].coeff, b.terms_[i].coeff);
    if (c != 0) return c < 0;
  }
  return a.terms_.size() < b.terms_.size();
}

void ExactValue::Accumulator::add(const ExactValue& v) {
  for (const auto& t : v.terms()) add_term(t.key, t.coeff);
}

void ExactValue::Accumulator::add_term(const mpz_class& key,
                                       const Rational& coeff) {
  if (coeff == 0) return;
  auto [it, fresh] = terms_.try_emplace(key, coeff);
  if (fresh) {
    it->second.canonicalize();
  } else {
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
  }
}

ExactValue ExactValue::Accumulator::value() const {
  ExactValue out;
  out.terms_.reserve(terms_.size());
  for (const auto& [key, coeff] : terms_) out.terms_.push_back({key, coeff});
  return out;
}

ExactValue ev_add(const ExactValue& a, const ExactValue& b) {
  ExactValue out;
  const auto& x = a.terms_;
  const auto& y = b.terms_;
  out.terms_.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    int c = i == x.size() ? 1 : j == y.size() ? -1 : cmp(x[i].key, y[j].key);
    if (c < 0) {
      out.terms_.push_back(x[i++]);
    } else if (c > 0) {
      out.terms_.push_back(y[j++]);
    } else {
      Rational sum = x[i].coeff + y[j].coeff;
      if (sum != 0) out.terms_.push_back({x[i].key, sum});
      ++i;
      ++j;
    }
  }
  return out;
}

ExactValue ev_neg(const ExactValue& a) {
  ExactValue out = a;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

ExactValue ev_mul(const ExactValue& a, const ExactValue& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_rational() || b.is_rational()) {
    const ExactValue& scalar = a.is_rational() ? a : b;
    const ExactValue& other = a.is_rational() ? b : a;
    Rational r = scalar.terms_[0].coeff;
    ExactValue out = other;
    for (auto& t : out.terms_) t.coeff *= r;
    return out;
  }
  ExactValue::Accumulator acc;
  mpz_class g, key;
  for (const auto& s : a.terms_) {
    for (const auto& t : b.terms_) {
      mpz_gcd(g.get_mpz_t(), s.key.get_mpz_t(), t.key.get_mpz_t());
      key = (s.key / g) * (t.key / g);
      acc.add_term(key, s.coeff * t.coeff * Rational(g));
    }
  }
  return acc.value();
}

ExactValue ev_div(const ExactValue& a, const ExactValue& b) {
  auto divisor = b.as_rational();
  if (!divisor) throw EvaluationError("irrational divisor");
  if (*divisor == 0) return a;
  ExactValue out = a;
  for (auto& t : out.terms_) t.coeff /= *divisor;
  return out;
}

std::string to_string(const ExactValue& value) {
  if (value.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : value.terms()) {
    Rational c = t.coeff;
    if (first) {
      if (c < 0 && t.key != 1) {
        out += "-";
        c = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      if (c < 0) c = -c;
    }
    if (t.key == 1) {
      out += render_rational(c);
    } else {
      if (c != 1) out += render_rational(c) + "*";
      out += "sqrt(" + t.key.get_str() + ")";
    }
    first = false;
  }
  return out;
}

namespace {

class ExactParser {
 public:
  explicit ExactParser(std::string_view text) : text_(text) {}

  ExactValue parse() {
    ExactValue::Accumulator acc;
    skip_space();
    bool negative = consume('-');
    parse_term(negative, acc);
    while (true) {
      skip_space();
      if (at_end()) break;
      if (consume('+')) {
        parse_term(false, acc);
      } else if (consume('-')) {
        parse_term(true, acc);
      } else {
        fail();
      }
    }
    return acc.value();
  }

 private:
  void parse_term(bool negative, ExactValue::Accumulator& acc) {
    skip_space();
    Rational coeff = 1;
    mpz_class key = 1;
    if (peek_word("sqrt")) {
      key = parse_sqrt();
    } else {
      coeff = parse_rational(read_number());
      skip_space();
      if (consume('*')) {
        skip_space();
        if (!peek_word("sqrt")) fail();
        key = parse_sqrt();
      }
    }
    if (negative) coeff = -coeff;
    acc.add_term(key, coeff);
  }

  mpz_class parse_sqrt() {
    pos_ += 4;
    skip_space();
    if (!consume('(')) fail();
    skip_space();
    std::string digits;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(cur()))) {
      digits += text_[pos_++];
    }
    skip_space();
    if (digits.empty() || !consume(')')) fail();
    mpz_class key(digits, 10);
    if (key <= 0 || !is_squarefree(key)) {
      throw ValidationError("radical key " + digits + " is not squarefree");
    }
    return key;
  }

  std::string read_number() {
    std::string out;
    while (!at_end() && (std::isdigit(static_cast<unsigned char>(cur())) ||
                         cur() == '/' || cur() == '.')) {
      out += text_[pos_++];
    }
    if (out.empty()) fail();
    return out;
  }

  bool peek_word(std::string_view w) const {
    return text_.substr(pos_, w.size()) == w;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char cur() const { return text_[pos_]; }
  bool consume(char c) {
    if (!at_end() && cur() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(cur()))) {
      ++pos_;
    }
  }
  [[noreturn]] void fail() const { malformed("exact value", text_); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

ExactValue parse_exact(std::string_view text) {
  return ExactParser(text).parse();
}

std::string approximate(const ExactValue& value, int digits) {
  mp_bitcnt_t bits = static_cast<mp_bitcnt_t>(digits * 4 + 64);
  mpf_class sum(0, bits), term(0, bits), root(0, bits);
  for (const auto& t : value.terms()) {
    mpf_class k(t.key, bits);
    mpf_sqrt(root.get_mpf_t(), k.get_mpf_t());
    term = mpf_class(t.coeff, bits) * root;
    sum += term;
  }
  std::ostringstream out;
  out.precision(digits);
  out << sum;
  return out.str();
}

bool is_squarefree(const mpz_class& key) {
  if (key <= 0) return false;
  mpz_class r = key;
  constexpr unsigned long kBound = 1ul << 20;
  for (unsigned long p = 2; p < kBound; p += (p == 2 ? 1 : 2)) {
    if (mpz_class(p) * p > r) break;
    if (mpz_divisible_ui_p(r.get_mpz_t(), p)) {
      r /= p;
      if (mpz_divisible_ui_p(r.get_mpz_t(), p)) return false;
    }
  }
  return r == 1 || mpz_perfect_square_p(r.get_mpz_t()) == 0;
}

}  // namespace cubealg::exactnum
