#include "cubealg/exactnum/labels.hpp"

#include <algorithm>
#include <iterator>
#include <mutex>

#include "cubealg/error.hpp"

namespace cubealg::exactnum {

std::uint64_t nth_prime(std::size_t index) {
  static std::mutex mu;
  static std::vector<std::uint64_t> primes{2, 3};
  std::lock_guard lock(mu);
  while (primes.size() <= index) {
    std::uint64_t candidate = primes.back() + 2;
    while (true) {
      bool prime = true;
      for (std::uint64_t p : primes) {
        if (p * p > candidate) break;
        if (candidate % p == 0) {
          prime = false;
          break;
        }
      }
      if (prime) break;
      candidate += 2;
    }
    primes.push_back(candidate);
  }
  return primes[index];
}

ExactValue label_value(std::uint64_t radicand) {
  if (radicand == 1) return ExactValue(1);
  return ExactValue::radical(mpz_class(static_cast<unsigned long>(radicand)));
}

std::vector<std::uint64_t> LabelAllocator::allocate(std::size_t n) {
  std::vector<std::uint64_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!first_label_issued_) {
      first_label_issued_ = true;
      out.push_back(1);
    } else {
      out.push_back(nth_prime(next_prime_index_++));
    }
  }
  return out;
}

LabelingMeta LabelingMeta::single(std::string dim, std::string level,
                                  std::vector<std::uint64_t> labels) {
  LabelingMeta meta;
  for (auto l : labels) {
    if (l != 1) meta.primes.push_back(l);
  }
  std::sort(meta.primes.begin(), meta.primes.end());
  meta.components.push_back({std::move(dim), std::move(level),
                             std::move(labels)});
  return meta;
}

LabelingMeta LabelingMeta::product(const LabelingMeta& a,
                                   const LabelingMeta& b) {
  LabelingMeta meta;
  std::set_union(a.primes.begin(), a.primes.end(), b.primes.begin(),
                 b.primes.end(), std::back_inserter(meta.primes));
  if (meta.primes.size() != a.primes.size() + b.primes.size()) {
    throw EvaluationError("product of labelings that share primes");
  }
  auto has_unit = [](const LabelingMeta& m) {
    for (const auto& c : m.components) {
      if (std::find(c.labels.begin(), c.labels.end(), 1) != c.labels.end()) {
        return true;
      }
    }
    return false;
  };
  if (has_unit(a) && has_unit(b)) {
    throw EvaluationError("product of labelings that both use label 1");
  }
  meta.components = a.components;
  meta.components.insert(meta.components.end(), b.components.begin(),
                         b.components.end());
  return meta;
}

mpz_class LabelingMeta::prime_product() const {
  mpz_class out = 1;
  for (auto p : primes) out *= static_cast<unsigned long>(p);
  return out;
}

namespace {

mpz_class label_radicand(const ExactValue& label,
                         const mpz_class& prime_product) {
  const auto& t = label.terms();
  if (t.size() != 1 || t[0].coeff != 1) {
    throw EvaluationError("malformed label " + to_string(label));
  }
  if (!mpz_divisible_p(prime_product.get_mpz_t(), t[0].key.get_mpz_t())) {
    throw EvaluationError("label " + to_string(label) +
                          " uses primes outside the labeling");
  }
  return t[0].key;
}

mpz_class product_of(const std::vector<std::uint64_t>& primes) {
  mpz_class out = 1;
  for (auto p : primes) out *= static_cast<unsigned long>(p);
  return out;
}

}  // namespace

ExactValue project_value(const ExactValue& v, const ExactValue& label,
                         const std::vector<std::uint64_t>& primes) {
  mpz_class w = label_radicand(label, product_of(primes));
  ExactValue::Accumulator acc;
  for (const auto& t : v.terms()) {
    if (!mpz_divisible_p(t.key.get_mpz_t(), w.get_mpz_t())) continue;
    mpz_class rest = t.key / w;
    bool clean = std::none_of(primes.begin(), primes.end(), [&](auto p) {
      return mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0;
    });
    if (clean) acc.add_term(rest, t.coeff);
  }
  return acc.value();
}

ProjectionIndex::ProjectionIndex(const ExactValue& v,
                                 const std::vector<std::uint64_t>& primes)
    : prime_product_(product_of(primes)) {
  std::map<mpz_class, ExactValue::Accumulator> acc;
  mpz_class part;
  for (const auto& t : v.terms()) {
    mpz_gcd(part.get_mpz_t(), t.key.get_mpz_t(), prime_product_.get_mpz_t());
    acc[part].add_term(t.key / part, t.coeff);
  }
  for (auto& [key, a] : acc) buckets_.emplace(key, a.value());
}

ExactValue ProjectionIndex::project(const ExactValue& label) const {
  if (label.is_zero()) return {};
  auto it = buckets_.find(label_radicand(label, prime_product_));
  if (it == buckets_.end()) return {};
  return it->second;
}

}  // namespace cubealg::exactnum
