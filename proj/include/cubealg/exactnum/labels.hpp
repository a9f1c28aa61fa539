#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cubealg/exactnum/exact_value.hpp"

namespace cubealg::exactnum {

// 0-based: nth_prime(0) == 2.
std::uint64_t nth_prime(std::size_t index);

// A prime label is 1 or sqrt(p); it is identified by its radicand (1 or p).
ExactValue label_value(std::uint64_t radicand);

// Hands out prime labels in the fixed sequence 1, sqrt(2), sqrt(3), sqrt(5),
// ... Label 1 is issued once, on the very first request; no prime is ever
// issued twice.
class LabelAllocator {
 public:
  LabelAllocator() = default;
  LabelAllocator(std::uint64_t next_prime_index, bool first_label_issued)
      : next_prime_index_(next_prime_index),
        first_label_issued_(first_label_issued) {}

  // Radicands of the next n labels.
  std::vector<std::uint64_t> allocate(std::size_t n);

  std::uint64_t next_prime_index() const { return next_prime_index_; }
  bool first_label_issued() const { return first_label_issued_; }

  bool operator==(const LabelAllocator&) const = default;

 private:
  std::uint64_t next_prime_index_ = 0;
  bool first_label_issued_ = false;
};

// Labels of one grouping transformation: labels[i] belongs to the i-th
// member of dim.level in induced order.
struct LabelingComponent {
  std::string dim;
  std::string level;
  std::vector<std::uint64_t> labels;

  bool operator==(const LabelingComponent&) const = default;
};

// Metadata carried by every measure that is a prime labeling or a product of
// prime labelings. `primes` is the sorted set of primes drawn by the
// components; projection uses it to tell which radical factors belong to the
// labeling.
struct LabelingMeta {
  std::vector<LabelingComponent> components;
  std::vector<std::uint64_t> primes;

  static LabelingMeta single(std::string dim, std::string level,
                             std::vector<std::uint64_t> labels);
  // Metadata of the cellwise product of two labelings. Throws
  // EvaluationError when their prime sets overlap.
  static LabelingMeta product(const LabelingMeta& a, const LabelingMeta& b);

  mpz_class prime_product() const;

  bool operator==(const LabelingMeta&) const = default;
};

// Coefficient of `label` in the prime sum `v`, relative to a labeling over
// `primes`: the sum, over terms a_T*sqrt(T) of v with W | T and T/W coprime to
// every labeling prime, of a_T*sqrt(T/W), where label = sqrt(W). Throws
// EvaluationError if `label` is not a single radical with coefficient 1 whose
// primes are labeling primes.
ExactValue project_value(const ExactValue& v, const ExactValue& label,
                         const std::vector<std::uint64_t>& primes);

// Answers project_value(v, ·, primes) for many labels. Terms of v are bucketed
// by their labeling part gcd(T, prod(primes)), which must equal W.
class ProjectionIndex {
 public:
  ProjectionIndex(const ExactValue& v, const std::vector<std::uint64_t>& primes);

  // Zero label projects to zero.
  ExactValue project(const ExactValue& label) const;

 private:
  mpz_class prime_product_;
  std::map<mpz_class, ExactValue> buckets_;
};

}  // namespace cubealg::exactnum
