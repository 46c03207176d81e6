#pragma once

// Exact integer combinatorics: primes, binomials, k-subset ranking, CRT.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace privcap {

using BigInt = boost::multiprecision::cpp_int;

/// Largest ground set for which subsets are packed into a machine word.
inline constexpr unsigned kMaxMaskGround = 64;

bool is_prime(std::uint64_t value);

/// Strictly increasing list of primes.
class PrimeList {
 public:
  PrimeList() = default;
  /// Throws std::invalid_argument unless `values` are strictly increasing primes.
  explicit PrimeList(std::vector<std::uint64_t> values);

  const std::vector<std::uint64_t>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  std::uint64_t operator[](std::size_t i) const { return values_[i]; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  bool operator==(const PrimeList&) const = default;

 private:
  std::vector<std::uint64_t> values_;
};

/// The `count` smallest primes strictly greater than `after`.
PrimeList next_primes(std::uint64_t after, std::size_t count);

BigInt binomial(std::uint64_t n, std::uint64_t k);

/// Same as binomial() but throws std::overflow_error if the value does not fit.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

/// Converts to uint64 if it fits, else throws std::overflow_error.
std::uint64_t to_u64(const BigInt& value);

/// A k-element subset of [1, ground_size], elements kept strictly increasing.
class KSubset {
 public:
  KSubset() = default;
  /// Sorts the elements; throws std::invalid_argument on duplicates or
  /// elements outside [1, ground_size].
  KSubset(unsigned ground_size, std::vector<unsigned> elements);

  /// Subset of [1, ground_size] whose bit j-1 is set iff j is a member.
  static KSubset from_mask(unsigned ground_size, std::uint64_t mask);

  unsigned ground_size() const { return ground_size_; }
  unsigned size() const { return static_cast<unsigned>(elements_.size()); }
  const std::vector<unsigned>& elements() const { return elements_; }

  /// Requires ground_size <= 64.
  std::uint64_t mask() const;

  unsigned intersection_size(const KSubset& other) const;

  std::string to_string() const;

  bool operator==(const KSubset&) const = default;

 private:
  unsigned ground_size_ = 0;
  std::vector<unsigned> elements_;
};

/// Colexicographic rank of `subset` among the size-k subsets of its ground set.
std::uint64_t subset_rank(const KSubset& subset);

/// Inverse of subset_rank(); throws std::out_of_range when
/// index >= binomial(ground_size, k).
KSubset subset_unrank(unsigned ground_size, unsigned k, std::uint64_t index);

/// Bit masks of all k-subsets of [1, ground_size] in colex order. Colex order on
/// equal-size subsets is the numeric order of their masks.
std::vector<std::uint64_t> all_subset_masks(unsigned ground_size, unsigned k);

struct Congruence {
  std::uint64_t residue;
  std::uint64_t modulus;
};

/// The unique x in [0, bound) with x = residue (mod modulus) for every pair, or
/// nullopt if no solution lies below the bound or more than one does. Throws
/// std::invalid_argument if moduli repeat or are < 2.
std::optional<std::uint64_t> crt_unique_below(std::span<const Congruence> congruences,
                                              std::uint64_t bound);

/// Non-negative remainder of a signed value.
inline std::uint64_t mod_floor(std::int64_t value, std::uint64_t modulus) {
  const auto m = static_cast<std::int64_t>(modulus);
  std::int64_t r = value % m;
  if (r < 0) r += m;
  return static_cast<std::uint64_t>(r);
}

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t modulus);
std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus);

/// Inverse of `a` modulo a prime; throws std::domain_error when a = 0 (mod p).
std::uint64_t mod_inverse_prime(std::uint64_t a, std::uint64_t prime);

}  // namespace privcap
