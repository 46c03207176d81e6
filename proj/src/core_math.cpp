#include "privcap/core_math.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace privcap {

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  if (value < 4) return true;
  if (value % 2 == 0 || value % 3 == 0) return false;
  for (std::uint64_t d = 5; d <= value / d; d += 6) {
    if (value % d == 0 || value % (d + 2) == 0) return false;
  }
  return true;
}

PrimeList::PrimeList(std::vector<std::uint64_t> values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!is_prime(values_[i])) {
      throw std::invalid_argument(std::to_string(values_[i]) + " is not prime");
    }
    if (i > 0 && values_[i] <= values_[i - 1]) {
      throw std::invalid_argument("prime list must be strictly increasing");
    }
  }
}

PrimeList next_primes(std::uint64_t after, std::size_t count) {
  if (after < 2) throw std::invalid_argument("next_primes: after must be >= 2");
  if (count == 0) throw std::invalid_argument("next_primes: count must be >= 1");
  std::vector<std::uint64_t> out;
  out.reserve(count);
  std::uint64_t candidate = after;
  while (out.size() < count) {
    if (candidate == std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("next_primes: exceeded 64-bit range");
    }
    ++candidate;
    if (is_prime(candidate)) out.push_back(candidate);
  }
  return PrimeList(std::move(out));
}

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  // Each prefix product is itself a binomial coefficient, so the division is exact.
  for (std::uint64_t i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;
  }
  return result;
}

std::uint64_t to_u64(const BigInt& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) {
    throw std::overflow_error("value does not fit in 64 bits: " + value.str());
  }
  return value.convert_to<std::uint64_t>();
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) { return to_u64(binomial(n, k)); }

KSubset::KSubset(unsigned ground_size, std::vector<unsigned> elements)
    : ground_size_(ground_size), elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i] < 1 || elements_[i] > ground_size_) {
      throw std::invalid_argument("subset element " + std::to_string(elements_[i]) +
                                  " outside [1, " + std::to_string(ground_size_) + "]");
    }
    if (i > 0 && elements_[i] == elements_[i - 1]) {
      throw std::invalid_argument("duplicate subset element " + std::to_string(elements_[i]));
    }
  }
}

KSubset KSubset::from_mask(unsigned ground_size, std::uint64_t mask) {
  if (ground_size > kMaxMaskGround) throw std::invalid_argument("ground set too large for a mask");
  if (ground_size < kMaxMaskGround && (mask >> ground_size) != 0) {
    throw std::invalid_argument("mask has bits outside the ground set");
  }
  std::vector<unsigned> elements;
  while (mask != 0) {
    elements.push_back(static_cast<unsigned>(std::countr_zero(mask)) + 1);
    mask &= mask - 1;
  }
  return KSubset(ground_size, std::move(elements));
}

std::uint64_t KSubset::mask() const {
  if (ground_size_ > kMaxMaskGround) throw std::logic_error("ground set too large for a mask");
  std::uint64_t m = 0;
  for (unsigned e : elements_) m |= std::uint64_t{1} << (e - 1);
  return m;
}

unsigned KSubset::intersection_size(const KSubset& other) const {
  unsigned count = 0;
  auto a = elements_.begin();
  auto b = other.elements_.begin();
  while (a != elements_.end() && b != other.elements_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

std::string KSubset::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < elements_.size(); ++i) os << (i ? "," : "") << elements_[i];
  os << '}';
  return os.str();
}

std::uint64_t subset_rank(const KSubset& subset) {
  // colex: sum over the j-th smallest element a_j (1-based j) of C(a_j - 1, j)
  std::uint64_t rank = 0;
  const auto& el = subset.elements();
  for (std::size_t j = 0; j < el.size(); ++j) rank += binomial_u64(el[j] - 1, j + 1);
  return rank;
}

KSubset subset_unrank(unsigned ground_size, unsigned k, std::uint64_t index) {
  const BigInt total = binomial(ground_size, k);
  if (BigInt(index) >= total) {
    throw std::out_of_range("subset index " + std::to_string(index) + " out of range [0, " +
                            total.str() + ")");
  }
  std::vector<unsigned> elements(k);
  unsigned top = ground_size;
  for (unsigned j = k; j >= 1; --j) {
    // largest a with C(a-1, j) <= index
    unsigned a = top;
    while (binomial_u64(a - 1, j) > index) --a;
    elements[j - 1] = a;
    index -= binomial_u64(a - 1, j);
    top = a - 1;
  }
  return KSubset(ground_size, std::move(elements));
}

std::vector<std::uint64_t> all_subset_masks(unsigned ground_size, unsigned k) {
  if (ground_size > kMaxMaskGround) throw std::invalid_argument("ground set too large for masks");
  if (k > ground_size) return {};
  std::vector<std::uint64_t> out;
  out.reserve(binomial_u64(ground_size, k));
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  std::uint64_t mask = (k == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << k) - 1;
  const std::uint64_t limit_bit = ground_size == 64 ? 0 : std::uint64_t{1} << ground_size;
  while (true) {
    out.push_back(mask);
    // Gosper's hack: next mask with the same popcount
    const std::uint64_t low = mask & (~mask + 1);
    const std::uint64_t ripple = mask + low;
    if (ripple == 0) break;
    const std::uint64_t next = (((ripple ^ mask) >> 2) / low) | ripple;
    if (limit_bit != 0 && next >= limit_bit) break;
    if (limit_bit == 0 && next < mask) break;
    mask = next;
  }
  return out;
}

std::optional<std::uint64_t> crt_unique_below(std::span<const Congruence> congruences,
                                              std::uint64_t bound) {
  for (std::size_t i = 0; i < congruences.size(); ++i) {
    if (congruences[i].modulus < 2) throw std::invalid_argument("crt: modulus must be >= 2");
    for (std::size_t j = 0; j < i; ++j) {
      if (congruences[i].modulus == congruences[j].modulus) {
        throw std::invalid_argument("crt: moduli must be pairwise distinct");
      }
    }
  }
  // Combine incrementally: x = value (mod product).
  BigInt value = 0;
  BigInt product = 1;
  for (const auto& c : congruences) {
    const BigInt m = c.modulus;
    const BigInt target = c.residue % c.modulus;
    // Solve value + product * k = target (mod m), m prime-or-coprime assumed.
    const std::uint64_t prod_mod = static_cast<std::uint64_t>(product % m);
    const std::uint64_t diff = static_cast<std::uint64_t>(((target - value % m) % m + m) % m);
    if (prod_mod == 0) {
      if (diff != 0) return std::nullopt;
      continue;
    }
    // Extended Euclid on (prod_mod, modulus) handles non-prime coprime moduli too.
    std::int64_t old_r = static_cast<std::int64_t>(prod_mod), r = static_cast<std::int64_t>(c.modulus);
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
      const std::int64_t q = old_r / r;
      std::tie(old_r, r) = std::pair{r, old_r - q * r};
      std::tie(old_s, s) = std::pair{s, old_s - q * s};
    }
    if (old_r != 1) throw std::invalid_argument("crt: moduli must be pairwise coprime");
    const std::uint64_t inv = mod_floor(old_s, c.modulus);
    const std::uint64_t k = mod_mul(diff, inv, c.modulus);
    value += product * k;
    product *= m;
  }
  if (value >= bound) return std::nullopt;
  if (value + product < bound) return std::nullopt;  // a second solution lies below the bound
  return value.convert_to<std::uint64_t>();
}

std::uint64_t mod_mul(std::uint64_t a, std::uint64_t b, std::uint64_t modulus) {
  __extension__ using u128 = unsigned __int128;
  return static_cast<std::uint64_t>((static_cast<u128>(a) * b) % modulus);
}

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t modulus) {
  std::uint64_t result = 1 % modulus;
  base %= modulus;
  while (exp != 0) {
    if (exp & 1) result = mod_mul(result, base, modulus);
    base = mod_mul(base, base, modulus);
    exp >>= 1;
  }
  return result;
}

std::uint64_t mod_inverse_prime(std::uint64_t a, std::uint64_t prime) {
  if (a % prime == 0) throw std::domain_error("zero has no modular inverse");
  return mod_pow(a, prime - 2, prime);
}

}  // namespace privcap
