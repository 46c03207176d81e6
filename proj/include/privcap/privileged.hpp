#pragma once

// Channel graphs whose combined capacity is high exactly for coalitions that
// contain a member of a given family of sender sets.
//
// Senders are 1..t. A coalition or family member is a bit mask with bit i-1
// standing for sender i. Each maximal family-free set Y gets its own prime
// p_Y, sender i gets A_i = {p_Y : i in Y}, and channel i's graph joins two
// s-subsets A != B of [r] iff |A cap B| = s (mod q) for some q in A_i.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "privcap/core_math.hpp"
#include "privcap/graph.hpp"
#include "privcap/independence.hpp"
#include "privcap/polyrep.hpp"

namespace privcap {

using SenderMask = std::uint32_t;

inline constexpr unsigned kMinSenders = 2;
inline constexpr unsigned kMaxSenders = 20;
inline constexpr int kManifestFormatVersion = 1;

/// 1-based sender ids of a mask, ascending.
std::vector<unsigned> senders_of(SenderMask mask);
SenderMask mask_of(const std::vector<unsigned>& senders, unsigned t);

class SubsetFamily {
 public:
  /// Throws std::invalid_argument if t is outside [2, 20], a member is empty,
  /// or a member names a sender outside [1, t]. Duplicates are dropped.
  SubsetFamily(unsigned t, std::vector<SenderMask> members);

  static SubsetFamily from_lists(unsigned t, const std::vector<std::vector<unsigned>>& lists);
  /// Parses a JSON array of arrays of 1-based sender ids.
  static SubsetFamily parse(unsigned t, std::string_view json_text);

  /// Every k-subset of [t].
  static SubsetFamily threshold(unsigned t, unsigned k);

  unsigned t() const { return t_; }
  /// Sorted ascending (colex), no duplicates.
  const std::vector<SenderMask>& members() const { return members_; }
  bool contains(SenderMask member) const;

  /// Smallest member (fewest senders, then smallest mask) inside x, if any.
  std::optional<SenderMask> smallest_member_within(SenderMask x) const;

  nlohmann::json to_json() const;
  /// FNV-1a of the canonical JSON text, as 16 hex digits.
  std::string canonical_hash() const;

  bool operator==(const SubsetFamily&) const = default;

 private:
  unsigned t_;
  std::vector<SenderMask> members_;
};

/// Inclusion-maximal subsets of [t] containing no member, ascending (colex).
/// Enumerates all 2^t sets.
std::vector<SenderMask> maximal_free_sets(const SubsetFamily& family);

struct AntichainAssignment {
  unsigned t = 0;
  std::vector<SenderMask> maximal_free_sets;
  /// prime_of[j] belongs to maximal_free_sets[j].
  std::vector<std::uint64_t> prime_of;
  /// a_sets[i - 1] = A_i, ascending.
  std::vector<std::vector<std::uint64_t>> a_sets;

  const std::vector<std::uint64_t>& a_set(unsigned sender) const { return a_sets.at(sender - 1); }
  /// |A_1 cup ... cup A_t|.
  std::size_t union_size() const;

  nlohmann::json to_json() const;
};

/// Gives the first |Y| primes of the pool to the maximal free sets in colex
/// order. Throws std::invalid_argument if the pool is too small.
AntichainAssignment build_assignment(const SubsetFamily& family, const PrimeList& prime_pool);

struct CoalitionStatus {
  std::vector<std::uint64_t> free_intersection;
  bool contains_member = false;
};

/// Intersection of A_i over i in x and whether x contains a member. Throws
/// std::invalid_argument for an empty or out-of-range coalition and
/// std::logic_error if both or neither hold.
CoalitionStatus coalition_status(const AntichainAssignment& assignment, const SubsetFamily& family,
                                 SenderMask x);

struct ParamReport {
  bool pass = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  /// Primes none of whose residues is reachable by an achievable overlap.
  std::vector<std::uint64_t> unrealizable;
  /// s = p^2 and r = p^3 for a prime p below every prime in use.
  bool canonical_shape = false;

  nlohmann::json to_json() const;
};

/// Overlap sizes |A cap B| for distinct s-subsets of [r]: [max(0, 2s - r), s - 1].
std::pair<unsigned, unsigned> overlap_range(unsigned r, unsigned s);

/// Hard checks: primes are distinct primes, every pairwise product exceeds s,
/// no prime divides s, 1 <= s <= r <= 64. Warns for each prime whose edge rule
/// can never fire.
ParamReport validate_params(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes);

/// Graph on all s-subsets of [r] (colex order) where distinct A, B are joined
/// iff |A cap B| = s (mod q) for some q in `primes`. Vertices are labeled with
/// `channel`. Rows are filled in parallel.
Graph build_graph(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes, std::uint32_t channel,
                  std::uint64_t cap = kDefaultAdjacencyCap);

struct SystemParams {
  unsigned r = 0;
  unsigned s = 0;
  /// Explicit pool; when empty, the pool is the primes following base_prime.
  std::vector<std::uint64_t> prime_pool;
  std::optional<std::uint64_t> base_prime;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(ParamReport report);
  const ParamReport& report() const { return report_; }

 private:
  ParamReport report_;
};

class PrivilegedSystem {
 public:
  /// Throws ValidationError when validate_params fails on the primes in use,
  /// std::invalid_argument for a bad pool, SizeCapExceeded for oversized graphs.
  static PrivilegedSystem construct(SubsetFamily family, SystemParams params,
                                    std::uint64_t cap = kDefaultAdjacencyCap);

  const SubsetFamily& family() const { return family_; }
  const SystemParams& params() const { return params_; }
  const PrimeList& prime_pool() const { return pool_; }
  const AntichainAssignment& assignment() const { return assignment_; }
  const ParamReport& validation() const { return validation_; }
  std::uint64_t n() const { return n_; }
  unsigned t() const { return family_.t(); }
  std::uint64_t cap() const { return cap_; }

  /// G_i for sender i in [1, t].
  const Graph& graph(unsigned sender) const { return graphs_.at(sender - 1); }

 private:
  PrivilegedSystem() = default;

  SubsetFamily family_{kMinSenders, {}};
  SystemParams params_;
  PrimeList pool_;
  AntichainAssignment assignment_;
  ParamReport validation_;
  std::uint64_t n_ = 0;
  std::uint64_t cap_ = kDefaultAdjacencyCap;
  std::vector<Graph> graphs_;
};

/// Disjoint union of G_i over i in x, ascending i; block j holds the j-th
/// sender of x.
Graph union_graph(const PrivilegedSystem& system, SenderMask x);

/// For every s-subset A, the tuple (A in G_{i_1}, ..., A in G_{i_|F|}) as
/// vertices of union_graph(system, x). Throws std::invalid_argument unless
/// `member` is in the family and inside x.
TupleList diagonal_tuples(const PrivilegedSystem& system, SenderMask member, SenderMask x);

struct BoundOptions {
  bool verify_witness = true;
  bool verify_certificate = true;
};

struct BoundReport {
  enum class Verdict { privileged, restricted };

  SenderMask coalition = 0;
  Verdict verdict = Verdict::restricted;
  double lower = 1.0;
  std::string lower_witness;
  std::optional<SenderMask> member;
  std::size_t witness_tuples = 0;
  std::optional<PowerIndependenceReport> witness_check;
  std::vector<std::uint64_t> free_intersection;
  std::optional<std::uint64_t> common_prime;
  std::optional<DimensionBound> upper;
  std::optional<CertificateReport> certificate;

  nlohmann::json to_json() const;
};

/// Privileged coalitions: lower = n^(1/|F|) for the smallest member F inside
/// x, witnessed by the diagonal tuples. Restricted coalitions: q = smallest
/// common prime, upper = dimension_bound(|x|, q, r), certificate checked on
/// the union graph.
BoundReport bound_report(const PrivilegedSystem& system, SenderMask x, const BoundOptions& options = {});

/// Manifest JSON describing the system and its graph files.
nlohmann::json system_manifest(const PrivilegedSystem& system, const std::vector<std::string>& graph_files);

/// Writes system.json and, if requested, G_<i>.dimacs (+ label sidecars).
void write_system(const PrivilegedSystem& system, const std::filesystem::path& dir, bool write_graphs = true);

/// Rebuilds the system from dir/system.json and checks it against the
/// recorded assignment. Throws FormatError on any disagreement.
PrivilegedSystem load_system(const std::filesystem::path& dir, std::uint64_t cap = kDefaultAdjacencyCap);

}  // namespace privcap
