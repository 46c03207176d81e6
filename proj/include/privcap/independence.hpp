#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "privcap/graph.hpp"

namespace privcap {

inline constexpr std::uint64_t kDefaultNodeBudget = 10'000'000;

/// Search limit for the exact solver. A node budget gives reproducible
/// results; a wall-clock limit does not, and results hitting it say so.
struct SearchBudget {
  std::uint64_t max_nodes = kDefaultNodeBudget;
  std::optional<double> max_seconds;
};

struct AlphaResult {
  std::size_t size = 0;
  VertexSet witness;
  /// True iff the search finished, so size is the independence number.
  bool exact = false;
  std::uint64_t nodes = 0;
  /// Set when the wall-clock limit stopped the search (nondeterministic).
  bool stopped_by_time = false;
  double seconds = 0.0;
};

bool is_independent(const Graph& g, const VertexSet& s);

/// Maximum independent set by branch and bound on the complement (max clique
/// with greedy colouring bounds, vertices ordered by descending complement
/// degree, ties by index). Single-threaded, so node-budgeted runs are
/// reproducible.
AlphaResult max_independent_set(const Graph& g, const SearchBudget& budget = {});

/// Independence number of a disjoint union from exact part results. Throws
/// std::invalid_argument if any part is inexact.
std::size_t alpha_of_union(std::span<const AlphaResult> parts);

/// Tuples over [0, n) of a fixed arity, stored contiguously.
class TupleList {
 public:
  TupleList() = default;
  explicit TupleList(unsigned arity) : arity_(arity) {}
  /// Throws std::invalid_argument if a tuple's length differs from the arity.
  TupleList(unsigned arity, const std::vector<std::vector<Vertex>>& tuples);

  unsigned arity() const { return arity_; }
  std::size_t size() const { return arity_ == 0 ? 0 : flat_.size() / arity_; }
  std::span<const Vertex> operator[](std::size_t i) const {
    return {flat_.data() + i * arity_, arity_};
  }
  void push_back(std::span<const Vertex> tuple);
  void reserve(std::size_t tuples) { flat_.reserve(tuples * arity_); }

 private:
  unsigned arity_ = 0;
  std::vector<Vertex> flat_;
};

struct PowerIndependenceReport {
  bool independent = true;
  /// Lexicographically first pair (i < j) of tuple indices adjacent in G^k.
  std::optional<std::pair<std::size_t, std::size_t>> first_conflict;
  std::uint64_t pairs_checked = 0;
};

/// Checks independence of `tuples` in the k-th strong power of g without
/// building the power. Identical tuples denote the same vertex and are not
/// compared. Parallel over the first tuple of each pair.
PowerIndependenceReport check_independent_in_power(const Graph& g, unsigned k,
                                                   const TupleList& tuples);

/// Throws std::invalid_argument on arity mismatch or out-of-range entries.
bool is_independent_in_power(const Graph& g, unsigned k, const TupleList& tuples);
bool is_independent_in_power(const Graph& g, unsigned k,
                             const std::vector<std::vector<Vertex>>& tuples);

struct CertifiedUpper {
  double value = std::numeric_limits<double>::infinity();
  std::string source;
};

struct BracketLevel {
  unsigned k = 0;
  std::size_t vertices = 0;
  AlphaResult alpha;
};

struct CapacityBracket {
  double lower = 1.0;
  double upper = std::numeric_limits<double>::infinity();
  unsigned witness_k = 1;
  std::size_t witness_size = 1;
  std::optional<std::string> upper_source;
  std::vector<BracketLevel> levels;
};

/// lower = max over k <= k_max of alpha(G^k)^(1/k) over exact levels only;
/// upper = the supplied certified bound, else +inf. Throws std::logic_error
/// if a certified upper bound falls below the lower bound.
CapacityBracket capacity_bracket(const Graph& g, unsigned k_max,
                                 std::optional<CertifiedUpper> upper = std::nullopt,
                                 const SearchBudget& budget = {},
                                 std::uint64_t cap = kDefaultAdjacencyCap);

/// size^(1/k), using sqrt for k = 2 so that the value is correctly rounded.
double root_of(std::size_t size, unsigned k);

}  // namespace privcap
