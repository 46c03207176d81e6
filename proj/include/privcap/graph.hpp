#pragma once

// Dense bit-matrix graphs and the graph algebra used by the capacity
// constructions: disjoint union, strong product, powers, complement, induced
// subgraphs.

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "privcap/core_math.hpp"

namespace privcap {

using Vertex = std::uint32_t;

/// Default bound on n*n adjacency bits for any constructed graph (256 MiB).
inline constexpr std::uint64_t kDefaultAdjacencyCap = std::uint64_t{1} << 31;

class SizeCapExceeded : public std::length_error {
 public:
  SizeCapExceeded(std::uint64_t vertices, std::uint64_t cap);
};

/// Throws SizeCapExceeded if an n-vertex adjacency matrix would exceed `cap` bits.
void check_size_cap(std::uint64_t vertices, std::uint64_t cap);

/// Per-vertex annotation: which channel a vertex belongs to and its subset.
struct VertexLabel {
  std::uint32_t channel = 0;
  KSubset subset;

  bool operator==(const VertexLabel&) const = default;
};

/// Bit vector over [0, n).
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(std::size_t universe);
  VertexSet(std::size_t universe, std::span<const Vertex> members);

  std::size_t universe() const { return universe_; }
  void insert(Vertex v);
  void erase(Vertex v);
  bool contains(Vertex v) const { return (words_[v >> 6] >> (v & 63)) & 1; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  std::vector<Vertex> members() const;

  std::span<const std::uint64_t> words() const { return words_; }

  bool operator==(const VertexSet&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Simple undirected graph stored as n bit-rows. Rows are padded to whole
/// 64-bit words and padding bits stay zero.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n, std::uint64_t cap = kDefaultAdjacencyCap);

  static Graph edgeless(std::size_t n);
  static Graph complete(std::size_t n);
  static Graph cycle(std::size_t n);
  static Graph path(std::size_t n);

  std::size_t size() const { return n_; }
  std::size_t words_per_row() const { return words_; }

  bool adjacent(Vertex u, Vertex v) const {
    return (bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >> (v & 63)) & 1;
  }
  void add_edge(Vertex u, Vertex v);
  void remove_edge(Vertex u, Vertex v);

  std::span<const std::uint64_t> row(Vertex v) const {
    return {bits_.data() + static_cast<std::size_t>(v) * words_, words_};
  }
  /// Writable row for bulk construction. Callers must keep the matrix symmetric.
  std::span<std::uint64_t> mutable_row(Vertex v) {
    return {bits_.data() + static_cast<std::size_t>(v) * words_, words_};
  }

  std::size_t degree(Vertex v) const;
  std::uint64_t edge_count() const;
  std::vector<Vertex> neighbors(Vertex v) const;

  bool has_labels() const { return labels_.has_value(); }
  const std::vector<VertexLabel>& labels() const;
  void set_labels(std::vector<VertexLabel> labels);
  void clear_labels() { labels_.reset(); }

  /// Throws std::logic_error unless the matrix is symmetric and irreflexive and
  /// the padding bits are clear.
  void validate() const;

  bool same_adjacency(const Graph& other) const { return n_ == other.n_ && bits_ == other.bits_; }
  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
  std::optional<std::vector<VertexLabel>> labels_;
};

/// Parts are laid out in order, part j occupying a contiguous block after the
/// previous ones. Labels are kept when every part carries them.
Graph disjoint_union(std::span<const Graph> parts, std::uint64_t cap = kDefaultAdjacencyCap);

/// Vertex (a, b) gets index a * h.size() + b.
Graph strong_product(const Graph& g, const Graph& h, std::uint64_t cap = kDefaultAdjacencyCap);

/// k-fold strong power. Tuple (v_1, ..., v_k) is numbered in mixed radix with
/// v_1 most significant.
Graph power(const Graph& g, unsigned k, std::uint64_t cap = kDefaultAdjacencyCap);

Graph induced(const Graph& g, const VertexSet& subset);
Graph complement(const Graph& g);

}  // namespace privcap
