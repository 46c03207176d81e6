#include "privcap/graph.hpp"

#include <string>

#include <omp.h>

namespace privcap {

namespace {

std::size_t words_for(std::size_t n) { return (n + 63) / 64; }

inline void set_bit(std::span<std::uint64_t> row, std::size_t v) {
  row[v >> 6] |= std::uint64_t{1} << (v & 63);
}

}  // namespace

SizeCapExceeded::SizeCapExceeded(std::uint64_t vertices, std::uint64_t cap)
    : std::length_error("graph on " + std::to_string(vertices) +
                        " vertices exceeds the adjacency cap of " + std::to_string(cap) +
                        " bits") {}

void check_size_cap(std::uint64_t vertices, std::uint64_t cap) {
  if (vertices != 0 && vertices > cap / vertices) throw SizeCapExceeded(vertices, cap);
}

VertexSet::VertexSet(std::size_t universe) : universe_(universe), words_(words_for(universe), 0) {}

VertexSet::VertexSet(std::size_t universe, std::span<const Vertex> members) : VertexSet(universe) {
  for (Vertex v : members) insert(v);
}

void VertexSet::insert(Vertex v) {
  if (v >= universe_) throw std::out_of_range("vertex " + std::to_string(v) + " outside set universe");
  words_[v >> 6] |= std::uint64_t{1} << (v & 63);
}

void VertexSet::erase(Vertex v) {
  if (v >= universe_) throw std::out_of_range("vertex " + std::to_string(v) + " outside set universe");
  words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
}

std::size_t VertexSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<Vertex> VertexSet::members() const {
  std::vector<Vertex> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      out.push_back(static_cast<Vertex>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

Graph::Graph(std::size_t n, std::uint64_t cap) : n_(n), words_(words_for(n)) {
  check_size_cap(n, cap);
  if (n > std::uint64_t{0xFFFFFFFF}) throw SizeCapExceeded(n, cap);
  bits_.assign(n_ * words_, 0);
}

Graph Graph::edgeless(std::size_t n) { return Graph(n); }

Graph Graph::complete(std::size_t n) {
  Graph g(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = 0; v < n; ++v) {
      if (u != v) set_bit(g.mutable_row(u), v);
    }
  }
  return g;
}

Graph Graph::cycle(std::size_t n) {
  Graph g(n);
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  for (Vertex v = 0; v < n; ++v) g.add_edge(v, static_cast<Vertex>((v + 1) % n));
  return g;
}

Graph Graph::path(std::size_t n) {
  Graph g(n);
  for (Vertex v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

void Graph::add_edge(Vertex u, Vertex v) {
  if (u >= n_ || v >= n_) throw std::out_of_range("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loops are not allowed");
  set_bit(mutable_row(u), v);
  set_bit(mutable_row(v), u);
}

void Graph::remove_edge(Vertex u, Vertex v) {
  if (u >= n_ || v >= n_) throw std::out_of_range("edge endpoint out of range");
  mutable_row(u)[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
  mutable_row(v)[u >> 6] &= ~(std::uint64_t{1} << (u & 63));
}

std::size_t Graph::degree(Vertex v) const {
  std::size_t d = 0;
  for (auto w : row(v)) d += static_cast<std::size_t>(std::popcount(w));
  return d;
}

std::uint64_t Graph::edge_count() const {
  std::uint64_t total = 0;
  for (auto w : bits_) total += static_cast<std::uint64_t>(std::popcount(w));
  return total / 2;
}

std::vector<Vertex> Graph::neighbors(Vertex v) const {
  std::vector<Vertex> out;
  auto r = row(v);
  for (std::size_t i = 0; i < r.size(); ++i) {
    std::uint64_t w = r[i];
    while (w != 0) {
      out.push_back(static_cast<Vertex>(i * 64 + std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

const std::vector<VertexLabel>& Graph::labels() const {
  if (!labels_) throw std::logic_error("graph has no vertex labels");
  return *labels_;
}

void Graph::set_labels(std::vector<VertexLabel> labels) {
  if (labels.size() != n_) throw std::invalid_argument("label count does not match vertex count");
  labels_ = std::move(labels);
}

void Graph::validate() const {
  const std::uint64_t tail_mask = (n_ % 64 == 0) ? 0 : ~((std::uint64_t{1} << (n_ % 64)) - 1);
  for (Vertex u = 0; u < n_; ++u) {
    if (adjacent(u, u)) throw std::logic_error("self-loop at vertex " + std::to_string(u));
    if (words_ != 0 && (row(u)[words_ - 1] & tail_mask) != 0) {
      throw std::logic_error("padding bits set in row " + std::to_string(u));
    }
    for (Vertex v = u + 1; v < n_; ++v) {
      if (adjacent(u, v) != adjacent(v, u)) {
        throw std::logic_error("asymmetric adjacency at (" + std::to_string(u) + ", " +
                               std::to_string(v) + ")");
      }
    }
  }
  if (labels_ && labels_->size() != n_) throw std::logic_error("label count mismatch");
}

Graph disjoint_union(std::span<const Graph> parts, std::uint64_t cap) {
  if (parts.empty()) throw std::invalid_argument("disjoint_union needs at least one part");
  std::uint64_t total = 0;
  bool labeled = true;
  for (const auto& p : parts) {
    total += p.size();
    labeled = labeled && p.has_labels();
  }
  Graph out(total, cap);
  std::size_t offset = 0;
  for (const auto& part : parts) {
    const std::size_t base = offset;
    const auto pn = static_cast<std::int64_t>(part.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < pn; ++u) {
      auto src = part.row(static_cast<Vertex>(u));
      auto dst = out.mutable_row(static_cast<Vertex>(base + u));
      for (std::size_t wi = 0; wi < src.size(); ++wi) {
        std::uint64_t w = src[wi];
        while (w != 0) {
          set_bit(dst, base + wi * 64 + std::countr_zero(w));
          w &= w - 1;
        }
      }
    }
    offset += part.size();
  }
  if (labeled) {
    std::vector<VertexLabel> labels;
    labels.reserve(total);
    for (const auto& p : parts) labels.insert(labels.end(), p.labels().begin(), p.labels().end());
    out.set_labels(std::move(labels));
  }
  return out;
}

Graph strong_product(const Graph& g, const Graph& h, std::uint64_t cap) {
  const std::uint64_t ng = g.size();
  const std::uint64_t nh = h.size();
  if (nh != 0 && ng > std::uint64_t{0xFFFFFFFF} / nh) throw SizeCapExceeded(ng * nh, cap);
  Graph out(ng * nh, cap);

  // Closed neighbourhoods, so each coordinate may stay put or move along an edge.
  std::vector<std::vector<Vertex>> closed_g(ng), closed_h(nh);
  for (Vertex a = 0; a < ng; ++a) {
    closed_g[a] = g.neighbors(a);
    closed_g[a].push_back(a);
  }
  for (Vertex b = 0; b < nh; ++b) {
    closed_h[b] = h.neighbors(b);
    closed_h[b].push_back(b);
  }

  const auto total = static_cast<std::int64_t>(ng * nh);
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const auto a = static_cast<Vertex>(static_cast<std::uint64_t>(idx) / nh);
    const auto b = static_cast<Vertex>(static_cast<std::uint64_t>(idx) % nh);
    auto dst = out.mutable_row(static_cast<Vertex>(idx));
    for (Vertex a2 : closed_g[a]) {
      for (Vertex b2 : closed_h[b]) set_bit(dst, static_cast<std::size_t>(a2) * nh + b2);
    }
    dst[static_cast<std::size_t>(idx) >> 6] &= ~(std::uint64_t{1} << (idx & 63));
  }
  return out;
}

Graph power(const Graph& g, unsigned k, std::uint64_t cap) {
  if (k == 0) throw std::invalid_argument("power: k must be positive");
  // Check the final size before building any intermediate.
  std::uint64_t vertices = 1;
  for (unsigned i = 0; i < k; ++i) {
    if (g.size() != 0 && vertices > std::uint64_t{0xFFFFFFFF} / g.size()) {
      throw SizeCapExceeded(vertices * g.size(), cap);
    }
    vertices *= g.size();
  }
  check_size_cap(vertices, cap);

  Graph result = g;
  result.clear_labels();
  for (unsigned i = 1; i < k; ++i) result = strong_product(result, g, cap);
  return result;
}

Graph induced(const Graph& g, const VertexSet& subset) {
  if (subset.universe() != g.size()) throw std::invalid_argument("vertex set universe mismatch");
  const auto members = subset.members();
  if (members.empty()) throw std::invalid_argument("induced subgraph of an empty vertex set");
  Graph out(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (g.adjacent(members[i], members[j])) out.add_edge(static_cast<Vertex>(i), static_cast<Vertex>(j));
    }
  }
  if (g.has_labels()) {
    std::vector<VertexLabel> labels;
    labels.reserve(members.size());
    for (Vertex v : members) labels.push_back(g.labels()[v]);
    out.set_labels(std::move(labels));
  }
  return out;
}

Graph complement(const Graph& g) {
  const std::size_t n = g.size();
  Graph out(n);
  if (n == 0) return out;
  const std::size_t words = g.words_per_row();
  const std::uint64_t tail = (n % 64 == 0) ? ~std::uint64_t{0} : (std::uint64_t{1} << (n % 64)) - 1;
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t u = 0; u < rows; ++u) {
    auto src = g.row(static_cast<Vertex>(u));
    auto dst = out.mutable_row(static_cast<Vertex>(u));
    for (std::size_t w = 0; w < words; ++w) dst[w] = ~src[w];
    dst[words - 1] &= tail;
    dst[static_cast<std::size_t>(u) >> 6] &= ~(std::uint64_t{1} << (u & 63));
  }
  if (g.has_labels()) out.set_labels(g.labels());
  return out;
}

}  // namespace privcap
