#include "privcap/reference.hpp"

#include <stdexcept>

namespace privcap::reference {

Graph strong_product(const Graph& g, const Graph& h) {
  const std::size_t nh = h.size();
  Graph out(g.size() * nh);
  auto close = [](const Graph& x, Vertex a, Vertex b) { return a == b || x.adjacent(a, b); };
  for (std::size_t p = 0; p < out.size(); ++p) {
    for (std::size_t q = p + 1; q < out.size(); ++q) {
      const auto a1 = static_cast<Vertex>(p / nh), b1 = static_cast<Vertex>(p % nh);
      const auto a2 = static_cast<Vertex>(q / nh), b2 = static_cast<Vertex>(q % nh);
      if (close(g, a1, a2) && close(h, b1, b2)) out.add_edge(static_cast<Vertex>(p), static_cast<Vertex>(q));
    }
  }
  return out;
}

Graph build_graph(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes, std::uint32_t channel) {
  const std::uint64_t n = binomial_u64(r, s);
  std::vector<KSubset> subsets;
  subsets.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) subsets.push_back(subset_unrank(r, s, i));
  Graph g(n);
  for (Vertex u = 0; u < n; ++u) {
    for (Vertex v = u + 1; v < n; ++v) {
      const unsigned overlap = subsets[u].intersection_size(subsets[v]);
      for (auto q : primes) {
        if (overlap % q == s % q) {
          g.add_edge(u, v);
          break;
        }
      }
    }
  }
  std::vector<VertexLabel> labels;
  labels.reserve(n);
  for (auto& sub : subsets) labels.push_back({channel, std::move(sub)});
  g.set_labels(std::move(labels));
  return g;
}

CertificateReport verify_certificate(const Graph& g, const RepresentationCertificate& cert, std::size_t max_listed) {
  if (!g.has_labels() || cert.vertex_count() != g.size()) {
    throw std::invalid_argument("certificate does not match graph");
  }
  CertificateReport report;
  const auto& labels = g.labels();
  auto record = [&](CertificateViolation::Kind kind, Vertex u, Vertex v) {
    ++report.violation_count;
    if (report.violations.size() < max_listed) report.violations.push_back({kind, u, v});
  };
  for (Vertex u = 0; u < g.size(); ++u) {
    for (Vertex v = 0; v < g.size(); ++v) {
      ++report.pairs_checked;
      const auto value =
          fw_evaluate(labels[u].subset, labels[u].channel, labels[v].subset, labels[v].channel, cert.q(), cert.s());
      if (u == v) {
        if (value == 0) record(CertificateViolation::Kind::diagonal_vanishes, u, v);
      } else if (!g.adjacent(u, v) && value != 0) {
        record(CertificateViolation::Kind::nonedge_nonzero, u, v);
      }
    }
  }
  report.valid = report.violation_count == 0;
  return report;
}

PowerIndependenceReport check_independent_in_power(const Graph& g, unsigned k, const TupleList& tuples) {
  if (tuples.size() != 0 && tuples.arity() != k) throw std::invalid_argument("tuple arity mismatch");
  PowerIndependenceReport report;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    for (std::size_t j = i + 1; j < tuples.size(); ++j) {
      ++report.pairs_checked;
      bool distinct = false;
      bool all_close = true;
      for (unsigned c = 0; c < k; ++c) {
        const Vertex a = tuples[i][c], b = tuples[j][c];
        if (a != b) {
          distinct = true;
          if (!g.adjacent(a, b)) all_close = false;
        }
      }
      if (distinct && all_close) {
        report.independent = false;
        report.first_conflict = std::pair{i, j};
        return report;
      }
    }
  }
  return report;
}

EdgeColoring build_coloring(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes) {
  const std::uint64_t n = binomial_u64(r, s);
  std::vector<KSubset> subsets;
  subsets.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) subsets.push_back(subset_unrank(r, s, i));
  std::vector<Color> colors;
  colors.reserve(pair_count(n));
  const auto t = static_cast<unsigned>(primes.size());
  for (std::uint64_t u = 0; u < n; ++u) {
    for (std::uint64_t v = u + 1; v < n; ++v) {
      const unsigned overlap = subsets[u].intersection_size(subsets[v]);
      Color c = 0;
      for (unsigned i = 0; i < t && c == 0; ++i) {
        if (overlap % primes[i] == s % primes[i]) c = static_cast<Color>(i + 1);
      }
      colors.push_back(c != 0 ? c : fallback_color(subset_rank(subsets[u]), subset_rank(subsets[v]), t));
    }
  }
  return EdgeColoring(r, s, primes, kFallbackRankSum, std::move(colors));
}

}  // namespace privcap::reference
