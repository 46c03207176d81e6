#include "privcap/independence.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

namespace privcap {

bool is_independent(const Graph& g, const VertexSet& s) {
  if (s.universe() != g.size()) throw std::invalid_argument("vertex set universe mismatch");
  const auto set_words = s.words();
  for (Vertex u : s.members()) {
    auto row = g.row(u);
    for (std::size_t w = 0; w < row.size(); ++w) {
      if (row[w] & set_words[w]) return false;
    }
  }
  return true;
}

namespace {

using Clock = std::chrono::steady_clock;

// Max-clique search over a bitset graph (the complement of the input), after
// relabeling vertices into the search order.
class CliqueSearch {
 public:
  CliqueSearch(std::vector<std::uint64_t> adjacency, std::size_t n, const SearchBudget& budget)
      : n_(n), words_((n + 63) / 64), adj_(std::move(adjacency)), budget_(budget), frames_(n + 1),
        start_(Clock::now()) {}

  void seed_incumbent(std::vector<Vertex> clique) { best_ = std::move(clique); }

  // Returns true if the search completed.
  bool run() {
    auto& all = frame(0).candidates;
    for (std::size_t v = 0; v < n_; ++v) all[v >> 6] |= std::uint64_t{1} << (v & 63);
    current_.clear();
    expand(0, 0, words_);
    return !aborted_;
  }

  const std::vector<Vertex>& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }
  bool stopped_by_time() const { return stopped_by_time_; }

 private:
  // Per-depth scratch, allocated on first use. Depth never exceeds n.
  struct Frame {
    std::vector<std::uint64_t> candidates;
    std::vector<std::uint64_t> uncoloured;
    std::vector<std::uint64_t> cls;
    std::vector<Vertex> order;
    std::vector<std::uint32_t> colour;
  };

  const std::uint64_t* row(std::size_t v) const { return adj_.data() + v * words_; }

  Frame& frame(std::size_t depth) {
    Frame& f = frames_[depth];
    if (f.candidates.empty()) {
      f.candidates.assign(words_, 0);
      f.uncoloured.assign(words_, 0);
      f.cls.assign(words_, 0);
    }
    return f;
  }

  bool out_of_budget() {
    if (nodes_ > budget_.max_nodes) return true;
    if (budget_.max_seconds && (nodes_ & 255) == 0) {
      const std::chrono::duration<double> elapsed = Clock::now() - start_;
      if (elapsed.count() > *budget_.max_seconds) {
        stopped_by_time_ = true;
        return true;
      }
    }
    return false;
  }

  // Candidates live in frame(depth).candidates; words outside [lo, hi) are zero.
  void expand(std::size_t depth, std::size_t lo, std::size_t hi) {
    ++nodes_;
    if (out_of_budget()) {
      aborted_ = true;
      return;
    }

    // Greedy sequential colouring of the candidates. Only vertices whose colour
    // could still lead past the incumbent are recorded.
    {
      Frame& f = frame(depth);
      f.order.clear();
      f.colour.clear();
      std::copy(f.candidates.begin() + static_cast<std::ptrdiff_t>(lo),
                f.candidates.begin() + static_cast<std::ptrdiff_t>(hi),
                f.uncoloured.begin() + static_cast<std::ptrdiff_t>(lo));
      const std::ptrdiff_t need =
          static_cast<std::ptrdiff_t>(best_.size()) - static_cast<std::ptrdiff_t>(current_.size()) + 1;
      std::uint32_t k = 0;
      std::size_t ulo = lo;
      while (ulo < hi && f.uncoloured[ulo] == 0) ++ulo;
      while (ulo < hi) {
        ++k;
        std::copy(f.uncoloured.begin() + static_cast<std::ptrdiff_t>(ulo),
                  f.uncoloured.begin() + static_cast<std::ptrdiff_t>(hi),
                  f.cls.begin() + static_cast<std::ptrdiff_t>(ulo));
        for (std::size_t w = ulo; w < hi; ++w) {
          while (f.cls[w] != 0) {
            const std::size_t v = w * 64 + static_cast<std::size_t>(std::countr_zero(f.cls[w]));
            const std::uint64_t bit = std::uint64_t{1} << (v & 63);
            f.uncoloured[w] &= ~bit;
            f.cls[w] &= ~bit;
            const std::uint64_t* r = row(v);
            for (std::size_t x = w; x < hi; ++x) f.cls[x] &= ~r[x];
            if (static_cast<std::ptrdiff_t>(k) >= need) {
              f.order.push_back(static_cast<Vertex>(v));
              f.colour.push_back(k);
            }
          }
        }
        while (ulo < hi && f.uncoloured[ulo] == 0) ++ulo;
      }
    }

    for (std::size_t idx = frames_[depth].order.size(); idx-- > 0;) {
      Frame& f = frames_[depth];
      if (current_.size() + f.colour[idx] <= best_.size()) return;
      const Vertex v = f.order[idx];
      current_.push_back(v);
      Frame& next = frame(depth + 1);
      const std::uint64_t* r = row(v);
      std::size_t nlo = hi, nhi = lo;
      for (std::size_t w = lo; w < hi; ++w) {
        next.candidates[w] = f.candidates[w] & r[w];
        if (next.candidates[w] != 0) {
          nlo = std::min(nlo, w);
          nhi = w + 1;
        }
      }
      if (nlo >= nhi) {
        if (current_.size() > best_.size()) best_ = current_;
      } else {
        expand(depth + 1, nlo, nhi);
        // leave the child's words zero outside any later range
        std::fill(next.candidates.begin() + static_cast<std::ptrdiff_t>(nlo),
                  next.candidates.begin() + static_cast<std::ptrdiff_t>(nhi), 0);
      }
      current_.pop_back();
      if (aborted_) return;
      frames_[depth].candidates[v >> 6] &= ~(std::uint64_t{1} << (v & 63));
    }
  }

  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> adj_;
  SearchBudget budget_;
  std::vector<Frame> frames_;
  Clock::time_point start_;
  std::vector<Vertex> current_;
  std::vector<Vertex> best_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  bool stopped_by_time_ = false;
};

}  // namespace

AlphaResult max_independent_set(const Graph& g, const SearchBudget& budget) {
  const auto t0 = Clock::now();
  const std::size_t n = g.size();
  AlphaResult result;
  result.witness = VertexSet(n);
  if (n == 0) {
    result.exact = true;
    return result;
  }

  // Search order: descending degree in the complement, ties by index.
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{0});
  std::vector<std::size_t> comp_degree(n);
  for (Vertex v = 0; v < n; ++v) comp_degree[v] = n - 1 - g.degree(v);
  std::stable_sort(order.begin(), order.end(),
                   [&](Vertex a, Vertex b) { return comp_degree[a] > comp_degree[b]; });

  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> comp(n * words, 0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    const Vertex u = order[static_cast<std::size_t>(i)];
    std::uint64_t* dst = comp.data() + static_cast<std::size_t>(i) * words;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != static_cast<std::size_t>(i) && !g.adjacent(u, order[j])) {
        dst[j >> 6] |= std::uint64_t{1} << (j & 63);
      }
    }
  }

  // Greedy incumbent: scan in search order, keep what stays independent.
  std::vector<Vertex> greedy;
  {
    std::vector<std::uint64_t> allowed(words, ~std::uint64_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      if ((allowed[i >> 6] >> (i & 63)) & 1) {
        greedy.push_back(static_cast<Vertex>(i));
        const std::uint64_t* r = comp.data() + i * words;
        for (std::size_t w = 0; w < words; ++w) allowed[w] &= r[w];
      }
    }
  }

  CliqueSearch search(std::move(comp), n, budget);
  search.seed_incumbent(greedy);
  result.exact = search.run();
  result.nodes = search.nodes();
  result.stopped_by_time = search.stopped_by_time();
  for (Vertex v : search.best()) result.witness.insert(order[v]);
  result.size = search.best().size();
  result.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return result;
}

std::size_t alpha_of_union(std::span<const AlphaResult> parts) {
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (!p.exact) throw std::invalid_argument("alpha_of_union requires exact part results");
    total += p.size;
  }
  return total;
}

TupleList::TupleList(unsigned arity, const std::vector<std::vector<Vertex>>& tuples) : arity_(arity) {
  reserve(tuples.size());
  for (const auto& t : tuples) push_back(t);
}

void TupleList::push_back(std::span<const Vertex> tuple) {
  if (tuple.size() != arity_) {
    throw std::invalid_argument("tuple of length " + std::to_string(tuple.size()) +
                                " in a list of arity " + std::to_string(arity_));
  }
  flat_.insert(flat_.end(), tuple.begin(), tuple.end());
}

namespace {

void check_tuples(const Graph& g, unsigned k, const TupleList& tuples) {
  if (k == 0) throw std::invalid_argument("power exponent must be positive");
  if (tuples.arity() != k && tuples.size() != 0) {
    throw std::invalid_argument("tuple arity " + std::to_string(tuples.arity()) +
                                " does not match power " + std::to_string(k));
  }
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    for (Vertex v : tuples[i]) {
      if (v >= g.size()) throw std::invalid_argument("tuple entry out of range");
    }
  }
}

// Adjacent in G^k: distinct, and every coordinate equal or adjacent.
inline bool adjacent_in_power(const Graph& g, std::span<const Vertex> a, std::span<const Vertex> b,
                              bool& identical) {
  identical = true;
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] == b[c]) continue;
    identical = false;
    if (!g.adjacent(a[c], b[c])) return false;
  }
  return !identical;
}

}  // namespace

PowerIndependenceReport check_independent_in_power(const Graph& g, unsigned k,
                                                   const TupleList& tuples) {
  check_tuples(g, k, tuples);
  const std::size_t m = tuples.size();
  // Rows at or after the best conflicting row found so far are skipped; each
  // row reports its own first conflict, so the minimum is partition-independent.
  std::atomic<std::size_t> best_row{m};
  std::size_t best_col = m;
  std::uint64_t checked = 0;
  const auto rows = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : checked)
  for (std::int64_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    if (i >= best_row.load(std::memory_order_relaxed)) continue;
    const auto a = tuples[i];
    for (std::size_t j = i + 1; j < m; ++j) {
      ++checked;
      bool identical = false;
      if (adjacent_in_power(g, a, tuples[j], identical)) {
#pragma omp critical(privcap_power_conflict)
        {
          if (i < best_row.load() || (i == best_row.load() && j < best_col)) {
            best_row.store(i);
            best_col = j;
          }
        }
        break;
      }
    }
  }
  PowerIndependenceReport report;
  // pairs_checked depends on where the scan stopped, so it is only reported in
  // full for independent sets.
  report.pairs_checked = checked;
  if (best_row.load() < m) {
    report.independent = false;
    report.first_conflict = std::pair{best_row.load(), best_col};
  } else {
    report.pairs_checked = static_cast<std::uint64_t>(m) * (m - (m ? 1 : 0)) / 2;
  }
  return report;
}

bool is_independent_in_power(const Graph& g, unsigned k, const TupleList& tuples) {
  return check_independent_in_power(g, k, tuples).independent;
}

bool is_independent_in_power(const Graph& g, unsigned k,
                             const std::vector<std::vector<Vertex>>& tuples) {
  return is_independent_in_power(g, k, TupleList(k, tuples));
}

double root_of(std::size_t size, unsigned k) {
  if (k == 0) throw std::invalid_argument("root_of: k must be positive");
  const auto x = static_cast<double>(size);
  if (k == 1) return x;
  if (k == 2) return std::sqrt(x);
  return std::pow(x, 1.0 / k);
}

CapacityBracket capacity_bracket(const Graph& g, unsigned k_max, std::optional<CertifiedUpper> upper,
                                 const SearchBudget& budget, std::uint64_t cap) {
  if (k_max == 0) throw std::invalid_argument("capacity_bracket: k_max must be positive");
  if (g.size() == 0) throw std::invalid_argument("capacity_bracket: empty graph");
  // Fail on the cap before doing any search.
  std::uint64_t vertices = 1;
  for (unsigned k = 1; k <= k_max; ++k) {
    if (vertices > std::uint64_t{0xFFFFFFFF} / g.size()) throw SizeCapExceeded(vertices * g.size(), cap);
    vertices *= g.size();
    check_size_cap(vertices, cap);
  }

  CapacityBracket bracket;
  Graph current = g;
  current.clear_labels();
  for (unsigned k = 1; k <= k_max; ++k) {
    if (k > 1) current = strong_product(current, g, cap);
    BracketLevel level{k, current.size(), max_independent_set(current, budget)};
    if (level.alpha.exact) {
      const double value = root_of(level.alpha.size, k);
      if (value > bracket.lower) {
        bracket.lower = value;
        bracket.witness_k = k;
        bracket.witness_size = level.alpha.size;
      }
    }
    bracket.levels.push_back(std::move(level));
  }
  if (upper) {
    bracket.upper = upper->value;
    bracket.upper_source = upper->source;
    if (bracket.upper < bracket.lower) {
      throw std::logic_error("certified upper bound " + std::to_string(bracket.upper) +
                             " is below the lower bound " + std::to_string(bracket.lower));
    }
  }
  return bracket;
}

}  // namespace privcap
