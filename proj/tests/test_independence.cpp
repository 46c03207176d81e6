#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "privcap/independence.hpp"
#include "privcap/reference.hpp"

using namespace privcap;

namespace {

VertexSet set_of(std::size_t n, std::vector<Vertex> members) { return VertexSet(n, members); }

}  // namespace

TEST_CASE("is_independent examples") {
  const auto c5 = Graph::cycle(5);
  // C5 on 0..4: 1 and 3 are two apart
  CHECK(is_independent(c5, set_of(5, {1, 3})));
  CHECK_FALSE(is_independent(c5, set_of(5, {1, 2})));
  for (Vertex v = 0; v < 5; ++v) CHECK(is_independent(c5, set_of(5, {v})));
  CHECK(is_independent(c5, VertexSet(5)));
}

TEST_CASE("independence numbers of classic graphs") {
  const auto c5 = Graph::cycle(5);
  REQUIRE(oracle::brute_force_alpha(c5) == 2);
  const auto a = max_independent_set(c5);
  CHECK(a.exact);
  CHECK(a.size == 2);
  CHECK(is_independent(c5, a.witness));

  const auto sq = power(c5, 2);
  REQUIRE(oracle::brute_force_alpha(sq) == 5);  // 2^25 subsets
  const auto a2 = max_independent_set(sq);
  CHECK(a2.exact);
  CHECK(a2.size == 5);
  CHECK(a2.witness.count() == 5);
  CHECK(is_independent(sq, a2.witness));

  for (std::size_t n : {1u, 4u, 17u, 70u}) {
    CHECK(max_independent_set(Graph::complete(n)).size == 1);
    CHECK(max_independent_set(Graph::edgeless(n)).size == n);
  }
  CHECK(max_independent_set(Graph(0)).size == 0);
}

TEST_CASE("branch and bound agrees with exhaustive search") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng() % 18;
    const double density = 0.1 + 0.8 * static_cast<double>(rng() % 100) / 100.0;
    const auto g = oracle::random_graph(n, density, rng);
    const auto got = max_independent_set(g);
    REQUIRE(got.exact);
    REQUIRE(got.size == oracle::brute_force_alpha(g));
    REQUIRE(got.witness.count() == got.size);
    REQUIRE(is_independent(g, got.witness));
  }
}

TEST_CASE("exhausted budget gives an inexact but valid lower bound") {
  std::mt19937_64 rng(7);
  const auto g = oracle::random_graph(300, 0.5, rng);
  const auto got = max_independent_set(g, {.max_nodes = 50, .max_seconds = std::nullopt});
  CHECK_FALSE(got.exact);
  CHECK(got.size >= 1);
  CHECK(got.witness.count() == got.size);
  CHECK(is_independent(g, got.witness));
  CHECK_FALSE(got.stopped_by_time);

  const auto timed = max_independent_set(g, {.max_nodes = ~std::uint64_t{0}, .max_seconds = 0.0});
  CHECK_FALSE(timed.exact);
  CHECK(timed.stopped_by_time);
  CHECK(is_independent(g, timed.witness));
}

TEST_CASE("node-budgeted runs are reproducible") {
  std::mt19937_64 rng(8);
  const auto g = oracle::random_graph(200, 0.3, rng);
  const auto a = max_independent_set(g, {.max_nodes = 2000, .max_seconds = std::nullopt});
  const auto b = max_independent_set(g, {.max_nodes = 2000, .max_seconds = std::nullopt});
  CHECK(a.size == b.size);
  CHECK(a.witness == b.witness);
  CHECK(a.nodes == b.nodes);
}

TEST_CASE("alpha of a disjoint union is the sum of the parts") {
  const auto c5 = max_independent_set(Graph::cycle(5));
  const std::vector<AlphaResult> two{c5, c5};
  CHECK(alpha_of_union(two) == 4);
  const std::vector<AlphaResult> mixed{max_independent_set(Graph::complete(3)),
                                       max_independent_set(Graph::edgeless(4))};
  CHECK(alpha_of_union(mixed) == 5);
  const std::vector<AlphaResult> one{c5};
  CHECK(alpha_of_union(one) == 2);

  AlphaResult inexact = c5;
  inexact.exact = false;
  const std::vector<AlphaResult> bad{c5, inexact};
  CHECK_THROWS_AS(alpha_of_union(bad), std::invalid_argument);

  // and the solver on the union graph agrees
  const std::vector<Graph> parts{Graph::cycle(5), Graph::cycle(5)};
  CHECK(max_independent_set(disjoint_union(parts)).size == 4);
}

TEST_CASE("independence in powers without building them") {
  const auto c5 = Graph::cycle(5);
  // (0,0) vs (1,2): coordinate 0 adjacent, coordinate 1 not -> independent
  CHECK(is_independent_in_power(c5, 2, {{0, 0}, {1, 2}}));
  CHECK_FALSE(is_independent_in_power(c5, 2, {{0, 0}, {1, 1}}));
  CHECK(is_independent_in_power(c5, 3, {{4, 2, 0}}));
  CHECK_FALSE(is_independent_in_power(Graph::complete(2), 1, std::vector<std::vector<Vertex>>{{0}, {1}}));
  CHECK_THROWS_AS(is_independent_in_power(c5, 2, {{0, 0}, {1}}), std::invalid_argument);
  CHECK_THROWS_AS(is_independent_in_power(c5, 2, {{0, 9}}), std::invalid_argument);

  // The 5-element independent set of C5^2: (i, 2i mod 5)
  std::vector<std::vector<Vertex>> shannon;
  for (Vertex i = 0; i < 5; ++i) shannon.push_back({i, (2 * i) % 5});
  CHECK(is_independent_in_power(c5, 2, shannon));
  const auto sq = power(c5, 2);
  VertexSet flat(25);
  for (const auto& t : shannon) flat.insert(t[0] * 5 + t[1]);
  CHECK(is_independent(sq, flat));
}

TEST_CASE("power independence agrees with the materialized power and the serial reference") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 5;
    const auto g = oracle::random_graph(n, 0.4, rng);
    const unsigned k = 1 + static_cast<unsigned>(rng() % 3);
    const auto gk = power(g, k);
    TupleList tuples(k);
    VertexSet flat(gk.size());
    const std::size_t m = 1 + rng() % 6;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Vertex> t(k);
      std::size_t index = 0;
      for (auto& x : t) {
        x = static_cast<Vertex>(rng() % n);
        index = index * n + x;
      }
      if (flat.contains(static_cast<Vertex>(index))) continue;
      flat.insert(static_cast<Vertex>(index));
      tuples.push_back(t);
    }
    const auto fast = check_independent_in_power(g, k, tuples);
    const auto slow = reference::check_independent_in_power(g, k, tuples);
    REQUIRE(fast.independent == is_independent(gk, flat));
    REQUIRE(fast.independent == slow.independent);
    REQUIRE(fast.first_conflict == slow.first_conflict);
  }
}

TEST_CASE("capacity brackets") {
  const auto c5 = capacity_bracket(Graph::cycle(5), 2);
  CHECK(c5.lower == std::sqrt(5.0));
  CHECK(c5.witness_k == 2);
  CHECK(c5.witness_size == 5);
  CHECK(std::isinf(c5.upper));
  REQUIRE(c5.levels.size() == 2);
  CHECK(c5.levels[0].alpha.size == 2);

  const auto empty6 = capacity_bracket(Graph::edgeless(6), 1, CertifiedUpper{6.0, "vertex count"});
  CHECK(empty6.lower == 6.0);
  CHECK(empty6.upper == 6.0);

  CHECK(capacity_bracket(Graph::complete(4), 1).lower == 1.0);
  CHECK_THROWS_AS(capacity_bracket(Graph::cycle(5), 2, CertifiedUpper{2.0, "wrong"}), std::logic_error);
  CHECK_THROWS_AS(capacity_bracket(Graph::cycle(5), 3, std::nullopt, {}, 124 * 124), SizeCapExceeded);
}

TEST_CASE("alpha is supermultiplicative over strong powers") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const auto g = oracle::random_graph(1 + rng() % 6, 0.5, rng);
    std::vector<std::size_t> alpha(4, 0);
    for (unsigned k = 1; k <= 3; ++k) {
      const auto r = max_independent_set(power(g, k));
      REQUIRE(r.exact);
      alpha[k] = r.size;
    }
    CHECK(alpha[2] >= alpha[1] * alpha[1]);
    CHECK(alpha[3] >= alpha[1] * alpha[2]);
  }
}
