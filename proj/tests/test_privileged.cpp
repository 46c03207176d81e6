#include <doctest.h>

#include <bit>
#include <cmath>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "privcap/graph_io.hpp"
#include "privcap/privileged.hpp"
#include "privcap/reference.hpp"

using namespace privcap;

namespace {

using Lists = std::vector<std::vector<unsigned>>;

// Maximal free sets by brute force: every subset of [t], filtered twice.
std::vector<SenderMask> oracle_maximal_free(const SubsetFamily& f) {
  const SenderMask full = (SenderMask{1} << f.t()) - 1;
  auto is_free = [&](SenderMask y) {
    for (SenderMask m : f.members())
      if ((m & ~y) == 0) return false;
    return true;
  };
  std::vector<SenderMask> out;
  for (SenderMask y = 0; y <= full; ++y) {
    if (!is_free(y)) continue;
    bool maximal = true;
    for (unsigned i = 0; i < f.t(); ++i) {
      const SenderMask bigger = y | (SenderMask{1} << i);
      if (bigger != y && is_free(bigger)) maximal = false;
    }
    if (maximal) out.push_back(y);
  }
  return out;
}

SubsetFamily random_family(unsigned t, std::mt19937_64& rng) {
  const SenderMask full = (SenderMask{1} << t) - 1;
  std::vector<SenderMask> members;
  const std::size_t count = rng() % (t + 2);
  for (std::size_t i = 0; i < count; ++i) members.push_back(static_cast<SenderMask>(1 + rng() % full));
  return SubsetFamily(t, members);
}

PrivilegedSystem small_system(const Lists& family, unsigned t, std::vector<std::uint64_t> pool = {3, 5, 7}) {
  return PrivilegedSystem::construct(SubsetFamily::from_lists(t, family), SystemParams{8, 4, std::move(pool), std::nullopt});
}

}  // namespace

TEST_CASE("subset families") {
  CHECK_THROWS_WITH_AS(SubsetFamily::from_lists(3, {{1}, {}}), "family contains the empty set", std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily::parse(3, "[[]]"), std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily::parse(3, "[[1, 4]]"), std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily::parse(3, "[[0]]"), std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily::parse(3, "{"), std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily(1, {}), std::invalid_argument);
  CHECK_THROWS_AS(SubsetFamily(21, {}), std::invalid_argument);

  const auto a = SubsetFamily::parse(3, "[[2,1],[3],[1,2]]");
  CHECK(a.members() == std::vector<SenderMask>{0b011, 0b100});
  CHECK(a == SubsetFamily::from_lists(3, {{3}, {1, 2}}));
  CHECK(a.canonical_hash() == SubsetFamily::from_lists(3, {{3}, {1, 2}}).canonical_hash());
  CHECK(a.canonical_hash() != SubsetFamily::from_lists(4, {{3}, {1, 2}}).canonical_hash());
  CHECK(a.canonical_hash().size() == 16);
  CHECK(SubsetFamily::threshold(3, 2).members() == std::vector<SenderMask>{0b011, 0b101, 0b110});
  CHECK(a.smallest_member_within(0b111) == SenderMask{0b100});
  CHECK(a.smallest_member_within(0b011) == SenderMask{0b011});
  CHECK_FALSE(a.smallest_member_within(0b001).has_value());
}

TEST_CASE("maximal free sets examples") {
  CHECK(maximal_free_sets(SubsetFamily::from_lists(3, {{1, 2}, {3}})) == std::vector<SenderMask>{0b001, 0b010});
  CHECK(maximal_free_sets(SubsetFamily::threshold(3, 2)) == std::vector<SenderMask>{0b001, 0b010, 0b100});
  CHECK(maximal_free_sets(SubsetFamily(3, {})) == std::vector<SenderMask>{0b111});
  CHECK(maximal_free_sets(SubsetFamily::threshold(3, 1)) == std::vector<SenderMask>{0});
}

TEST_CASE("maximal free sets agree with brute force") {
  std::mt19937_64 rng(5);
  for (unsigned t = 2; t <= 7; ++t) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto f = random_family(t, rng);
      REQUIRE(maximal_free_sets(f) == oracle_maximal_free(f));
    }
  }
}

TEST_CASE("assignment examples") {
  const auto f = SubsetFamily::from_lists(3, {{1, 2}, {3}});
  const auto a = build_assignment(f, PrimeList({3, 5}));
  CHECK(a.prime_of == std::vector<std::uint64_t>{3, 5});
  CHECK(a.a_set(1) == std::vector<std::uint64_t>{3});
  CHECK(a.a_set(2) == std::vector<std::uint64_t>{5});
  CHECK(a.a_set(3).empty());
  CHECK(a.union_size() == 2);

  const auto b = build_assignment(SubsetFamily(2, {}), PrimeList({3}));
  CHECK(b.a_set(1) == std::vector<std::uint64_t>{3});
  CHECK(b.a_set(2) == std::vector<std::uint64_t>{3});

  CHECK_THROWS_AS(build_assignment(SubsetFamily::threshold(3, 2), PrimeList({3, 5})), std::invalid_argument);

  // the last two Ys each have one sender missing; first prime goes to {1,2}
  const auto c = build_assignment(SubsetFamily::from_lists(3, {{1, 2, 3}}), PrimeList({3, 5, 7}));
  CHECK(c.a_set(1) == std::vector<std::uint64_t>{3, 5});
  CHECK(c.a_set(2) == std::vector<std::uint64_t>{3, 7});
  CHECK(c.a_set(3) == std::vector<std::uint64_t>{5, 7});
}

TEST_CASE("Sperner bound on the number of primes") {
  std::mt19937_64 rng(17);
  const auto pool = next_primes(2, 20);
  for (unsigned t = 2; t <= 6; ++t) {
    for (int trial = 0; trial < 50; ++trial) {
      const auto f = random_family(t, rng);
      const auto a = build_assignment(f, pool);
      REQUIRE(a.union_size() <= oracle::pascal(t, t / 2));
    }
  }
}

TEST_CASE("coalition status examples") {
  const auto f = SubsetFamily::from_lists(3, {{1, 2}, {3}});
  const auto a = build_assignment(f, PrimeList({3, 5}));
  const auto x1 = coalition_status(a, f, 0b001);
  CHECK(x1.free_intersection == std::vector<std::uint64_t>{3});
  CHECK_FALSE(x1.contains_member);
  const auto x12 = coalition_status(a, f, 0b011);
  CHECK(x12.free_intersection.empty());
  CHECK(x12.contains_member);
  const auto x3 = coalition_status(a, f, 0b100);
  CHECK(x3.free_intersection.empty());
  CHECK(x3.contains_member);
  CHECK_THROWS_AS(coalition_status(a, f, 0), std::invalid_argument);
  CHECK_THROWS_AS(coalition_status(a, f, 0b1000), std::invalid_argument);

  // a hand-broken assignment trips the dichotomy check
  auto broken = a;
  broken.a_sets[2] = {5};
  broken.a_sets[1] = {5};
  CHECK_THROWS_AS(coalition_status(broken, f, 0b110), std::logic_error);
}

TEST_CASE("exactly one of free intersection and containing a member") {
  std::mt19937_64 rng(23);
  const auto pool = next_primes(2, 20);
  for (unsigned t = 2; t <= 6; ++t) {
    std::vector<SubsetFamily> families{SubsetFamily(t, {}), SubsetFamily::threshold(t, 1)};
    for (int trial = 0; trial < 40; ++trial) families.push_back(random_family(t, rng));
    for (const auto& f : families) {
      const auto a = build_assignment(f, pool);
      for (SenderMask x = 1; x < (SenderMask{1} << t); ++x) {
        const auto st = coalition_status(a, f, x);
        bool contains = false;
        for (SenderMask m : f.members()) contains = contains || (m & ~x) == 0;
        REQUIRE(st.contains_member == contains);
        REQUIRE(st.free_intersection.empty() == contains);
      }
    }
  }
}

TEST_CASE("parameter validation examples") {
  const auto ok = validate_params(16, 8, {3, 5, 7});
  CHECK(ok.pass);
  CHECK(ok.warnings.empty());

  const auto warn = validate_params(8, 4, {3, 5});
  CHECK(warn.pass);
  CHECK(warn.unrealizable == std::vector<std::uint64_t>{5});
  CHECK(warn.warnings.size() == 1);
  CHECK(warn.canonical_shape);

  CHECK_FALSE(validate_params(16, 8, {3, 4}).pass);
  CHECK_FALSE(validate_params(16, 8, {3, 3}).pass);
  CHECK_FALSE(validate_params(16, 8, {2, 5}).pass);   // 2 divides 8
  CHECK_FALSE(validate_params(40, 20, {3, 5}).pass);  // 3 * 5 <= 20
  CHECK_FALSE(validate_params(8, 9, {5}).pass);
  CHECK_FALSE(validate_params(65, 8, {3}).pass);
  CHECK_FALSE(validate_params(8, 0, {3}).pass);
  CHECK_FALSE(validate_params(16, 8, {3, 5, 7}).canonical_shape);
  CHECK(overlap_range(16, 8) == std::pair<unsigned, unsigned>{0, 7});
  CHECK(overlap_range(8, 6) == std::pair<unsigned, unsigned>{4, 5});
}

TEST_CASE("channel graph edge rule") {
  const auto g = build_graph(16, 8, {3}, 2);
  REQUIRE(g.size() == 12870);
  const KSubset a(16, {1, 2, 3, 4, 5, 6, 7, 8});
  const KSubset five(16, {1, 2, 3, 4, 5, 9, 10, 11});
  const KSubset six(16, {1, 2, 3, 4, 5, 6, 9, 10});
  auto id = [](const KSubset& x) { return static_cast<Vertex>(subset_rank(x)); };
  CHECK(g.adjacent(id(a), id(five)));
  CHECK_FALSE(g.adjacent(id(a), id(six)));
  CHECK(g.labels()[id(five)].channel == 2);
  CHECK(g.labels()[id(five)].subset == five);
  // overlaps 2 and 5 are the ones = 8 mod 3: 784 + 3136 neighbours
  for (Vertex v : {Vertex{0}, Vertex{777}, Vertex{12869}}) CHECK(g.degree(v) == 3920);

  CHECK(build_graph(8, 4, {}, 1).edge_count() == 0);
  CHECK_THROWS_AS(build_graph(8, 9, {3}, 1), std::invalid_argument);
  CHECK_THROWS_AS(build_graph(16, 8, {3}, 1, 1000), SizeCapExceeded);
}

TEST_CASE("channel graphs agree with the serial reference") {
  const std::vector<std::tuple<unsigned, unsigned, std::vector<std::uint64_t>>> cases{
      {8, 4, {3}}, {8, 4, {3, 5}}, {9, 4, {5, 7}}, {10, 5, {3}}, {10, 3, {2, 5}}, {7, 1, {2}}};
  for (const auto& [r, s, primes] : cases) {
    const auto fast = build_graph(r, s, primes, 1);
    fast.validate();
    REQUIRE(fast == reference::build_graph(r, s, primes, 1));
  }
}

TEST_CASE("diagonal tuples") {
  const auto sys = small_system({{1, 2}, {1, 3}, {2, 3}}, 3);
  CHECK(sys.n() == 70);
  const auto tuples = diagonal_tuples(sys, 0b011, 0b111);
  CHECK(tuples.size() == 70);
  CHECK(tuples.arity() == 2);
  // tuple j is (vertex j of block 1, vertex j of block 2)
  CHECK(tuples[5][0] == 5);
  CHECK(tuples[5][1] == 75);
  CHECK(is_independent_in_power(union_graph(sys, 0b111), 2, tuples));
  const auto t13 = diagonal_tuples(sys, 0b101, 0b111);
  CHECK(t13[5][1] == 145);
  CHECK(is_independent_in_power(union_graph(sys, 0b111), 2, t13));
  CHECK_THROWS_AS(diagonal_tuples(sys, 0b011, 0b001), std::invalid_argument);
  CHECK_THROWS_AS(diagonal_tuples(sys, 0b001, 0b111), std::invalid_argument);
}

TEST_CASE("a singleton member forces an edgeless channel") {
  const auto sys = small_system({{1}, {2, 3}}, 3);
  CHECK(sys.assignment().a_set(1).empty());
  CHECK(sys.graph(1).edge_count() == 0);
  const auto tuples = diagonal_tuples(sys, 0b001, 0b001);
  CHECK(tuples.arity() == 1);
  CHECK(is_independent_in_power(sys.graph(1), 1, tuples));
  const auto rep = bound_report(sys, 0b001);
  CHECK(rep.verdict == BoundReport::Verdict::privileged);
  CHECK(rep.lower == 70.0);
}

TEST_CASE("bound reports on a small system") {
  const auto sys = small_system({{1, 2, 3}}, 3);
  const auto x12 = bound_report(sys, 0b011);
  CHECK(x12.verdict == BoundReport::Verdict::restricted);
  CHECK(x12.common_prime == std::optional<std::uint64_t>{3});
  REQUIRE(x12.upper.has_value());
  CHECK(x12.upper->value == 74);
  REQUIRE(x12.certificate.has_value());
  CHECK(x12.certificate->valid);
  CHECK(x12.lower == 2.0);

  const auto all = bound_report(sys, 0b111);
  CHECK(all.verdict == BoundReport::Verdict::privileged);
  CHECK(all.member == std::optional<SenderMask>{0b111});
  CHECK(all.lower == doctest::Approx(std::cbrt(70.0)).epsilon(1e-12));
  REQUIRE(all.witness_check.has_value());
  CHECK(all.witness_check->independent);
  CHECK(all.to_json()["verdict"] == "privileged");
  CHECK_THROWS_AS(bound_report(sys, 0), std::invalid_argument);
}

TEST_CASE("bound report numbers for r = 16, s = 8") {
  const BoundOptions skip{false, false};
  const auto pair_family = PrivilegedSystem::construct(SubsetFamily::threshold(3, 2), SystemParams{16, 8, {3, 5, 7}, std::nullopt});
  const auto priv = bound_report(pair_family, 0b011, skip);
  CHECK(priv.verdict == BoundReport::Verdict::privileged);
  CHECK(priv.lower == doctest::Approx(113.446).epsilon(1e-5));
  CHECK(priv.lower == std::sqrt(12870.0));
  const auto first = bound_report(pair_family, 0b001, skip);
  CHECK(first.common_prime == std::optional<std::uint64_t>{3});
  CHECK(first.upper->value == 137);
  // the per-copy bound follows the channel's own prime
  const auto third = bound_report(pair_family, 0b100, skip);
  CHECK(third.common_prime == std::optional<std::uint64_t>{7});
  std::uint64_t below_seven = 0;
  for (unsigned i = 0; i < 7; ++i) below_seven += oracle::pascal(16, i);
  CHECK(third.upper->value == below_seven);

  const auto top = PrivilegedSystem::construct(SubsetFamily::from_lists(3, {{1, 2, 3}}), SystemParams{16, 8, {3, 5, 7}, std::nullopt});
  const auto restricted = bound_report(top, 0b011, skip);
  CHECK(restricted.upper->value == 274);
}

TEST_CASE("construction rejects bad parameters") {
  const auto f = SubsetFamily::threshold(3, 2);
  CHECK_THROWS_AS(PrivilegedSystem::construct(f, SystemParams{8, 9, {3, 5, 7}, std::nullopt}), ValidationError);
  CHECK_THROWS_AS(PrivilegedSystem::construct(f, SystemParams{40, 20, {3, 5, 7}, std::nullopt}), ValidationError);
  CHECK_THROWS_AS(PrivilegedSystem::construct(f, SystemParams{8, 4, {3, 5}, std::nullopt}), std::invalid_argument);
  CHECK_THROWS_AS(PrivilegedSystem::construct(f, SystemParams{8, 4, {3, 4, 5}, std::nullopt}), std::invalid_argument);
  try {
    PrivilegedSystem::construct(f, SystemParams{8, 4, {2, 3, 5}, std::nullopt});
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK_FALSE(e.report().pass);
  }
  const auto from_base = PrivilegedSystem::construct(f, SystemParams{8, 4, {}, 2});
  CHECK(from_base.prime_pool().values() == std::vector<std::uint64_t>{3, 5, 7});
}

TEST_CASE("system manifest round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "privcap_manifest_test";
  std::filesystem::remove_all(dir);
  const auto sys = small_system({{1, 2}, {3}}, 3, {5, 7, 11});
  write_system(sys, dir);
  REQUIRE(std::filesystem::exists(dir / "G_1.dimacs"));
  const auto back = load_system(dir);
  CHECK(back.family() == sys.family());
  CHECK(back.assignment().a_sets == sys.assignment().a_sets);
  for (unsigned i = 1; i <= 3; ++i) CHECK(back.graph(i) == sys.graph(i));
  CHECK(load_graph(dir / "G_2.dimacs") == sys.graph(2));

  // tampering with the recorded assignment is caught
  std::ifstream is(dir / "system.json");
  auto j = nlohmann::json::parse(is);
  is.close();
  j["A_sets"][0] = {13};
  std::ofstream(dir / "system.json") << j.dump();
  CHECK_THROWS_AS(load_system(dir), FormatError);
  std::filesystem::remove_all(dir);
}
