#include "privcap/privileged.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <omp.h>

#include "privcap/graph_io.hpp"

namespace privcap {

std::vector<unsigned> senders_of(SenderMask mask) {
  std::vector<unsigned> out;
  while (mask != 0) {
    out.push_back(static_cast<unsigned>(std::countr_zero(mask)) + 1);
    mask &= mask - 1;
  }
  return out;
}

SenderMask mask_of(const std::vector<unsigned>& senders, unsigned t) {
  SenderMask mask = 0;
  for (unsigned i : senders) {
    if (i < 1 || i > t) {
      throw std::invalid_argument("sender " + std::to_string(i) + " outside [1, " + std::to_string(t) + "]");
    }
    mask |= SenderMask{1} << (i - 1);
  }
  return mask;
}

SubsetFamily::SubsetFamily(unsigned t, std::vector<SenderMask> members) : t_(t), members_(std::move(members)) {
  if (t_ < kMinSenders || t_ > kMaxSenders) {
    throw std::invalid_argument("number of senders t=" + std::to_string(t_) + " outside [" +
                                std::to_string(kMinSenders) + ", " + std::to_string(kMaxSenders) + "]");
  }
  const SenderMask full = (SenderMask{1} << t_) - 1;
  for (SenderMask m : members_) {
    if (m == 0) throw std::invalid_argument("family contains the empty set");
    if ((m & ~full) != 0) throw std::invalid_argument("family member names a sender outside [1, t]");
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

SubsetFamily SubsetFamily::from_lists(unsigned t, const std::vector<std::vector<unsigned>>& lists) {
  std::vector<SenderMask> members;
  for (const auto& list : lists) {
    if (list.empty()) throw std::invalid_argument("family contains the empty set");
    members.push_back(mask_of(list, t));
  }
  return SubsetFamily(t, std::move(members));
}

SubsetFamily SubsetFamily::parse(unsigned t, std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("family is not valid JSON: ") + e.what());
  }
  if (!j.is_array()) throw std::invalid_argument("family must be a JSON array of arrays");
  std::vector<std::vector<unsigned>> lists;
  for (const auto& member : j) {
    if (!member.is_array()) throw std::invalid_argument("family member must be an array of sender ids");
    std::vector<unsigned> ids;
    for (const auto& id : member) {
      if (!id.is_number_integer() || id.get<long long>() < 1) {
        throw std::invalid_argument("sender ids must be positive integers");
      }
      ids.push_back(id.get<unsigned>());
    }
    lists.push_back(std::move(ids));
  }
  return from_lists(t, lists);
}

SubsetFamily SubsetFamily::threshold(unsigned t, unsigned k) {
  std::vector<SenderMask> members;
  for (SenderMask m = 1; m < (SenderMask{1} << t); ++m) {
    if (static_cast<unsigned>(std::popcount(m)) == k) members.push_back(m);
  }
  return SubsetFamily(t, std::move(members));
}

bool SubsetFamily::contains(SenderMask member) const {
  return std::binary_search(members_.begin(), members_.end(), member);
}

std::optional<SenderMask> SubsetFamily::smallest_member_within(SenderMask x) const {
  std::optional<SenderMask> best;
  for (SenderMask m : members_) {
    if ((m & ~x) != 0) continue;
    if (!best || std::popcount(m) < std::popcount(*best)) best = m;
  }
  return best;
}

nlohmann::json SubsetFamily::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (SenderMask m : members_) arr.push_back(senders_of(m));
  return arr;
}

std::string SubsetFamily::canonical_hash() const {
  const std::string text = "t=" + std::to_string(t_) + ";" + to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<SenderMask> maximal_free_sets(const SubsetFamily& family) {
  const unsigned t = family.t();
  const std::size_t count = std::size_t{1} << t;
  // blocked[x]: x contains some member (superset closure over all 2^t sets)
  std::vector<std::uint8_t> blocked(count, 0);
  for (SenderMask m : family.members()) blocked[m] = 1;
  for (unsigned bit = 0; bit < t; ++bit) {
    for (std::size_t x = 0; x < count; ++x) {
      if ((x >> bit) & 1) blocked[x] |= blocked[x ^ (std::size_t{1} << bit)];
    }
  }
  std::vector<SenderMask> out;
  for (std::size_t x = 0; x < count; ++x) {
    if (blocked[x]) continue;
    bool maximal = true;
    for (unsigned bit = 0; bit < t && maximal; ++bit) {
      if (!((x >> bit) & 1) && !blocked[x | (std::size_t{1} << bit)]) maximal = false;
    }
    if (maximal) out.push_back(static_cast<SenderMask>(x));
  }
  return out;
}

std::size_t AntichainAssignment::union_size() const {
  std::set<std::uint64_t> all;
  for (const auto& a : a_sets) all.insert(a.begin(), a.end());
  return all.size();
}

nlohmann::json AntichainAssignment::to_json() const {
  nlohmann::json ys = nlohmann::json::array();
  for (std::size_t j = 0; j < maximal_free_sets.size(); ++j) {
    ys.push_back({{"Y", senders_of(maximal_free_sets[j])}, {"prime", prime_of[j]}});
  }
  return {{"maximal_free_sets", std::move(ys)}, {"A_sets", a_sets}};
}

AntichainAssignment build_assignment(const SubsetFamily& family, const PrimeList& prime_pool) {
  AntichainAssignment out;
  out.t = family.t();
  out.maximal_free_sets = maximal_free_sets(family);
  if (prime_pool.size() < out.maximal_free_sets.size()) {
    throw std::invalid_argument("prime pool has " + std::to_string(prime_pool.size()) + " primes but " +
                                std::to_string(out.maximal_free_sets.size()) + " maximal free sets need one each");
  }
  out.prime_of.assign(prime_pool.begin(), prime_pool.begin() + static_cast<std::ptrdiff_t>(out.maximal_free_sets.size()));
  out.a_sets.assign(out.t, {});
  for (std::size_t j = 0; j < out.maximal_free_sets.size(); ++j) {
    for (unsigned i : senders_of(out.maximal_free_sets[j])) out.a_sets[i - 1].push_back(out.prime_of[j]);
  }
  for (auto& a : out.a_sets) std::sort(a.begin(), a.end());
  return out;
}

CoalitionStatus coalition_status(const AntichainAssignment& assignment, const SubsetFamily& family,
                                 SenderMask x) {
  if (x == 0) throw std::invalid_argument("coalition must be nonempty");
  if (assignment.t != family.t()) throw std::invalid_argument("assignment and family disagree on t");
  if ((x >> family.t()) != 0) throw std::invalid_argument("coalition names a sender outside [1, t]");
  CoalitionStatus status;
  const auto senders = senders_of(x);
  status.free_intersection = assignment.a_set(senders.front());
  for (std::size_t k = 1; k < senders.size(); ++k) {
    const auto& a = assignment.a_set(senders[k]);
    std::vector<std::uint64_t> next;
    std::set_intersection(status.free_intersection.begin(), status.free_intersection.end(), a.begin(), a.end(),
                          std::back_inserter(next));
    status.free_intersection = std::move(next);
  }
  status.contains_member = family.smallest_member_within(x).has_value();
  if (status.contains_member == !status.free_intersection.empty()) {
    throw std::logic_error("coalition " + nlohmann::json(senders).dump() +
                           " breaks the free-set dichotomy: intersection " +
                           (status.free_intersection.empty() ? "empty" : "nonempty") + " and " +
                           (status.contains_member ? "contains" : "avoids") + " every member");
  }
  return status;
}

nlohmann::json ParamReport::to_json() const {
  return {{"pass", pass},
          {"errors", errors},
          {"warnings", warnings},
          {"unrealizable_primes", unrealizable},
          {"canonical_shape", canonical_shape}};
}

std::pair<unsigned, unsigned> overlap_range(unsigned r, unsigned s) {
  const unsigned lo = 2 * s > r ? 2 * s - r : 0;
  return {lo, s == 0 ? 0 : s - 1};
}

ParamReport validate_params(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes) {
  ParamReport report;
  auto fail = [&](std::string msg) {
    report.pass = false;
    report.errors.push_back(std::move(msg));
  };
  if (s == 0) fail("s must be at least 1");
  if (s > r) fail("s=" + std::to_string(s) + " exceeds r=" + std::to_string(r));
  if (r > kMaxMaskGround) fail("r=" + std::to_string(r) + " exceeds the supported maximum of 64");
  if (primes.empty()) fail("no primes in use");
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto q = primes[i];
    if (!is_prime(q)) {
      fail(std::to_string(q) + " is not prime");
      continue;
    }
    if (s != 0 && s % q == 0) fail("prime " + std::to_string(q) + " divides s=" + std::to_string(s));
    for (std::size_t j = 0; j < i; ++j) {
      if (primes[j] == q) fail("prime " + std::to_string(q) + " repeated");
      else if (primes[j] <= s / q) {
        fail("product " + std::to_string(primes[j]) + "*" + std::to_string(q) + " does not exceed s=" +
             std::to_string(s));
      }
    }
  }
  if (report.pass) {
    const auto [lo, hi] = overlap_range(r, s);
    for (auto q : primes) {
      bool fires = false;
      for (unsigned v = lo; v <= hi && !fires; ++v) fires = (v % q) == (s % q);
      if (!fires) {
        report.unrealizable.push_back(q);
        report.warnings.push_back("edge rule for prime " + std::to_string(q) +
                                  " never fires: no overlap in [" + std::to_string(lo) + ", " +
                                  std::to_string(hi) + "] is congruent to s");
      }
    }
    for (std::uint64_t p = 2; p * p <= s; ++p) {
      if (is_prime(p) && p * p == s && p * p * p == r &&
          std::all_of(primes.begin(), primes.end(), [p](auto q) { return q > p; })) {
        report.canonical_shape = true;
      }
    }
  }
  return report;
}

Graph build_graph(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes, std::uint32_t channel,
                  std::uint64_t cap) {
  if (s > r || r > kMaxMaskGround) throw std::invalid_argument("build_graph: need s <= r <= 64");
  const std::uint64_t n = binomial_u64(r, s);
  check_size_cap(n, cap);
  const auto masks = all_subset_masks(r, s);
  Graph g(n, cap);

  std::vector<std::uint8_t> joins(s + 1, 0);
  for (unsigned w = 0; w < s; ++w) {
    for (auto q : primes) joins[w] |= static_cast<std::uint8_t>((w % q) == (s % q));
  }

  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t uu = 0; uu < rows; ++uu) {
    const auto u = static_cast<std::size_t>(uu);
    auto dst = g.mutable_row(static_cast<Vertex>(u));
    const std::uint64_t mu = masks[u];
    for (std::size_t v = 0; v < n; ++v) {
      if (v != u && joins[std::popcount(mu & masks[v])]) dst[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
  }

  std::vector<VertexLabel> labels;
  labels.reserve(n);
  for (auto m : masks) labels.push_back({channel, KSubset::from_mask(r, m)});
  g.set_labels(std::move(labels));
  return g;
}

namespace {

std::string describe(const ParamReport& report) {
  std::string msg = "parameter validation failed";
  for (const auto& e : report.errors) msg += "; " + e;
  return msg;
}

}  // namespace

ValidationError::ValidationError(ParamReport report)
    : std::invalid_argument(describe(report)), report_(std::move(report)) {}

PrivilegedSystem PrivilegedSystem::construct(SubsetFamily family, SystemParams params, std::uint64_t cap) {
  PrivilegedSystem sys;
  sys.family_ = std::move(family);
  sys.params_ = std::move(params);
  sys.cap_ = cap;
  const auto free_sets = maximal_free_sets(sys.family_);

  if (!sys.params_.prime_pool.empty()) {
    auto sorted = sys.params_.prime_pool;
    std::sort(sorted.begin(), sorted.end());
    // Validate first so that composites and repeats show up in the report.
    auto pre = validate_params(sys.params_.r, sys.params_.s, sorted);
    if (!pre.pass) throw ValidationError(std::move(pre));
    sys.pool_ = PrimeList(std::move(sorted));
  } else if (sys.params_.base_prime) {
    sys.pool_ = next_primes(*sys.params_.base_prime, std::max<std::size_t>(free_sets.size(), 1));
  } else {
    throw std::invalid_argument("either a prime pool or a base prime is required");
  }

  sys.assignment_ = build_assignment(sys.family_, sys.pool_);
  std::vector<std::uint64_t> used = sys.assignment_.prime_of;
  if (used.empty()) used.push_back(sys.pool_[0]);
  sys.validation_ = validate_params(sys.params_.r, sys.params_.s, used);
  if (!sys.validation_.pass) throw ValidationError(sys.validation_);

  sys.n_ = binomial_u64(sys.params_.r, sys.params_.s);
  check_size_cap(sys.n_, cap);
  sys.graphs_.reserve(sys.family_.t());
  for (unsigned i = 1; i <= sys.family_.t(); ++i) {
    sys.graphs_.push_back(build_graph(sys.params_.r, sys.params_.s, sys.assignment_.a_set(i), i, cap));
  }
  return sys;
}

Graph union_graph(const PrivilegedSystem& system, SenderMask x) {
  if (x == 0) throw std::invalid_argument("coalition must be nonempty");
  if ((x >> system.t()) != 0) throw std::invalid_argument("coalition names a sender outside [1, t]");
  std::vector<Graph> parts;
  for (unsigned i : senders_of(x)) parts.push_back(system.graph(i));
  return disjoint_union(parts, system.cap());
}

TupleList diagonal_tuples(const PrivilegedSystem& system, SenderMask member, SenderMask x) {
  if (!system.family().contains(member)) throw std::invalid_argument("diagonal_tuples: not a family member");
  if ((member & ~x) != 0) throw std::invalid_argument("diagonal_tuples: member not contained in coalition");
  const auto coalition = senders_of(x);
  std::vector<std::uint64_t> offsets;
  for (unsigned i : senders_of(member)) {
    const auto pos = std::find(coalition.begin(), coalition.end(), i) - coalition.begin();
    offsets.push_back(static_cast<std::uint64_t>(pos) * system.n());
  }
  TupleList tuples(static_cast<unsigned>(offsets.size()));
  tuples.reserve(system.n());
  std::vector<Vertex> tuple(offsets.size());
  for (std::uint64_t a = 0; a < system.n(); ++a) {
    for (std::size_t j = 0; j < offsets.size(); ++j) tuple[j] = static_cast<Vertex>(offsets[j] + a);
    tuples.push_back(tuple);
  }
  return tuples;
}

nlohmann::json BoundReport::to_json() const {
  nlohmann::json j = {{"coalition", senders_of(coalition)},
                      {"verdict", verdict == Verdict::privileged ? "privileged" : "restricted"},
                      {"lower", lower},
                      {"lower_witness", lower_witness},
                      {"free_intersection", free_intersection}};
  if (member) j["member"] = senders_of(*member);
  if (verdict == Verdict::privileged) {
    j["witness_tuples"] = witness_tuples;
    if (witness_check) {
      j["witness_check"] = {{"independent", witness_check->independent},
                            {"pairs_checked", witness_check->pairs_checked}};
      if (witness_check->first_conflict) {
        j["witness_check"]["first_conflict"] = {witness_check->first_conflict->first,
                                                witness_check->first_conflict->second};
      }
    }
  }
  if (common_prime) j["common_prime"] = *common_prime;
  if (upper) j["upper"] = upper->to_json();
  if (certificate) j["certificate"] = certificate->to_json();
  return j;
}

BoundReport bound_report(const PrivilegedSystem& system, SenderMask x, const BoundOptions& options) {
  const auto status = coalition_status(system.assignment(), system.family(), x);
  BoundReport report;
  report.coalition = x;
  report.free_intersection = status.free_intersection;

  if (status.contains_member) {
    const SenderMask member = *system.family().smallest_member_within(x);
    const auto k = static_cast<unsigned>(std::popcount(member));
    report.verdict = BoundReport::Verdict::privileged;
    report.member = member;
    report.lower = root_of(system.n(), k);
    report.witness_tuples = system.n();
    report.lower_witness = "diagonal set of " + std::to_string(system.n()) + " tuples independent in the " +
                           std::to_string(k) + "-th power of the union";
    if (options.verify_witness) {
      // The tuples only touch the member's channels, and the union over the
      // member is an induced subgraph of the union over x, so checking there
      // is equivalent and keeps the adjacency matrix small.
      const Graph g = union_graph(system, member);
      report.witness_check = check_independent_in_power(g, k, diagonal_tuples(system, member, member));
      if (!report.witness_check->independent) {
        throw std::logic_error("diagonal witness is not independent; construction is broken");
      }
    }
    return report;
  }

  report.verdict = BoundReport::Verdict::restricted;
  const auto copies = static_cast<std::uint64_t>(std::popcount(x));
  report.common_prime = status.free_intersection.front();
  report.upper = dimension_bound(copies, *report.common_prime, system.params().r);
  report.lower = static_cast<double>(copies);
  report.lower_witness = "one vertex from each of the " + std::to_string(copies) + " channels";
  if (options.verify_certificate) {
    const Graph g = union_graph(system, x);
    const auto cert = RepresentationCertificate::from_labeled_graph(g, *report.common_prime, system.params().r,
                                                                    system.params().s);
    report.certificate = verify_certificate(g, cert);
    if (!report.certificate->valid) {
      throw std::logic_error("representation certificate failed; construction is broken");
    }
  }
  if (report.upper->as_double() < report.lower) throw std::logic_error("upper bound below lower bound");
  return report;
}

nlohmann::json system_manifest(const PrivilegedSystem& system, const std::vector<std::string>& graph_files) {
  nlohmann::json j = {{"format_version", kManifestFormatVersion},
                      {"t", system.t()},
                      {"family", system.family().to_json()},
                      {"family_hash", system.family().canonical_hash()},
                      {"r", system.params().r},
                      {"s", system.params().s},
                      {"n", system.n()},
                      {"prime_pool", system.prime_pool().values()},
                      {"assignment", system.assignment().to_json()},
                      {"A_sets", system.assignment().a_sets},
                      {"validation", system.validation().to_json()},
                      {"graph_files", graph_files}};
  j["base_prime"] = system.params().base_prime ? nlohmann::json(*system.params().base_prime) : nlohmann::json(nullptr);
  return j;
}

void write_system(const PrivilegedSystem& system, const std::filesystem::path& dir, bool write_graphs) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  if (write_graphs) {
    for (unsigned i = 1; i <= system.t(); ++i) {
      const std::string name = "G_" + std::to_string(i) + ".dimacs";
      save_graph(dir / name, system.graph(i));
      files.push_back(name);
    }
  }
  std::ofstream os(dir / "system.json");
  if (!os) throw std::runtime_error("cannot write " + (dir / "system.json").string());
  os << system_manifest(system, files).dump(2) << '\n';
}

PrivilegedSystem load_system(const std::filesystem::path& dir, std::uint64_t cap) {
  const auto path = dir / "system.json";
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (j.value("format_version", 0) != kManifestFormatVersion) throw FormatError("unsupported manifest format_version");
  try {
    const auto t = j.at("t").get<unsigned>();
    auto family = SubsetFamily::parse(t, j.at("family").dump());
    SystemParams params;
    params.r = j.at("r").get<unsigned>();
    params.s = j.at("s").get<unsigned>();
    params.prime_pool = j.at("prime_pool").get<std::vector<std::uint64_t>>();
    if (j.contains("base_prime") && !j["base_prime"].is_null()) params.base_prime = j["base_prime"].get<std::uint64_t>();
    auto sys = PrivilegedSystem::construct(std::move(family), std::move(params), cap);
    if (sys.assignment().to_json() != j.at("assignment") || nlohmann::json(sys.assignment().a_sets) != j.at("A_sets") ||
        sys.family().canonical_hash() != j.at("family_hash") || sys.n() != j.at("n").get<std::uint64_t>()) {
      throw FormatError("manifest assignment does not match the rebuilt system");
    }
    return sys;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace privcap
