#include "privcap/ramsey.hpp"

#include <algorithm>
#include <bitset>
#include <fstream>
#include <random>
#include <stdexcept>

#include <omp.h>

#include "privcap/graph_io.hpp"

namespace privcap {

EdgeColoring::EdgeColoring(unsigned r, unsigned s, std::vector<std::uint64_t> primes, std::string fallback_rule,
                           std::vector<Color> colors)
    : r_(r), s_(s), primes_(std::move(primes)), fallback_rule_(std::move(fallback_rule)),
      colors_(std::move(colors)) {
  n_ = binomial_u64(r_, s_);
  if (colors_.size() != pair_count(n_)) {
    throw std::invalid_argument("colour array holds " + std::to_string(colors_.size()) + " pairs, expected " +
                                std::to_string(pair_count(n_)));
  }
  masks_ = all_subset_masks(r_, s_);
}

void EdgeColoring::set_color(Vertex u, Vertex v, Color c) {
  if (u == v || u >= n_ || v >= n_) throw std::out_of_range("set_color: bad pair");
  colors_[u < v ? pair_index(n_, u, v) : pair_index(n_, v, u)] = c;
}

nlohmann::json EdgeColoring::header_json() const {
  return {{"format_version", kColoringFormatVersion},
          {"n", n_},
          {"t", t()},
          {"r", r_},
          {"s", s_},
          {"primes", primes_},
          {"fallback_rule", fallback_rule_}};
}

Color rule_color(unsigned overlap, unsigned s, const std::vector<std::uint64_t>& primes) {
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (overlap % primes[i] == s % primes[i]) return static_cast<Color>(i + 1);
  }
  return 0;
}

EdgeColoring build_coloring(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes,
                            const std::string& fallback_rule, std::uint64_t cap) {
  if (fallback_rule != kFallbackRankSum) throw std::invalid_argument("unknown fallback rule '" + fallback_rule + "'");
  if (primes.size() > kMaxColors) throw std::invalid_argument("at most 255 colours are supported");
  auto report = validate_params(r, s, primes);
  if (!report.pass) throw ValidationError(std::move(report));

  const std::uint64_t n = binomial_u64(r, s);
  const std::uint64_t pairs = pair_count(n);
  if (pairs > cap) {
    throw SizeCapExceeded(n, cap);
  }
  const auto masks = all_subset_masks(r, s);
  const auto t = static_cast<unsigned>(primes.size());

  std::vector<Color> by_overlap(s + 1, 0);
  for (unsigned w = 0; w < s; ++w) by_overlap[w] = rule_color(w, s, primes);

  std::vector<Color> colors(pairs);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t uu = 0; uu < rows; ++uu) {
    const auto u = static_cast<std::uint64_t>(uu);
    Color* out = colors.data() + (u + 1 < n ? pair_index(n, u, u + 1) : 0);
    for (std::uint64_t v = u + 1; v < n; ++v) {
      const Color c = by_overlap[std::popcount(masks[u] & masks[v])];
      *out++ = c != 0 ? c : fallback_color(u, v, t);
    }
  }
  return EdgeColoring(r, s, primes, fallback_rule, std::move(colors));
}

nlohmann::json WellDefinedReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : conflicts) list.push_back({{"overlap", c.overlap}, {"primes", {c.p_first, c.p_second}}});
  return {{"well_defined", well_defined}, {"conflicts", std::move(list)}, {"rule_overlaps", residues}};
}

WellDefinedReport check_well_defined(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes) {
  WellDefinedReport report;
  report.residues.assign(primes.size(), {});
  if (s == 0) return report;
  const auto [lo, hi] = overlap_range(r, s);
  for (unsigned v = lo; v <= hi; ++v) {
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < primes.size(); ++i) {
      if (v % primes[i] != s % primes[i]) continue;
      report.residues[i].push_back(v);
      if (!first) {
        first = i;
      } else {
        report.well_defined = false;
        report.conflicts.push_back({v, primes[*first], primes[i]});
      }
    }
  }
  return report;
}

WellDefinedReport check_well_defined(const EdgeColoring& coloring) {
  return check_well_defined(coloring.r(), coloring.s(), coloring.primes());
}

nlohmann::json ConsistencyReport::to_json() const {
  nlohmann::json j = {{"consistent", consistent}, {"mismatches", mismatches}};
  if (first_mismatch) j["first_mismatch"] = {first_mismatch->first, first_mismatch->second};
  return j;
}

ConsistencyReport check_rule_consistency(const EdgeColoring& coloring) {
  const std::uint64_t n = coloring.n();
  const unsigned t = coloring.t();
  const bool known_fallback = coloring.fallback_rule() == kFallbackRankSum;
  std::vector<Color> by_overlap(coloring.s() + 1, 0);
  for (unsigned w = 0; w < coloring.s(); ++w) by_overlap[w] = rule_color(w, coloring.s(), coloring.primes());

  std::vector<std::uint64_t> row_mismatch(n, 0);
  std::vector<std::uint64_t> row_first(n, 0);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t uu = 0; uu < rows; ++uu) {
    const auto u = static_cast<Vertex>(uu);
    for (Vertex v = u + 1; v < n; ++v) {
      const Color c = coloring.color(u, v);
      const Color rule = by_overlap[std::popcount(coloring.subset_mask(u) & coloring.subset_mask(v))];
      bool bad = c == 0 || c > t;
      if (rule != 0) bad = bad || c != rule;
      else if (known_fallback) bad = bad || c != fallback_color(u, v, t);
      if (bad) {
        if (row_mismatch[u] == 0) row_first[u] = v;
        ++row_mismatch[u];
      }
    }
  }
  ConsistencyReport report;
  for (Vertex u = 0; u < n; ++u) {
    if (row_mismatch[u] == 0) continue;
    if (!report.first_mismatch) report.first_mismatch = std::pair{u, static_cast<Vertex>(row_first[u])};
    report.mismatches += row_mismatch[u];
  }
  report.consistent = report.mismatches == 0;
  return report;
}

Graph color_class(const EdgeColoring& coloring, unsigned i, std::uint64_t cap) {
  if (i < 1 || i > coloring.t()) throw std::out_of_range("colour " + std::to_string(i) + " outside [1, t]");
  const std::uint64_t n = coloring.n();
  Graph g(n, cap);
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t uu = 0; uu < rows; ++uu) {
    const auto u = static_cast<Vertex>(uu);
    auto dst = g.mutable_row(u);
    for (Vertex v = 0; v < n; ++v) {
      if (v != u && coloring.color(u, v) == i) dst[v >> 6] |= std::uint64_t{1} << (v & 63);
    }
  }
  std::vector<VertexLabel> labels;
  labels.reserve(n);
  for (Vertex v = 0; v < n; ++v) labels.push_back({i, KSubset::from_mask(coloring.r(), coloring.subset_mask(v))});
  g.set_labels(std::move(labels));
  return g;
}

nlohmann::json RainbowThreshold::to_json() const {
  return {{"color", color},
          {"prime", prime},
          {"realizable", realizable},
          {"threshold", big_to_json(value)},
          {"relaxed_threshold", big_to_json(relaxation)}};
}

RainbowThreshold rainbow_threshold(const EdgeColoring& coloring, unsigned i) {
  if (i < 1 || i > coloring.t()) throw std::out_of_range("colour " + std::to_string(i) + " outside [1, t]");
  RainbowThreshold out;
  out.color = i;
  out.prime = coloring.primes()[i - 1];
  const auto wd = check_well_defined(coloring);
  out.realizable = !wd.residues[i - 1].empty();
  out.value = dimension_bound(1, out.prime, coloring.r()).value + 1;
  out.relaxation = binomial(coloring.r(), out.prime);
  return out;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

nlohmann::json RainbowReport::to_json() const {
  nlohmann::json j = {{"mode", mode == Mode::exact ? "exact" : "sampled"}, {"rainbow", rainbow}};
  nlohmann::json th = nlohmann::json::array();
  for (const auto& t : thresholds) th.push_back(t.to_json());
  j["thresholds"] = std::move(th);
  if (mode == Mode::exact) {
    nlohmann::json certs = nlohmann::json::array();
    for (const auto& c : certificates) {
      nlohmann::json e = {{"color", c.color},
                          {"prime", c.prime},
                          {"realizable", c.realizable},
                          {"certificate", c.certificate.to_json()},
                          {"dimension_bound", c.bound.to_json()},
                          {"alpha_within_bound", c.alpha_within_bound}};
      if (c.alpha) {
        e["alpha"] = {{"size", c.alpha->size}, {"exact", c.alpha->exact}, {"nodes", c.alpha->nodes}};
      }
      certs.push_back(std::move(e));
    }
    j["certificates"] = std::move(certs);
  }
  if (sampled) {
    nlohmann::json failed = nlohmann::json::array();
    for (const auto& [trial, missing] : sampled->failed_trials) failed.push_back({{"trial", trial}, {"missing", missing}});
    j["sampled"] = {{"sample_size", sampled->sample_size},
                    {"trials", sampled->trials},
                    {"seed", sampled->seed},
                    {"failures", sampled->failures},
                    {"missing_count", sampled->missing_count},
                    {"failed_trials", std::move(failed)}};
  }
  return j;
}

RainbowReport verify_rainbow_sampled(const EdgeColoring& coloring, std::uint64_t m, std::uint64_t trials,
                                     std::uint64_t seed) {
  const std::uint64_t n = coloring.n();
  const unsigned t = coloring.t();
  if (m < 2) throw std::invalid_argument("sampled rainbow check needs subsets of at least 2 vertices");
  if (m > n) throw std::invalid_argument("sample size exceeds the vertex count");

  // missing[j] = bitset of colours absent from trial j
  std::vector<std::bitset<kMaxColors + 1>> missing(trials);
  const auto count = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t jj = 0; jj < count; ++jj) {
    const auto j = static_cast<std::uint64_t>(jj);
    std::mt19937_64 rng(trial_seed(seed, j));
    // Floyd's sampling of m distinct vertices
    std::vector<Vertex> chosen;
    chosen.reserve(m);
    for (std::uint64_t k = n - m; k < n; ++k) {
      const auto pick = static_cast<Vertex>(rng() % (k + 1));
      const bool taken = std::find(chosen.begin(), chosen.end(), pick) != chosen.end();
      chosen.push_back(taken ? static_cast<Vertex>(k) : pick);
    }
    std::bitset<kMaxColors + 1> seen;
    unsigned distinct = 0;
    for (std::size_t a = 0; a < chosen.size() && distinct < t; ++a) {
      for (std::size_t b = a + 1; b < chosen.size(); ++b) {
        const Color c = coloring.color(chosen[a], chosen[b]);
        if (!seen[c]) {
          seen[c] = true;
          if (c >= 1 && c <= t) ++distinct;
          if (distinct == t) break;
        }
      }
    }
    for (unsigned c = 1; c <= t; ++c) missing[j][c] = !seen[c];
  }

  RainbowReport report;
  report.mode = RainbowReport::Mode::sampled;
  for (unsigned i = 1; i <= t; ++i) report.thresholds.push_back(rainbow_threshold(coloring, i));
  SampledOutcome outcome;
  outcome.sample_size = m;
  outcome.trials = trials;
  outcome.seed = seed;
  outcome.missing_count.assign(t, 0);
  for (std::uint64_t j = 0; j < trials; ++j) {
    if (missing[j].none()) continue;
    ++outcome.failures;
    std::vector<unsigned> absent;
    for (unsigned c = 1; c <= t; ++c) {
      if (missing[j][c]) {
        absent.push_back(c);
        ++outcome.missing_count[c - 1];
      }
    }
    if (outcome.failed_trials.size() < kListedFailures) outcome.failed_trials.emplace_back(j, std::move(absent));
  }
  report.rainbow = outcome.failures == 0;
  report.sampled = std::move(outcome);
  return report;
}

RainbowReport verify_rainbow_exact(const EdgeColoring& coloring, std::optional<SearchBudget> alpha_budget,
                                   std::uint64_t cap) {
  RainbowReport report;
  report.mode = RainbowReport::Mode::exact;
  for (unsigned i = 1; i <= coloring.t(); ++i) {
    report.thresholds.push_back(rainbow_threshold(coloring, i));
    const Graph h = color_class(coloring, i, cap);
    ColorCertificate cc;
    cc.color = i;
    cc.prime = coloring.primes()[i - 1];
    cc.realizable = report.thresholds.back().realizable;
    const auto cert = RepresentationCertificate::from_labeled_graph(h, cc.prime, coloring.r(), coloring.s());
    cc.certificate = verify_certificate(h, cert);
    cc.bound = dimension_bound(1, cc.prime, coloring.r());
    if (alpha_budget) {
      cc.alpha = max_independent_set(h, *alpha_budget);
      cc.alpha_within_bound = BigInt(cc.alpha->size) <= cc.bound.value;
    }
    report.rainbow = report.rainbow && cc.certificate.valid && cc.alpha_within_bound;
    report.certificates.push_back(std::move(cc));
  }
  return report;
}

void write_coloring(const std::filesystem::path& file, const EdgeColoring& coloring) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << coloring.header_json().dump() << '\n';
  os.write(reinterpret_cast<const char*>(coloring.colors().data()),
           static_cast<std::streamsize>(coloring.colors().size()));
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

EdgeColoring read_coloring(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  std::string header_line;
  std::getline(is, header_line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(file.string() + ": bad coloring header: " + e.what());
  }
  if (header.value("format_version", 0) != kColoringFormatVersion) {
    throw FormatError(file.string() + ": unsupported coloring format_version");
  }
  const auto r = header.at("r").get<unsigned>();
  const auto s = header.at("s").get<unsigned>();
  const auto n = header.at("n").get<std::uint64_t>();
  if (n != binomial_u64(r, s)) throw FormatError(file.string() + ": n does not equal C(r, s)");
  std::vector<Color> colors(pair_count(n));
  is.read(reinterpret_cast<char*>(colors.data()), static_cast<std::streamsize>(colors.size()));
  if (static_cast<std::uint64_t>(is.gcount()) != colors.size()) throw FormatError(file.string() + ": truncated colour array");
  if (is.peek() != std::char_traits<char>::eof()) throw FormatError(file.string() + ": trailing bytes after colour array");
  auto primes = header.at("primes").get<std::vector<std::uint64_t>>();
  if (primes.size() != header.at("t").get<unsigned>()) throw FormatError(file.string() + ": t disagrees with primes");
  return EdgeColoring(r, s, std::move(primes), header.at("fallback_rule").get<std::string>(), std::move(colors));
}

}  // namespace privcap
