#pragma once

// Explicit t-edge-colourings of K_n, n = C(r, s), on the s-subsets of [r]:
// the pair {A, B} gets colour i when |A cap B| = s (mod p_i), and a fixed
// fallback colour otherwise.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "privcap/core_math.hpp"
#include "privcap/graph.hpp"
#include "privcap/independence.hpp"
#include "privcap/polyrep.hpp"
#include "privcap/privileged.hpp"

namespace privcap {

using Color = std::uint8_t;

inline constexpr int kColoringFormatVersion = 1;
inline constexpr const char* kFallbackRankSum = "rank_sum_mod_t";
inline constexpr unsigned kMaxColors = 255;

/// Position of pair (u, v), u < v, in the row-major upper triangle of an
/// n-vertex complete graph.
inline std::uint64_t pair_index(std::uint64_t n, std::uint64_t u, std::uint64_t v) {
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

inline std::uint64_t pair_count(std::uint64_t n) { return n * (n - (n ? 1 : 0)) / 2; }

class EdgeColoring {
 public:
  EdgeColoring() = default;
  EdgeColoring(unsigned r, unsigned s, std::vector<std::uint64_t> primes, std::string fallback_rule,
               std::vector<Color> colors);

  std::uint64_t n() const { return n_; }
  unsigned t() const { return static_cast<unsigned>(primes_.size()); }
  unsigned r() const { return r_; }
  unsigned s() const { return s_; }
  const std::vector<std::uint64_t>& primes() const { return primes_; }
  const std::string& fallback_rule() const { return fallback_rule_; }

  /// Colour in [1, t] of the pair {u, v}, u != v.
  Color color(Vertex u, Vertex v) const {
    return u < v ? colors_[pair_index(n_, u, v)] : colors_[pair_index(n_, v, u)];
  }
  void set_color(Vertex u, Vertex v, Color c);
  const std::vector<Color>& colors() const { return colors_; }

  /// Vertex v is the v-th s-subset of [r] in colex order.
  std::uint64_t subset_mask(Vertex v) const { return masks_[v]; }

  nlohmann::json header_json() const;

 private:
  unsigned r_ = 0;
  unsigned s_ = 0;
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> primes_;
  std::string fallback_rule_;
  std::vector<std::uint64_t> masks_;
  std::vector<Color> colors_;
};

/// Rule colour for an overlap value, 0 when no congruence holds.
Color rule_color(unsigned overlap, unsigned s, const std::vector<std::uint64_t>& primes);

/// Fallback colour 1 + ((rank(A) + rank(B)) mod t).
inline Color fallback_color(std::uint64_t rank_a, std::uint64_t rank_b, unsigned t) {
  return static_cast<Color>(1 + (rank_a + rank_b) % t);
}

/// Throws ValidationError if validate_params fails, std::invalid_argument for
/// an unknown fallback rule or more than 255 colours, SizeCapExceeded if the
/// colour array would exceed `cap` bytes. Rows are coloured in parallel.
EdgeColoring build_coloring(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes,
                            const std::string& fallback_rule = kFallbackRankSum,
                            std::uint64_t cap = kDefaultAdjacencyCap / 8);

struct WellDefinedReport {
  bool well_defined = true;
  /// (overlap value, first prime, second prime) for every double hit.
  struct Conflict {
    unsigned overlap;
    std::uint64_t p_first;
    std::uint64_t p_second;
  };
  std::vector<Conflict> conflicts;
  /// residues[i]: achievable overlaps that trigger colour i + 1.
  std::vector<std::vector<unsigned>> residues;

  nlohmann::json to_json() const;
};

/// Scans the achievable overlap values, not pairs, for values that two
/// congruences claim at once.
WellDefinedReport check_well_defined(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes);
WellDefinedReport check_well_defined(const EdgeColoring& coloring);

struct ConsistencyReport {
  bool consistent = true;
  std::uint64_t mismatches = 0;
  std::optional<std::pair<Vertex, Vertex>> first_mismatch;

  nlohmann::json to_json() const;
};

/// Every pair carries a colour in [1, t], and each rule pair carries its rule
/// colour. Detects recoloured pairs.
ConsistencyReport check_rule_consistency(const EdgeColoring& coloring);

/// H_i: the spanning graph whose edges are the i-coloured pairs, labeled
/// with channel i so a certificate can be checked on it.
Graph color_class(const EdgeColoring& coloring, unsigned i, std::uint64_t cap = kDefaultAdjacencyCap);

struct RainbowThreshold {
  unsigned color = 0;
  std::uint64_t prime = 0;
  bool realizable = true;
  /// 1 + sum_{j < p_i} C(r, j): every vertex set this large contains colour i.
  BigInt value;
  /// C(r, p_i), the coarser bound.
  BigInt relaxation;

  nlohmann::json to_json() const;
};

/// Throws std::out_of_range for i outside [1, t].
RainbowThreshold rainbow_threshold(const EdgeColoring& coloring, unsigned i);

struct SampledOutcome {
  std::uint64_t sample_size = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t failures = 0;
  /// Up to kListedFailures (trial, missing colours) entries, in trial order.
  std::vector<std::pair<std::uint64_t, std::vector<unsigned>>> failed_trials;
  std::vector<std::uint64_t> missing_count;  // per colour, trials lacking it
};

inline constexpr std::size_t kListedFailures = 32;

struct ColorCertificate {
  unsigned color = 0;
  std::uint64_t prime = 0;
  bool realizable = true;
  CertificateReport certificate;
  std::optional<AlphaResult> alpha;
  DimensionBound bound;
  bool alpha_within_bound = true;
};

struct RainbowReport {
  enum class Mode { exact, sampled };
  Mode mode = Mode::sampled;
  bool rainbow = true;
  std::vector<RainbowThreshold> thresholds;
  std::vector<ColorCertificate> certificates;
  std::optional<SampledOutcome> sampled;

  nlohmann::json to_json() const;
};

/// Draws `trials` vertex sets of size m and checks each shows all t colours.
/// Trial j samples from its own generator seeded by (seed, j), so the result
/// does not depend on the number of workers. Throws std::invalid_argument if
/// m < 2 or m > n.
RainbowReport verify_rainbow_sampled(const EdgeColoring& coloring, std::uint64_t m, std::uint64_t trials,
                                     std::uint64_t seed);

/// Per colour: certificate check of H_i modulo p_i, then (if alpha_budget is
/// set) the solver on H_i with its result compared against the dimension bound.
RainbowReport verify_rainbow_exact(const EdgeColoring& coloring, std::optional<SearchBudget> alpha_budget,
                                   std::uint64_t cap = kDefaultAdjacencyCap);

/// Coloring file: one line of JSON header, then the colour bytes of every
/// pair in row-major upper-triangle order.
void write_coloring(const std::filesystem::path& file, const EdgeColoring& coloring);
EdgeColoring read_coloring(const std::filesystem::path& file);

/// Seed of trial j: splitmix64 of seed and j.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

}  // namespace privcap
