#pragma once

// Polynomial representations over Z_q built from intersection-size
// polynomials, and the capacity upper bound they certify.
//
// A vertex (channel i, subset A) carries
//   f_A(x) = prod_{u in Z_q, u != s mod q} (u - sum_{j in A} x_j^{(i)})
// and the point c_A = indicator of A on channel i's variables. Evaluating
// f_A at c_B only depends on w = |A cap B| (same channel) or w = 0 (different
// channels), so polynomials are never materialized.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "privcap/core_math.hpp"
#include "privcap/graph.hpp"

namespace privcap {

/// prod over u in {0..q-1}, u != s mod q, of (u - w) mod q.
std::uint64_t fw_product(std::uint64_t w, std::uint64_t q, std::uint64_t s);

/// f_A(c_B) reduced mod q. q must be prime.
std::uint64_t fw_evaluate(const KSubset& a, std::uint32_t channel_a, const KSubset& b,
                          std::uint32_t channel_b, std::uint64_t q, std::uint64_t s);

struct ChannelTable {
  std::uint32_t id = 0;
  std::vector<KSubset> vertex_subsets;

  bool operator==(const ChannelTable&) const = default;
};

/// Enough data to evaluate every f_v at every c_u: the modulus, subset sizes,
/// and the vertex order as a list of channels.
class RepresentationCertificate {
 public:
  /// Throws std::invalid_argument unless q is prime, q does not divide s and
  /// every subset is an s-subset of [r].
  RepresentationCertificate(std::uint64_t q, unsigned r, unsigned s, std::vector<ChannelTable> channels);

  /// Reads the channel tables off a labeled graph, in vertex order.
  static RepresentationCertificate from_labeled_graph(const Graph& g, std::uint64_t q, unsigned r,
                                                      unsigned s);

  std::uint64_t q() const { return q_; }
  unsigned r() const { return r_; }
  unsigned s() const { return s_; }
  std::uint64_t excluded_residue() const { return s_ % q_; }
  const std::vector<ChannelTable>& channels() const { return channels_; }
  std::size_t vertex_count() const;

  nlohmann::json to_json() const;
  static RepresentationCertificate from_json(const nlohmann::json& j);

  bool operator==(const RepresentationCertificate&) const = default;

 private:
  std::uint64_t q_;
  unsigned r_;
  unsigned s_;
  std::vector<ChannelTable> channels_;
};

struct CertificateViolation {
  enum class Kind { diagonal_vanishes, nonedge_nonzero };
  Kind kind;
  Vertex u;
  Vertex v;

  bool operator==(const CertificateViolation&) const = default;
};

struct CertificateReport {
  bool valid = true;
  std::uint64_t violation_count = 0;
  /// The first violations in (u, v) order; (u, v) means f_u(c_v) is wrong.
  std::vector<CertificateViolation> violations;
  std::uint64_t pairs_checked = 0;

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultListedViolations = 64;

/// Checks f_v(c_v) != 0 for every v and f_u(c_v) = 0 for every ordered
/// non-adjacent pair u != v, rows scanned in parallel. Throws
/// std::invalid_argument if the graph's labels disagree with the certificate.
CertificateReport verify_certificate(const Graph& g, const RepresentationCertificate& cert,
                                     std::size_t max_listed = kDefaultListedViolations);

/// copies * sum_{i<q} C(r, i): the dimension of the polynomial space holding
/// every f_v, which bounds c(G) for any represented graph.
struct DimensionBound {
  std::uint64_t copies = 0;
  std::uint64_t q = 0;
  unsigned r = 0;
  BigInt value;

  /// copies * C(r, q); dominates value whenever 3q <= r.
  BigInt relaxation() const;
  double as_double() const { return value.convert_to<double>(); }

  nlohmann::json to_json() const;
};

DimensionBound dimension_bound(std::uint64_t copies, std::uint64_t q, unsigned r);

/// BigInt as a JSON number when it fits in 64 bits, else a decimal string.
nlohmann::json big_to_json(const BigInt& value);

}  // namespace privcap
