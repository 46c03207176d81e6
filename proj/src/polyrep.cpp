#include "privcap/polyrep.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace privcap {

std::uint64_t fw_product(std::uint64_t w, std::uint64_t q, std::uint64_t s) {
  const std::uint64_t excluded = s % q;
  const std::uint64_t wq = w % q;
  std::uint64_t product = 1 % q;
  for (std::uint64_t u = 0; u < q; ++u) {
    if (u == excluded) continue;
    product = mod_mul(product, (u + q - wq) % q, q);
  }
  return product;
}

std::uint64_t fw_evaluate(const KSubset& a, std::uint32_t channel_a, const KSubset& b,
                          std::uint32_t channel_b, std::uint64_t q, std::uint64_t s) {
  // c_B is zero on every variable of another channel, so the linear form is 0.
  const std::uint64_t w = (channel_a == channel_b) ? a.intersection_size(b) : 0;
  return fw_product(w, q, s);
}

RepresentationCertificate::RepresentationCertificate(std::uint64_t q, unsigned r, unsigned s,
                                                     std::vector<ChannelTable> channels)
    : q_(q), r_(r), s_(s), channels_(std::move(channels)) {
  if (!is_prime(q_)) throw std::invalid_argument("certificate modulus " + std::to_string(q_) + " is not prime");
  if (s_ % q_ == 0) throw std::invalid_argument("certificate modulus divides s");
  for (const auto& ch : channels_) {
    for (const auto& sub : ch.vertex_subsets) {
      if (sub.ground_size() != r_ || sub.size() != s_) {
        throw std::invalid_argument("certificate vertex " + sub.to_string() + " is not an " +
                                    std::to_string(s_) + "-subset of [" + std::to_string(r_) + "]");
      }
    }
  }
}

RepresentationCertificate RepresentationCertificate::from_labeled_graph(const Graph& g, std::uint64_t q,
                                                                        unsigned r, unsigned s) {
  if (!g.has_labels()) throw std::invalid_argument("graph has no (channel, subset) labels");
  std::vector<ChannelTable> channels;
  for (const auto& label : g.labels()) {
    if (channels.empty() || channels.back().id != label.channel) channels.push_back({label.channel, {}});
    channels.back().vertex_subsets.push_back(label.subset);
  }
  return RepresentationCertificate(q, r, s, std::move(channels));
}

std::size_t RepresentationCertificate::vertex_count() const {
  std::size_t n = 0;
  for (const auto& ch : channels_) n += ch.vertex_subsets.size();
  return n;
}

nlohmann::json RepresentationCertificate::to_json() const {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& ch : channels_) {
    nlohmann::json subsets = nlohmann::json::array();
    for (const auto& sub : ch.vertex_subsets) subsets.push_back(sub.elements());
    channels.push_back({{"id", ch.id}, {"vertex_subsets", std::move(subsets)}});
  }
  return {{"q", q_}, {"r", r_}, {"s", s_}, {"channels", std::move(channels)}};
}

RepresentationCertificate RepresentationCertificate::from_json(const nlohmann::json& j) {
  const auto r = j.at("r").get<unsigned>();
  std::vector<ChannelTable> channels;
  for (const auto& ch : j.at("channels")) {
    ChannelTable table{ch.at("id").get<std::uint32_t>(), {}};
    for (const auto& sub : ch.at("vertex_subsets")) {
      table.vertex_subsets.emplace_back(r, sub.get<std::vector<unsigned>>());
    }
    channels.push_back(std::move(table));
  }
  return RepresentationCertificate(j.at("q").get<std::uint64_t>(), r, j.at("s").get<unsigned>(),
                                   std::move(channels));
}

nlohmann::json CertificateReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : violations) {
    list.push_back({{"kind", v.kind == CertificateViolation::Kind::diagonal_vanishes ? "diagonal_vanishes"
                                                                                    : "nonedge_nonzero"},
                    {"u", v.u},
                    {"v", v.v}});
  }
  return {{"valid", valid},
          {"violation_count", violation_count},
          {"violations", std::move(list)},
          {"pairs_checked", pairs_checked}};
}

namespace {

void check_labels_match(const Graph& g, const RepresentationCertificate& cert) {
  if (!g.has_labels()) throw std::invalid_argument("certificate verification needs a labeled graph");
  if (cert.vertex_count() != g.size()) {
    throw std::invalid_argument("certificate covers " + std::to_string(cert.vertex_count()) +
                                " vertices, graph has " + std::to_string(g.size()));
  }
  std::size_t v = 0;
  for (const auto& ch : cert.channels()) {
    for (const auto& sub : ch.vertex_subsets) {
      const auto& label = g.labels()[v];
      if (label.channel != ch.id || !(label.subset == sub)) {
        throw std::invalid_argument("label of vertex " + std::to_string(v) + " disagrees with the certificate");
      }
      ++v;
    }
  }
}

}  // namespace

CertificateReport verify_certificate(const Graph& g, const RepresentationCertificate& cert,
                                     std::size_t max_listed) {
  check_labels_match(g, cert);
  if (cert.r() > kMaxMaskGround) throw std::invalid_argument("ground set too large for the bitmask kernel");
  const std::size_t n = g.size();
  const std::uint64_t q = cert.q();
  const std::uint64_t s = cert.s();

  std::vector<std::uint64_t> masks(n);
  std::vector<std::uint32_t> channel(n);
  for (std::size_t v = 0; v < n; ++v) {
    masks[v] = g.labels()[v].subset.mask();
    channel[v] = g.labels()[v].channel;
  }
  std::vector<std::uint64_t> same_channel(cert.r() + 1);
  for (unsigned w = 0; w <= cert.r(); ++w) same_channel[w] = fw_product(w, q, s);
  const std::uint64_t cross_channel = fw_product(0, q, s);

  struct RowResult {
    std::uint64_t count = 0;
    std::vector<CertificateViolation> listed;
  };
  std::vector<RowResult> rows(n);
  const auto row_count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t uu = 0; uu < row_count; ++uu) {
    const auto u = static_cast<Vertex>(uu);
    auto& out = rows[u];
    auto record = [&](CertificateViolation::Kind kind, Vertex v) {
      ++out.count;
      if (out.listed.size() < max_listed) out.listed.push_back({kind, u, v});
    };
    const auto adj = g.row(u);
    for (Vertex v = 0; v < n; ++v) {
      if (v == u) {
        if (same_channel[cert.s()] == 0) record(CertificateViolation::Kind::diagonal_vanishes, u);
        continue;
      }
      if ((adj[v >> 6] >> (v & 63)) & 1) continue;
      const std::uint64_t value =
          channel[u] == channel[v] ? same_channel[std::popcount(masks[u] & masks[v])] : cross_channel;
      if (value != 0) record(CertificateViolation::Kind::nonedge_nonzero, v);
    }
  }

  CertificateReport report;
  report.pairs_checked = static_cast<std::uint64_t>(n) * n;
  for (auto& row : rows) {
    report.violation_count += row.count;
    for (auto& v : row.listed) {
      if (report.violations.size() >= max_listed) break;
      report.violations.push_back(v);
    }
  }
  report.valid = report.violation_count == 0;
  return report;
}

BigInt DimensionBound::relaxation() const { return BigInt(copies) * binomial(r, q); }

nlohmann::json big_to_json(const BigInt& value) {
  if (value >= 0 && value <= std::numeric_limits<std::uint64_t>::max()) {
    return value.convert_to<std::uint64_t>();
  }
  return value.str();
}

nlohmann::json DimensionBound::to_json() const {
  return {{"copies", copies},
          {"q", q},
          {"r", r},
          {"value", big_to_json(value)},
          {"relaxation", big_to_json(relaxation())}};
}

DimensionBound dimension_bound(std::uint64_t copies, std::uint64_t q, unsigned r) {
  BigInt per_copy = 0;
  for (std::uint64_t i = 0; i < q; ++i) per_copy += binomial(r, i);
  return {copies, q, r, per_copy * copies};
}

}  // namespace privcap
