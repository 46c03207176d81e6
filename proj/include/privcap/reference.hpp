#pragma once

// Serial reference versions of the parallel kernels. They follow the
// definitions directly (per-pair subset intersection, per-prime congruence,
// literal polynomial evaluation) and exist so tests and benchmarks can compare
// the OpenMP kernels against them.

#include <cstdint>
#include <vector>

#include "privcap/graph.hpp"
#include "privcap/independence.hpp"
#include "privcap/polyrep.hpp"
#include "privcap/ramsey.hpp"

namespace privcap::reference {

Graph strong_product(const Graph& g, const Graph& h);

Graph build_graph(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes, std::uint32_t channel);

CertificateReport verify_certificate(const Graph& g, const RepresentationCertificate& cert,
                                     std::size_t max_listed = kDefaultListedViolations);

PowerIndependenceReport check_independent_in_power(const Graph& g, unsigned k, const TupleList& tuples);

EdgeColoring build_coloring(unsigned r, unsigned s, const std::vector<std::uint64_t>& primes);

}  // namespace privcap::reference
