#pragma once

// DIMACS-style edge files plus a JSON sidecar for vertex labels.
//
//   c optional comment
//   p edge <n> <m>
//   e <u> <v>            (1-based, one line per edge)
//
// The sidecar lives next to the graph file as "<file>.labels.json":
//   {"format_version": 1, "vertices": [{"channel": 1, "subset": [1, 2, ...],
//    "ground_size": 16}, ...]}

#include <filesystem>
#include <iosfwd>

#include <json.hpp>

#include "privcap/graph.hpp"

namespace privcap {

inline constexpr int kGraphFormatVersion = 1;

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_dimacs(std::ostream& os, const Graph& g);
Graph read_dimacs(std::istream& is, std::uint64_t cap = kDefaultAdjacencyCap);

nlohmann::json labels_to_json(const Graph& g);
std::vector<VertexLabel> labels_from_json(const nlohmann::json& j);

std::filesystem::path labels_sidecar_path(const std::filesystem::path& graph_file);

/// Writes the edge file and, when the graph is labeled, its sidecar.
void save_graph(const std::filesystem::path& file, const Graph& g);

/// Reads the edge file and attaches the sidecar labels if one exists.
Graph load_graph(const std::filesystem::path& file, std::uint64_t cap = kDefaultAdjacencyCap);

}  // namespace privcap
