#include "privcap/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <string>

namespace privcap {

void write_dimacs(std::ostream& os, const Graph& g) {
  os << "p edge " << g.size() << ' ' << g.edge_count() << '\n';
  std::string buffer;
  for (Vertex u = 0; u < g.size(); ++u) {
    auto row = g.row(u);
    // only v > u, starting from u's own word
    for (std::size_t wi = (u + 1) >> 6; wi < row.size(); ++wi) {
      std::uint64_t w = row[wi];
      if (wi == ((u + 1) >> 6) && ((u + 1) & 63) != 0) w &= ~((std::uint64_t{1} << ((u + 1) & 63)) - 1);
      while (w != 0) {
        const auto v = static_cast<Vertex>(wi * 64 + std::countr_zero(w));
        buffer += "e ";
        buffer += std::to_string(u + 1);
        buffer += ' ';
        buffer += std::to_string(v + 1);
        buffer += '\n';
        w &= w - 1;
      }
    }
    if (buffer.size() > (1u << 20)) {
      os << buffer;
      buffer.clear();
    }
  }
  os << buffer;
}

Graph read_dimacs(std::istream& is, std::uint64_t cap) {
  std::string line;
  std::optional<Graph> g;
  std::uint64_t declared_edges = 0;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      std::uint64_t n = 0;
      if (!(ls >> kind >> n >> declared_edges) || (kind != "edge" && kind != "col")) {
        throw FormatError("line " + std::to_string(line_no) + ": malformed problem line");
      }
      if (g) throw FormatError("line " + std::to_string(line_no) + ": duplicate problem line");
      g.emplace(n, cap);
    } else if (tag == 'e') {
      if (!g) throw FormatError("line " + std::to_string(line_no) + ": edge before problem line");
      std::uint64_t u = 0, v = 0;
      if (!(ls >> u >> v) || u < 1 || v < 1 || u > g->size() || v > g->size() || u == v) {
        throw FormatError("line " + std::to_string(line_no) + ": bad edge");
      }
      g->add_edge(static_cast<Vertex>(u - 1), static_cast<Vertex>(v - 1));
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": unknown record '" + line + "'");
    }
  }
  if (!g) throw FormatError("missing problem line");
  if (g->edge_count() != declared_edges) {
    throw FormatError("edge count mismatch: header says " + std::to_string(declared_edges) +
                      ", file has " + std::to_string(g->edge_count()));
  }
  return std::move(*g);
}

nlohmann::json labels_to_json(const Graph& g) {
  nlohmann::json vertices = nlohmann::json::array();
  for (const auto& label : g.labels()) {
    vertices.push_back({{"channel", label.channel},
                        {"ground_size", label.subset.ground_size()},
                        {"subset", label.subset.elements()}});
  }
  return {{"format_version", kGraphFormatVersion}, {"vertices", std::move(vertices)}};
}

std::vector<VertexLabel> labels_from_json(const nlohmann::json& j) {
  if (j.value("format_version", 0) != kGraphFormatVersion) {
    throw FormatError("unsupported label format_version");
  }
  std::vector<VertexLabel> out;
  for (const auto& v : j.at("vertices")) {
    out.push_back({v.at("channel").get<std::uint32_t>(),
                   KSubset(v.at("ground_size").get<unsigned>(),
                           v.at("subset").get<std::vector<unsigned>>())});
  }
  return out;
}

std::filesystem::path labels_sidecar_path(const std::filesystem::path& graph_file) {
  auto p = graph_file;
  p += ".labels.json";
  return p;
}

void save_graph(const std::filesystem::path& file, const Graph& g) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  write_dimacs(os, g);
  if (g.has_labels()) {
    std::ofstream ls(labels_sidecar_path(file));
    if (!ls) throw std::runtime_error("cannot write " + labels_sidecar_path(file).string());
    ls << labels_to_json(g).dump() << '\n';
  }
}

Graph load_graph(const std::filesystem::path& file, std::uint64_t cap) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot read " + file.string());
  Graph g = read_dimacs(is, cap);
  const auto sidecar = labels_sidecar_path(file);
  if (std::filesystem::exists(sidecar)) {
    std::ifstream ls(sidecar);
    try {
      g.set_labels(labels_from_json(nlohmann::json::parse(ls)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(sidecar.string() + ": " + e.what());
    }
  }
  return g;
}

}  // namespace privcap
