#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "privcap/graph_io.hpp"
#include "privcap/independence.hpp"
#include "privcap/privileged.hpp"
#include "privcap/ramsey.hpp"

namespace privcap::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Raised for failures that should exit 1 after the report is printed.
struct RuntimeFailure {
  json result;
  std::string message;
};

struct Globals {
  int workers = 0;
  std::uint64_t cap = kDefaultAdjacencyCap;
  std::uint64_t budget = kDefaultNodeBudget;
  std::optional<double> time_limit;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string report_file;
};

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("empty entry in list '" + text + "'");
    std::size_t used = 0;
    const auto value = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("not an integer: '" + item + "'");
    out.push_back(value);
  }
  return out;
}

// "1,2" or "[1,2]"
SenderMask parse_coalition(const std::string& text, unsigned t) {
  std::string body = text;
  if (!body.empty() && body.front() == '[') {
    const auto j = json::parse(body);
    std::vector<unsigned> ids = j.get<std::vector<unsigned>>();
    if (ids.empty()) throw std::invalid_argument("coalition must be a nonempty subset of [1, t]");
    return mask_of(ids, t);
  }
  const auto values = parse_u64_list(body);
  if (values.empty()) throw std::invalid_argument("coalition must be a nonempty subset of [1, t]");
  std::vector<unsigned> ids(values.begin(), values.end());
  return mask_of(ids, t);
}

std::filesystem::path resolve(const Globals& g, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_absolute() || g.out_dir.empty()) return p;
  return std::filesystem::path(g.out_dir) / p;
}

json alpha_json(const AlphaResult& a) {
  return {{"size", a.size},
          {"exact", a.exact},
          {"nodes", a.nodes},
          {"stopped_by_time", a.stopped_by_time},
          {"witness", a.witness.members()}};
}

json graph_summary(const Graph& g, const std::string& file) {
  return {{"file", file}, {"vertices", g.size()}, {"edges", g.edge_count()}, {"labeled", g.has_labels()}};
}

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : report_os_(out), err_(err) {}

  int run(const std::vector<std::string>& args);

 private:
  void add_globals(CLI::App& app);
  json config_base() const;
  int emit(const std::string& command, json config, json result, double seconds, const std::vector<std::string>& args);

  json cmd_construct();
  json cmd_bound();
  json cmd_alpha();
  json cmd_graph(const std::string& op);
  json cmd_ramsey_build();
  json cmd_ramsey_verify();

  std::ostream& report_os_;
  std::ostream& err_;
  Globals g_;
  json config_;

  // construct privileged
  unsigned t_ = 0;
  std::string family_, family_file_, primes_, out_;
  unsigned r_ = 0, s_ = 0;
  std::optional<std::uint64_t> base_prime_;
  bool no_graph_files_ = false;
  // bound
  std::string system_, coalition_;
  bool no_verify_ = false;
  // alpha
  std::string graph_file_;
  bool require_exact_ = false;
  // graph ops
  std::vector<std::string> inputs_;
  unsigned k_ = 2;
  // ramsey
  std::string coloring_, mode_ = "sampled", fallback_ = kFallbackRankSum;
  std::uint64_t size_ = 0, trials_ = 1000;
  bool exact_alpha_ = false;
};

void Runner::add_globals(CLI::App& app) {
  app.add_option("--workers", g_.workers, "OpenMP worker count (0 keeps the runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--cap", g_.cap, "Largest adjacency matrix in bits")->check(CLI::PositiveNumber);
  app.add_option("--budget", g_.budget, "Solver node budget")->check(CLI::PositiveNumber);
  app.add_option("--time-limit", g_.time_limit, "Solver wall-clock limit in seconds (makes results nondeterministic)");
  app.add_option("--seed", g_.seed, "Seed for every random choice");
  app.add_option("--out-dir", g_.out_dir, "Directory for relative output paths")->envname(kOutDirEnv);
  app.add_option("--report", g_.report_file, "Also write the JSON report to this file");
}

json Runner::config_base() const {
  json c = {{"cap", g_.cap}, {"budget", g_.budget}, {"seed", g_.seed}};
  c["time_limit"] = g_.time_limit ? json(*g_.time_limit) : json(nullptr);
  return c;
}

int Runner::emit(const std::string& command, json config, json result, double seconds,
                 const std::vector<std::string>& args) {
  json report = {{"format_version", kReportFormatVersion},
                 {"command", command},
                 {"config", std::move(config)},
                 {"seed", g_.seed},
                 {"result", std::move(result)}};
  report["timing"] = {{"seconds", seconds}, {"workers", omp_get_max_threads()}, {"argv", args}};
  const std::string text = report.dump(2);
  report_os_ << text << '\n';
  if (!g_.report_file.empty()) {
    std::ofstream os(resolve(g_, g_.report_file));
    if (!os) throw std::runtime_error("cannot write report " + g_.report_file);
    os << text << '\n';
  }
  return kExitOk;
}

json Runner::cmd_construct() {
  if (family_.empty() == family_file_.empty()) {
    throw std::invalid_argument("give exactly one of --family and --family-file");
  }
  std::string family_text = family_;
  if (!family_file_.empty()) {
    std::ifstream is(family_file_);
    if (!is) throw std::invalid_argument("cannot read family file " + family_file_);
    family_text.assign(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
  }
  auto family = SubsetFamily::parse(t_, family_text);
  SystemParams params{r_, s_, {}, std::nullopt};
  if (!primes_.empty() && base_prime_) throw std::invalid_argument("give at most one of --primes and --base-prime");
  if (!primes_.empty()) {
    params.prime_pool = parse_u64_list(primes_);
  } else {
    params.base_prime = base_prime_.value_or(2);
  }
  config_["family"] = family.to_json();
  config_["t"] = t_;
  config_["r"] = r_;
  config_["s"] = s_;
  config_["primes"] = params.prime_pool;
  config_["base_prime"] = params.base_prime ? json(*params.base_prime) : json(nullptr);
  config_["out"] = out_;
  config_["graph_files"] = !no_graph_files_;

  const auto system = PrivilegedSystem::construct(std::move(family), std::move(params), g_.cap);
  const auto dir = resolve(g_, out_);
  write_system(system, dir, !no_graph_files_);
  std::vector<std::string> files;
  if (!no_graph_files_) {
    for (unsigned i = 1; i <= system.t(); ++i) files.push_back("G_" + std::to_string(i) + ".dimacs");
  }
  auto manifest = system_manifest(system, files);
  manifest["directory"] = out_;
  return manifest;
}

json Runner::cmd_bound() {
  const auto system = load_system(resolve(g_, system_), g_.cap);
  config_["system"] = system_;
  config_["coalition"] = coalition_;
  config_["verify"] = !no_verify_;
  const SenderMask x = parse_coalition(coalition_, system.t());
  BoundOptions options;
  options.verify_witness = !no_verify_;
  options.verify_certificate = !no_verify_;
  auto result = bound_report(system, x, options).to_json();
  result["n"] = system.n();
  return result;
}

json Runner::cmd_alpha() {
  config_["graph"] = graph_file_;
  config_["require_exact"] = require_exact_;
  const Graph graph = load_graph(graph_file_, g_.cap);
  const auto a = max_independent_set(graph, SearchBudget{g_.budget, g_.time_limit});
  json result = alpha_json(a);
  result["vertices"] = graph.size();
  if (require_exact_ && !a.exact) throw RuntimeFailure{result, "node budget exhausted before the search finished"};
  return result;
}

json Runner::cmd_graph(const std::string& op) {
  config_["op"] = op;
  config_["inputs"] = inputs_;
  config_["out"] = out_;
  std::vector<Graph> graphs;
  for (const auto& f : inputs_) graphs.push_back(load_graph(f, g_.cap));
  Graph result_graph;
  if (op == "product") {
    if (graphs.size() != 2) throw std::invalid_argument("graph product takes exactly two input files");
    result_graph = strong_product(graphs[0], graphs[1], g_.cap);
  } else if (op == "power") {
    config_["k"] = k_;
    if (graphs.size() != 1) throw std::invalid_argument("graph power takes exactly one input file");
    result_graph = power(graphs[0], k_, g_.cap);
  } else {
    result_graph = disjoint_union(graphs, g_.cap);
  }
  const auto path = resolve(g_, out_);
  save_graph(path, result_graph);
  return graph_summary(result_graph, out_);
}

json Runner::cmd_ramsey_build() {
  const auto primes = parse_u64_list(primes_);
  config_["r"] = r_;
  config_["s"] = s_;
  config_["primes"] = primes;
  config_["fallback_rule"] = fallback_;
  config_["out"] = out_;
  const auto coloring = build_coloring(r_, s_, primes, fallback_, g_.cap / 8);
  write_coloring(resolve(g_, out_), coloring);
  json result = coloring.header_json();
  result["file"] = out_;
  result["well_defined"] = check_well_defined(coloring).to_json();
  json thresholds = json::array();
  for (unsigned i = 1; i <= coloring.t(); ++i) thresholds.push_back(rainbow_threshold(coloring, i).to_json());
  result["thresholds"] = std::move(thresholds);
  return result;
}

json Runner::cmd_ramsey_verify() {
  config_["coloring"] = coloring_;
  config_["mode"] = mode_;
  const auto coloring = read_coloring(coloring_);
  json result;
  if (mode_ == "sampled") {
    config_["size"] = size_;
    config_["trials"] = trials_;
    const std::uint64_t m = size_ != 0 ? size_ : [&] {
      // smallest size the certificates guarantee for every colour
      BigInt largest = 2;
      for (unsigned i = 1; i <= coloring.t(); ++i) largest = std::max(largest, rainbow_threshold(coloring, i).value);
      return to_u64(std::min<BigInt>(largest, coloring.n()));
    }();
    config_["effective_size"] = m;
    result = verify_rainbow_sampled(coloring, m, trials_, g_.seed).to_json();
  } else {
    config_["alpha"] = exact_alpha_;
    std::optional<SearchBudget> budget;
    if (exact_alpha_) budget = SearchBudget{g_.budget, g_.time_limit};
    result = verify_rainbow_exact(coloring, budget, g_.cap).to_json();
  }
  result["consistency"] = check_rule_consistency(coloring).to_json();
  result["well_defined"] = check_well_defined(coloring).to_json();
  if (!result["rainbow"].get<bool>() || !result["consistency"]["consistent"].get<bool>()) {
    throw RuntimeFailure{result, "colouring failed verification"};
  }
  return result;
}

int Runner::run(const std::vector<std::string>& args) {
  CLI::App app{"Capacity constructions for channel graphs: build, bound and verify"};
  app.name("privcap");
  app.require_subcommand(1);
  app.fallthrough();
  add_globals(app);

  auto* construct = app.add_subcommand("construct", "Build a system of channel graphs");
  construct->require_subcommand(1);
  auto* privileged = construct->add_subcommand("privileged", "Graphs whose union is large exactly on privileged coalitions");
  privileged->add_option("--t", t_, "Number of senders")->required();
  privileged->add_option("--family", family_, "Family as JSON, e.g. [[1,2],[3]]");
  privileged->add_option("--family-file", family_file_, "File holding the family JSON");
  privileged->add_option("--r", r_, "Ground set size")->required();
  privileged->add_option("--s", s_, "Subset size")->required();
  privileged->add_option("--primes", primes_, "Comma-separated prime pool");
  privileged->add_option("--base-prime", base_prime_, "Use the primes above this value (default 2)");
  privileged->add_option("--out", out_, "Output directory")->required();
  privileged->add_flag("--no-graph-files", no_graph_files_, "Write only the manifest");

  auto* bound = app.add_subcommand("bound", "Capacity bounds for a coalition");
  bound->add_option("--system", system_, "Directory written by construct")->required();
  bound->add_option("--coalition", coalition_, "Senders, e.g. 1,2 or [1,2]")->required();
  bound->add_flag("--no-verify", no_verify_, "Skip the witness and certificate checks");

  auto* alpha = app.add_subcommand("alpha", "Independence number of a DIMACS graph");
  alpha->add_option("graph", graph_file_, "Graph file")->required();
  alpha->add_flag("--require-exact", require_exact_, "Exit 1 if the budget runs out");

  auto* graph = app.add_subcommand("graph", "Graph algebra on files");
  graph->require_subcommand(1);
  auto* product = graph->add_subcommand("product", "Strong product of two graphs");
  product->add_option("inputs", inputs_, "Two graph files")->required();
  product->add_option("--out", out_, "Output graph file")->required();
  auto* pow = graph->add_subcommand("power", "k-th strong power");
  pow->add_option("inputs", inputs_, "Graph file")->required();
  pow->add_option("--k", k_, "Exponent")->check(CLI::PositiveNumber);
  pow->add_option("--out", out_, "Output graph file")->required();
  auto* uni = graph->add_subcommand("union", "Disjoint union");
  uni->add_option("inputs", inputs_, "Graph files")->required();
  uni->add_option("--out", out_, "Output graph file")->required();

  auto* ramsey = app.add_subcommand("ramsey", "Edge colourings of complete graphs on subsets");
  ramsey->require_subcommand(1);
  auto* build = ramsey->add_subcommand("build", "Build and store a colouring");
  build->add_option("--r", r_, "Ground set size")->required();
  build->add_option("--s", s_, "Subset size")->required();
  build->add_option("--primes", primes_, "Comma-separated primes, one per colour")->required();
  build->add_option("--fallback", fallback_, "Fallback rule")->check(CLI::IsMember({std::string(kFallbackRankSum)}));
  build->add_option("--out", out_, "Output colouring file")->required();
  auto* verify = ramsey->add_subcommand("verify", "Check that large vertex sets see every colour");
  verify->add_option("--coloring", coloring_, "Colouring file")->required();
  verify->add_option("--mode", mode_, "exact or sampled")->check(CLI::IsMember({"exact", "sampled"}));
  verify->add_option("--size", size_, "Sample size (default: largest rainbow threshold)");
  verify->add_option("--trials", trials_, "Number of samples");
  verify->add_flag("--alpha", exact_alpha_, "In exact mode also run the solver on every colour class");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    report_os_ << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    report_os_ << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (g_.workers > 0) omp_set_num_threads(g_.workers);
  config_ = config_base();

  std::string command;
  const auto t0 = Clock::now();
  try {
    json result;
    if (privileged->parsed()) {
      command = "construct privileged";
      result = cmd_construct();
    } else if (bound->parsed()) {
      command = "bound";
      result = cmd_bound();
    } else if (alpha->parsed()) {
      command = "alpha";
      result = cmd_alpha();
    } else if (graph->parsed()) {
      const std::string op = product->parsed() ? "product" : pow->parsed() ? "power" : "union";
      command = "graph " + op;
      result = cmd_graph(op);
    } else if (build->parsed()) {
      command = "ramsey build";
      result = cmd_ramsey_build();
    } else {
      command = "ramsey verify";
      result = cmd_ramsey_verify();
    }
    const std::chrono::duration<double> elapsed = Clock::now() - t0;
    return emit(command, config_, std::move(result), elapsed.count(), args);
  } catch (const RuntimeFailure& f) {
    const std::chrono::duration<double> elapsed = Clock::now() - t0;
    emit(command, config_, f.result, elapsed.count(), args);
    err_ << "error: " << f.message << '\n';
    return kExitRuntime;
  } catch (const ValidationError& e) {
    err_ << "error: " << e.what() << '\n';
    for (const auto& msg : e.report().errors) err_ << "  " << msg << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::length_error& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  return runner.run(args);
}

}  // namespace privcap::cli
