#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

using nlohmann::json;
using privcap::cli::run_cli;

namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out;
  std::string err;

  json report() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / "privcap_cli_test") {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

void write_c5(const std::string& file) {
  std::ofstream(file) << "c five-cycle\np edge 5 5\ne 1 2\ne 2 3\ne 3 4\ne 4 5\ne 5 1\n";
}

json without_timing(json j) {
  j.erase("timing");
  return j;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"alpha"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"alpha", "/nonexistent/graph.dimacs"}).code != 0);
}

TEST_CASE("alpha and graph power on C5") {
  Scratch tmp;
  const auto c5 = tmp.path("c5.dimacs");
  write_c5(c5);
  const auto a = run({"alpha", c5});
  REQUIRE(a.code == 0);
  const auto ra = a.report();
  CHECK(ra["format_version"] == 1);
  CHECK(ra["command"] == "alpha");
  CHECK(ra["result"]["size"] == 2);
  CHECK(ra["result"]["exact"] == true);
  CHECK(ra.contains("timing"));

  const auto sq = tmp.path("c5sq.dimacs");
  REQUIRE(run({"graph", "power", "--k", "2", c5, "--out", sq}).code == 0);
  const auto b = run({"alpha", sq});
  REQUIRE(b.code == 0);
  CHECK(b.report()["result"]["size"] == 5);
  CHECK(b.report()["result"]["exact"] == true);

  // an exhausted budget is a runtime failure only when exactness is required
  CHECK(run({"alpha", sq, "--budget", "1"}).code == 0);
  const auto strict = run({"alpha", sq, "--budget", "1", "--require-exact"});
  CHECK(strict.code == 1);
  CHECK(strict.report()["result"]["exact"] == false);
}

TEST_CASE("graph union and product") {
  Scratch tmp;
  const auto c5 = tmp.path("c5.dimacs");
  write_c5(c5);
  const auto u = run({"graph", "union", c5, c5, "--out", tmp.path("u.dimacs")});
  REQUIRE(u.code == 0);
  CHECK(u.report()["result"]["vertices"] == 10);
  CHECK(run({"alpha", tmp.path("u.dimacs")}).report()["result"]["size"] == 4);
  const auto p = run({"graph", "product", c5, c5, "--out", tmp.path("p.dimacs")});
  REQUIRE(p.code == 0);
  CHECK(p.report()["result"]["edges"] == 100);
  CHECK(run({"graph", "product", c5, "--out", tmp.path("bad.dimacs")}).code == 2);
}

TEST_CASE("construct privileged and bound") {
  Scratch tmp;
  const auto sys = tmp.path("sys");
  const auto c = run({"construct", "privileged", "--t", "3", "--family", "[[1,2],[1,3],[2,3]]", "--r", "8", "--s", "4",
                      "--primes", "3,5,7", "--out", sys});
  REQUIRE(c.code == 0);
  const auto manifest = c.report()["result"];
  CHECK(manifest["A_sets"] == json::parse("[[3],[5],[7]]"));
  CHECK(manifest["n"] == 70);
  CHECK(fs::exists(tmp.path("sys/system.json")));
  CHECK(fs::exists(tmp.path("sys/G_3.dimacs")));

  const auto priv = run({"bound", "--system", sys, "--coalition", "1,2"});
  REQUIRE(priv.code == 0);
  const auto rp = priv.report()["result"];
  CHECK(rp["verdict"] == "privileged");
  CHECK(rp["lower"].get<double>() == doctest::Approx(std::sqrt(70.0)));

  const auto restricted = run({"bound", "--system", sys, "--coalition", "[1]"});
  REQUIRE(restricted.code == 0);
  const auto rr = restricted.report()["result"];
  CHECK(rr["verdict"] == "restricted");
  CHECK(rr["upper"]["value"] == 37);

  CHECK(run({"bound", "--system", sys, "--coalition", ""}).code == 2);
  CHECK(run({"bound", "--system", sys, "--coalition", "[]"}).code == 2);
  CHECK(run({"bound", "--system", sys, "--coalition", "4"}).code == 2);
}

TEST_CASE("construct privileged at r = 16, s = 8") {
  Scratch tmp;
  const auto sys = tmp.path("desk");
  const auto c = run({"construct", "privileged", "--t", "3", "--family", "[[1,2],[1,3],[2,3]]", "--r", "16", "--s", "8",
                      "--primes", "3,5,7", "--out", sys, "--no-graph-files"});
  REQUIRE(c.code == 0);
  CHECK(c.report()["result"]["n"] == 12870);
  CHECK_FALSE(fs::exists(tmp.path("desk/G_1.dimacs")));
  const auto priv = run({"bound", "--system", sys, "--coalition", "1,2", "--no-verify"});
  REQUIRE(priv.code == 0);
  CHECK(priv.report()["result"]["lower"].get<double>() == doctest::Approx(113.446).epsilon(1e-5));
  const auto one = run({"bound", "--system", sys, "--coalition", "1", "--no-verify"});
  CHECK(one.report()["result"]["upper"]["value"] == 137);
}

TEST_CASE("construct rejects bad input with exit 2") {
  Scratch tmp;
  const auto empty = run({"construct", "privileged", "--t", "3", "--family", "[[1],[]]", "--r", "8", "--s", "4",
                          "--primes", "3,5", "--out", tmp.path("x")});
  CHECK(empty.code == 2);
  CHECK(empty.err.find("family contains the empty set") != std::string::npos);
  CHECK(run({"construct", "privileged", "--t", "3", "--family", "[[1,2]]", "--r", "4", "--s", "8", "--primes", "3,5",
             "--out", tmp.path("x")})
            .code == 2);
  CHECK(run({"construct", "privileged", "--t", "3", "--family", "[[1,2]]", "--r", "8", "--s", "4", "--primes", "3,4",
             "--out", tmp.path("x")})
            .code == 2);
  CHECK(run({"construct", "privileged", "--t", "3", "--r", "8", "--s", "4", "--out", tmp.path("x")}).code == 2);

  std::ofstream(tmp.path("family.json")) << "[[1,2],[3]]";
  const auto from_file = run({"construct", "privileged", "--t", "3", "--family-file", tmp.path("family.json"), "--r",
                              "8", "--s", "4", "--out", tmp.path("y"), "--no-graph-files"});
  REQUIRE(from_file.code == 0);
  // default pool: the primes above 2
  CHECK(from_file.report()["result"]["prime_pool"] == json::parse("[3,5]"));
}

TEST_CASE("ramsey build and verify") {
  Scratch tmp;
  const auto col = tmp.path("col.bin");
  const auto b = run({"ramsey", "build", "--r", "11", "--s", "5", "--primes", "2,3", "--out", col});
  REQUIRE(b.code == 0);
  CHECK(b.report()["result"]["n"] == 462);
  CHECK(b.report()["result"]["well_defined"]["well_defined"] == true);

  const auto v = run({"ramsey", "verify", "--coloring", col, "--mode", "sampled", "--size", "68", "--trials", "200",
                      "--seed", "7"});
  REQUIRE(v.code == 0);
  const auto rv = v.report();
  CHECK(rv["seed"] == 7);
  CHECK(rv["result"]["rainbow"] == true);
  CHECK(rv["result"]["sampled"]["failures"] == 0);

  const auto e = run({"ramsey", "verify", "--coloring", col, "--mode", "exact", "--alpha"});
  REQUIRE(e.code == 0);
  CHECK(e.report()["result"]["certificates"].size() == 2);

  // tiny samples miss a colour: exit 1 with the report still printed
  const auto tiny = run({"ramsey", "verify", "--coloring", col, "--size", "2", "--trials", "5"});
  CHECK(tiny.code == 1);
  CHECK(tiny.report()["result"]["rainbow"] == false);

  CHECK(run({"ramsey", "verify", "--coloring", col, "--size", "1"}).code == 2);
  CHECK(run({"ramsey", "verify", "--coloring", col, "--mode", "fuzzy"}).code == 2);
  CHECK(run({"ramsey", "build", "--r", "40", "--s", "20", "--primes", "3,5", "--out", tmp.path("bad.bin")}).code == 2);
}

TEST_CASE("worker count does not change reports") {
  Scratch tmp;
  const auto col = tmp.path("col.bin");
  REQUIRE(run({"ramsey", "build", "--r", "11", "--s", "5", "--primes", "2,3", "--out", col}).code == 0);
  const std::vector<std::string> verify{"ramsey", "verify", "--coloring", col, "--size", "9", "--trials", "300",
                                        "--seed", "3"};
  auto one = verify;
  one.insert(one.end(), {"--workers", "1"});
  auto four = verify;
  four.insert(four.end(), {"--workers", "4"});
  const auto r1 = run(one);
  const auto r4 = run(four);
  REQUIRE(r1.code == r4.code);
  CHECK(without_timing(r1.report()).dump() == without_timing(r4.report()).dump());

  const auto c5 = tmp.path("c5.dimacs");
  write_c5(c5);
  const auto a1 = run({"alpha", c5, "--workers", "1"});
  const auto a4 = run({"alpha", c5, "--workers", "4"});
  CHECK(without_timing(a1.report()).dump() == without_timing(a4.report()).dump());
}

TEST_CASE("relative outputs land in the output directory") {
  Scratch tmp;
  const auto c5 = tmp.path("c5.dimacs");
  write_c5(c5);
  REQUIRE(run({"graph", "power", c5, "--k", "1", "--out", "copy.dimacs", "--out-dir", tmp.path("")}).code == 0);
  CHECK(fs::exists(tmp.path("copy.dimacs")));

  ::setenv(privcap::cli::kOutDirEnv, tmp.path("").c_str(), 1);
  REQUIRE(run({"graph", "power", c5, "--k", "1", "--out", "env.dimacs", "--report", "env.json"}).code == 0);
  ::unsetenv(privcap::cli::kOutDirEnv);
  CHECK(fs::exists(tmp.path("env.dimacs")));
  std::ifstream is(tmp.path("env.json"));
  CHECK(json::parse(is)["command"] == "graph power");
}
