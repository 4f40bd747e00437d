#include <cstdio>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hopf3/cli.hpp"
#include "hopf3/groups.hpp"
#include "hopf3/json_io.hpp"
#include "hopf3/netcompile.hpp"

using namespace hopf3;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

nlohmann::json run_json(std::vector<std::string> args) {
  args.insert(args.begin(), {"--format", "json"});
  Run r = run(args);
  REQUIRE(r.code == kExitOk);
  return nlohmann::json::parse(r.out);
}

class TempFile {
 public:
  explicit TempFile(const std::string& name) : path_("hopf3_cli_" + name) {}
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  ~TempFile() { std::remove(path_.c_str()); }
  void write(const std::string& text) const { std::ofstream(path_) << text; }
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

TEST_CASE("invariant command") {
  Run r = run({"invariant", "--builtin", "L(7,2)", "--group-algebra", "Z/7"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "value    7\n"));
  CHECK(contains(r.out, "exponent -1\n"));
  r = run({"invariant", "--builtin", "S3", "--group-algebra", "S3"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "value    1\n"));
  r = run({"invariant", "--builtin", "L(3,1)", "--group-algebra", "Z/3", "--formal"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "Δ^{abc} M_{abc}\n"));
  CHECK(contains(r.out, "value    3\n"));

  nlohmann::json j = run_json({"invariant", "--builtin", "L(3,1)", "--group-algebra", "Z/3", "--formal"});
  CHECK(j["value"] == "3");
  CHECK(j["Z"] == "9");
  CHECK(j["exponent"] == -1);
  CHECK(j["formal"] == "Δ^{abc} M_{abc}");
  CHECK(j["algebra"] == "k[Z/3]");
  CHECK(j["diagram"] == "L(3,1)");
  CHECK(j.contains("peak_entries"));
  CHECK(j["sliced_edges"] == 0);

  j = run_json({"invariant", "--builtin", "S1xS2", "--function-algebra", "S3", "--variant", "dual"});
  CHECK(j["value"] == "6");
  CHECK(j["algebra"] == "dual(k[S3]*)");
  j = run_json({"invariant", "--builtin", "S1xS2", "--group-algebra", "Z/4", "--field", "5"});
  CHECK(j["value"] == "4");
  j = run_json({"invariant", "--builtin", "L(5,2)", "--group-algebra", "S3", "--assoc", "right", "--slice"});
  CHECK(j["value"] == "1");
  CHECK(j["peak_entries"].get<std::size_t>() <= 216);
}

TEST_CASE("invariant from files and graph emission") {
  TempFile diagram("diagram.json"), algebra("algebra.json"), graph("graph.json");
  diagram.write(diagram_to_json(lens(5, 1)).dump());
  algebra.write(hopf_to_json(group_algebra(cyclic_group(5))).dump());
  Run r = run({"invariant", "--diagram", diagram.path(), "--hopf", algebra.path(), "--emit-graph", graph.path()});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "value    5\n"));
  ContractionGraph g = graph_from_json(read_json_file(graph.path()));
  CHECK(g == compile_diagram(lens(5, 1)));
}

TEST_CASE("input errors exit 2") {
  CHECK(run({}).code == kExitInvalidInput);
  CHECK(run({"frobnicate"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "S3"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--group-algebra", "S3"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "L(4,2)", "--group-algebra", "S3"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "S3", "--group-algebra", "A5"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "S3", "--group-algebra", "S3", "--field", "4"}).code == kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "S3", "--group-algebra", "S3", "--variant", "twist"}).code ==
        kExitInvalidInput);
  CHECK(run({"invariant", "--builtin", "S3", "--group-algebra", "S3", "--assoc", "middle"}).code ==
        kExitInvalidInput);
  CHECK(run({"invariant", "--diagram", "no_such_file.json", "--group-algebra", "S3"}).code == kExitInvalidInput);
  CHECK(run({"--format", "xml", "invariant", "--builtin", "S3", "--group-algebra", "S3"}).code ==
        kExitInvalidInput);
  Run r = run({"invariant", "--builtin", "L(3,1)", "--group-algebra", "Z/3", "--field", "3"});
  CHECK(r.code == kExitInvalidInput);
  CHECK(contains(r.err, "invalid input"));
  CHECK(run({"--help"}).code == kExitOk);
}

TEST_CASE("resource bound exits 3") {
  Run r = run({"--max-peak", "10", "invariant", "--builtin", "L(5,2)", "--group-algebra", "S3"});
  CHECK(r.code == kExitResource);
  CHECK(contains(r.err, "resource limit"));
  r = run({"--bound", "5", "oracle", "--builtin", "S1xS2", "--group", "S3"});
  CHECK(r.code == kExitResource);
}

TEST_CASE("check command") {
  Run r = run({"check", "--group-algebra", "Q8"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "all checks passed"));
  CHECK(contains(r.out, "PASS involutory"));
  CHECK(contains(r.out, "PASS trace_left_integral"));
  CHECK(contains(r.out, "PASS cotrace_right_cointegral"));
  CHECK(contains(r.out, "PASS semisimple_form_nondegenerate"));
  CHECK(contains(r.out, "PASS ladder_invertible"));

  nlohmann::json j = run_json({"check", "--function-algebra", "D4", "--field", "F_3"});
  CHECK(j["all_passed"] == true);
  CHECK(j["dim"] == 8);

  r = run({"check", "--group-algebra", "Z/3", "--field", "3"});
  CHECK(r.code == kExitInvalidInput);
  CHECK(contains(r.err, "not invertible"));

  TempFile broken("broken.json");
  nlohmann::json h = hopf_to_json(group_algebra(cyclic_group(2)));
  h["M"][0][1][0] = "1";
  broken.write(h.dump());
  r = run({"check", "--hopf", broken.path()});
  CHECK(r.code == kExitFalsified);
  CHECK(contains(r.out, "FAIL associativity at ("));
  CHECK(contains(r.out, "some checks failed"));

  TempFile garbage("garbage.json");
  garbage.write("[1, 2");
  CHECK(run({"check", "--hopf", garbage.path()}).code == kExitInvalidInput);
  TempFile shapeless("shapeless.json");
  shapeless.write(R"({"dim": 2, "M": []})");
  CHECK(run({"check", "--hopf", shapeless.path()}).code == kExitInvalidInput);

  TempFile rot("rotation.json");
  nlohmann::json z3 = hopf_to_json(group_algebra(cyclic_group(3)));
  z3["S"] = nlohmann::json::parse(R"([["0","1","0"],["0","0","1"],["1","0","0"]])");
  rot.write(z3.dump());
  r = run({"check", "--hopf", rot.path(), "--allow-non-involutory"});
  CHECK(contains(r.out, "WARN"));
}

TEST_CASE("fuzz command") {
  Run r = run({"fuzz", "--builtin", "L(7,2)", "--group-algebra", "Z/7", "--moves", "100", "--seed", "42"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "constant 7 over 100 moves"));
  Run again = run({"fuzz", "--builtin", "L(7,2)", "--group-algebra", "Z/7", "--moves", "100", "--seed", "42"});
  CHECK(again.out == r.out);
  r = run({"fuzz", "--builtin", "L(5,2)", "--group-algebra", "Z/5", "--moves", "0"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "constant 5 over 0 moves"));

  nlohmann::json a = run_json({"fuzz", "--builtin", "S1xS2", "--function-algebra", "S3", "--moves", "30",
                               "--seed", "7", "--no-trivial-circles", "--max-crossings", "12"});
  nlohmann::json b = run_json({"fuzz", "--builtin", "S1xS2", "--function-algebra", "S3", "--moves", "30",
                               "--seed", "7", "--no-trivial-circles", "--max-crossings", "12"});
  CHECK(a == b);
  CHECK(a["constant"] == true);
  CHECK(a["initial"] == "6");
  CHECK(a["log"].size() == 30);
  for (const auto& step : a["log"]) {
    CHECK(step["value"] == "6");
    CHECK(step["move"]["kind"] != "trivial_circle");
  }
  CHECK(diagram_from_json(a["final_diagram"]).crossing_count() <= 12);
}

TEST_CASE("oracle command") {
  Run r = run({"oracle", "--builtin", "L(6,1)", "--group", "D4"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "match    L(6,1) x D4: invariant 6, hom count 6"));
  nlohmann::json j = run_json({"oracle", "--builtin", "S1xS2", "--group", "S3"});
  CHECK(j["invariant"] == "6");
  CHECK(j["hom_count"] == 6);
  CHECK(j["match"] == true);
  CHECK(run({"oracle", "--builtin", "S1xS2"}).code == kExitInvalidInput);
  CHECK(run({"oracle", "--grid", "--group", "S3"}).code == kExitInvalidInput);
  TempFile untagged("untagged.json");
  untagged.write(diagram_to_json(add_trivial_circle(lens(3, 1), Family::lower)).dump());
  CHECK(run({"oracle", "--diagram", untagged.path(), "--group", "S3"}).code == kExitInvalidInput);
  TempFile tagged("tagged.json");
  tagged.write(diagram_to_json(lens(4, 1)).dump());
  r = run({"oracle", "--diagram", tagged.path(), "--group", "Q8"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "hom count 8"));
}

TEST_CASE("oracle grid") {
  Run r = run({"--threads", "4", "oracle", "--grid"});
  CHECK(r.code == kExitOk);
  CHECK(contains(r.out, "260 cells, all match"));
  nlohmann::json j = run_json({"--threads", "2", "oracle", "--grid"});
  CHECK(j["all_match"] == true);
  CHECK(j["cells"].size() == 260);
}
