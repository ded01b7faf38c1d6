#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return out + "'";
}

class Workspace {
 public:
  Workspace() {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("ceramdw_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

  Run run(const std::vector<std::string>& args) const {
    std::string cmd = quote(CERAMDW_CLI);
    for (const auto& a : args) cmd += " " + quote(a);
    const fs::path err = dir_ / "stderr.txt";
    cmd += " 2>" + quote(err.string());
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path dir_;
};

// A workspace holding a generated source bundle and its ingested star.
const Workspace& prepared() {
  static const Workspace ws = [] {
    Workspace w;
    const Run gen = w.run({"generate", "--out", w.path("src").string()});
    REQUIRE_MESSAGE(gen.code == 0, gen.err);
    const Run ing = w.run({"ingest", w.path("src").string(), "--out", w.path("star").string()});
    REQUIRE_MESSAGE(ing.code == 0, ing.err);
    return w;
  }();
  return ws;
}

std::string star() { return prepared().path("star").string(); }

std::string scenario_file(const char* name) { return (fs::path(CERAMDW_SOURCE_DIR) / "scenarios" / name).string(); }

}  // namespace

TEST_CASE("help exits cleanly and a missing subcommand is a usage error") {
  Workspace ws;
  const Run help = ws.run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("generate") != std::string::npos);
  CHECK(help.out.find("serve") != std::string::npos);
  CHECK(ws.run({}).code == 2);
  CHECK(ws.run({"query", "--cql", "MEASURE count"}).code == 2);
  CHECK(ws.run({"frobnicate"}).code == 2);
}

TEST_CASE("generate and ingest report what they wrote") {
  Workspace ws;
  const Run gen = ws.run({"generate", "--seed", "7", "--out", ws.path("src").string()});
  REQUIRE(gen.code == 0);
  CHECK(gen.out.find("seed 7") != std::string::npos);
  CHECK(fs::exists(ws.path("src") / "samples.csv"));
  CHECK(fs::exists(ws.path("src") / "manifest.json"));

  const Run ing = ws.run({"ingest", ws.path("src").string(), "--out", ws.path("star").string(), "--star-format",
                          "json_bundle"});
  REQUIRE_MESSAGE(ing.code == 0, ing.err);
  CHECK(ing.out.find("ingested 420 samples") != std::string::npos);
  CHECK(fs::exists(ws.path("star") / "facts.json"));

  // Both star formats answer the same query identically.
  const std::vector<std::string> q{"--cql", "MEASURE count(facts) GROUP BY technique", "--format", "csv"};
  auto args = std::vector<std::string>{"query", ws.path("star").string()};
  args.insert(args.end(), q.begin(), q.end());
  const Run json_star = ws.run(args);
  REQUIRE(ws.run({"ingest", ws.path("src").string(), "--out", ws.path("star_csv").string()}).code == 0);
  args[1] = ws.path("star_csv").string();
  const Run csv_star = ws.run(args);
  CHECK(json_star.code == 0);
  CHECK(json_star.out == csv_star.out);
}

TEST_CASE("query counts every fact of the acceptance bundle") {
  const Run r = prepared().run({"query", star(), "--cql", "MEASURE count(facts)", "--format", "json"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("totals").at("value") == "4810");

  const Run table = prepared().run({"query", star(), "--cql", "measure count group by provenance at country"});
  CHECK(table.code == 0);
  CHECK(table.out.find("TOTAL") != std::string::npos);
  CHECK(table.out.find("provenance.country") != std::string::npos);

  const Run file = prepared().run({"query", star(), "--cql", scenario_file("zeuxippus_typology.cql"), "--format",
                                   "json"});
  CHECK(file.code == 0);
  CHECK(nlohmann::json::parse(file.out).at("totals").at("value") == "163");
}

TEST_CASE("CQL errors exit 2 and underline the span") {
  const Run syntax = prepared().run({"query", star(), "--cql", "MEASURE count GROUP provenance"});
  CHECK(syntax.code == 2);
  CHECK(syntax.out.empty());
  CHECK(syntax.err.find("syntax error at offset 20") != std::string::npos);
  CHECK(syntax.err.find("                      ^") != std::string::npos);

  const Run semantic = prepared().run({"query", star(), "--cql", "MEASURE sum OF CHEMISTRY.Unobtainium"});
  CHECK(semantic.code == 2);
  CHECK(semantic.err.find("^") != std::string::npos);
}

TEST_CASE("scenario replay prints both series and is byte-stable") {
  const Run table = prepared().run({"scenario", "zeuxippus", star()});
  REQUIRE_MESSAGE(table.code == 0, table.err);
  CHECK(table.out.find("163") != std::string::npos);
  CHECK(table.out.find("87") != std::string::npos);

  const Run a = prepared().run({"scenario", "zeuxippus", star(), "--format", "json"});
  const Run b = prepared().run({"scenario", "zeuxippus", star(), "--format", "json"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = nlohmann::json::parse(a.out);
  CHECK(j.at("typological").at("totals").at("value") == "163");
  CHECK(j.at("chemical").at("totals").at("value") == "87");
}

TEST_CASE("chart compare writes paired series or rejects mismatched axes") {
  const auto& ws = prepared();
  const std::string out = ws.path("compare.json").string();
  const Run r = ws.run({"chart", "compare", star(), "--left", scenario_file("zeuxippus_typology.cql"), "--right",
                        scenario_file("zeuxippus_chemical.cql"), "--axis", "provenance.country", "--out", out});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto j = nlohmann::json::parse(slurp(out));
  CHECK(j.at("axis") == "provenance.country");
  CHECK(j.at("left").at("total") == "163");
  CHECK(j.at("right").at("total") == "87");
  CHECK(j.at("labels").size() == j.at("left").at("values").size());

  const Run bad = ws.run({"chart", "compare", star(), "--left", "MEASURE count GROUP BY provenance AT site",
                          "--right", scenario_file("zeuxippus_chemical.cql"), "--axis", "provenance.country"});
  CHECK(bad.code == 2);
}

TEST_CASE("an inconsistent manifest exits 2") {
  Workspace ws;
  spit(ws.path("m.json"), R"({"total_samples": 10})");
  const Run r = ws.run({"generate", "--manifest", ws.path("m.json").string(), "--out", ws.path("out").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("invalid manifest") != std::string::npos);
}

TEST_CASE("validation failures exit 1 with a report") {
  Workspace ws;
  REQUIRE(ws.run({"generate", "--out", ws.path("src").string()}).code == 0);
  fs::create_directories(ws.path("vocab"));
  spit(ws.path("vocab") / "categories.txt", "Nothing Known\n");
  const Run r = ws.run({"ingest", ws.path("src").string(), "--out", ws.path("star").string(), "--vocabulary",
                        ws.path("vocab").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("validation violation(s)") != std::string::npos);
  CHECK(!fs::exists(ws.path("star") / "facts.csv"));

  fs::remove(ws.path("src") / "samples.csv");
  const Run missing = ws.run({"ingest", ws.path("src").string(), "--out", ws.path("star2").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("samples.csv") != std::string::npos);
}
