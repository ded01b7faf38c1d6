#include <filesystem>
#include <thread>
#include <unistd.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "source_bundle.hpp"
#include "ceramdw/scenario.hpp"
#include "ceramdw/service.hpp"

using namespace ceramdw;
using service::json;
using service::Service;

namespace {

std::string dataset_body(const FileSet& files, std::string_view format = "csv_bundle") {
  return json{{"format", format}, {"files", files}}.dump();
}

const FileSet& acceptance_files() {
  static const FileSet files = scenario::generate(scenario::GeneratorManifest::defaults());
  return files;
}

std::string query_body(std::string_view cql) { return json{{"cql", cql}}.dump(); }

std::map<std::string, std::string> by_label(const json& result) {
  std::map<std::string, std::string> out;
  for (const auto& row : result.at("rows")) out[row.at("members")[0].at("label")] = row.at("value");
  return out;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag)
      : path(std::filesystem::temp_directory_path() / ("ceramdw_" + tag + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("POST /datasets: empty bundle names the missing file") {
  Service svc;
  const auto r = svc.post_dataset(dataset_body(FileSet{}));
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "MissingFile");
  CHECK(r.body.at("file") == "samples.csv");
  CHECK(svc.size() == 0);
}

TEST_CASE("POST /datasets: the acceptance bundle registers a cube") {
  Service svc;
  const auto r = svc.post_dataset(dataset_body(acceptance_files()));
  REQUIRE(r.status == 200);
  CHECK(r.body.at("cube_id") == "1");
  CHECK(r.body.at("validation_report") == json::array());
  CHECK(r.body.at("fact_count") == "4810");
  CHECK(r.body.at("sample_count") == "420");
  CHECK(svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id") == "2");
  const auto list = svc.list_cubes();
  CHECK(list.body.at("cubes").size() == 2);
  CHECK(list.body.at("cubes")[1].at("fact_count") == "4810");
}

TEST_CASE("POST /datasets: JSON bundles") {
  Service svc;
  const auto r = svc.post_dataset(dataset_body(fx::source_bundle(fx::small_dataset(), BundleFormat::json_bundle),
                                               "json_bundle"));
  REQUIRE(r.status == 200);
  CHECK(r.body.at("fact_count") == "9");
  CHECK(r.body.at("sample_count") == "5");
}

TEST_CASE("POST /datasets: record-level failures") {
  Service svc;
  auto files = acceptance_files();
  files["samples.csv"] += "S00001,D00001,L001,DT-BYZ,G-ZX,\n";
  auto r = svc.post_dataset(dataset_body(files));
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "DuplicateId");
  REQUIRE(r.body.at("validation_report").size() == 1);
  CHECK(r.body.at("validation_report")[0].at("rule") == "duplicate_id");
  CHECK(r.body.at("validation_report")[0].at("record_id") == "S00001");

  auto ds = fx::small_dataset();
  ds.analyses[0].value = fx::dec("-1.2");
  ds.samples[1].provenance_ref = "L99";
  r = svc.post_dataset(dataset_body(fx::source_bundle(ds)));
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "ValidationFailed");
  REQUIRE(r.body.at("validation_report").size() == 2);
  CHECK(r.body.at("validation_report")[0] ==
        json{{"record_type", "analysis"}, {"record_id", "A01"}, {"rule", "value_nonneg"}, {"detail", "-1.2"}});
  CHECK(r.body.at("validation_report")[1].at("rule") == "ref_integrity");

  files = fx::source_bundle(fx::small_dataset());
  files["analyses.csv"] += "A99,S1,CHEMISTRY,Al,abc,wt_percent,r1\n";
  r = svc.post_dataset(dataset_body(files));
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "MalformedRow");
  CHECK(r.body.at("file") == "analyses.csv");
  CHECK(r.body.at("line") == "11");
  CHECK(svc.size() == 0);
}

TEST_CASE("POST /datasets: malformed requests") {
  Service svc;
  for (const char* body : {"", "not json", "[1]", R"({"files": []})", R"({"files": {"a.csv": 1}})",
                           R"({"format": "xml", "files": {}})", R"({"format": 3, "files": {}})"}) {
    const auto r = svc.post_dataset(body);
    CHECK_MESSAGE(r.status == 400, body);
    CHECK(r.body.at("error") == "BadRequest");
  }
}

TEST_CASE("GET metadata") {
  Service svc;
  const auto id = svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id").get<std::string>();
  const auto r = svc.metadata(id);
  REQUIRE(r.status == 200);
  CHECK(r.body.at("cube_id") == id);
  CHECK(r.body.at("fact_count") == "4810");
  const auto& dims = r.body.at("dimensions");
  REQUIRE(dims.size() == 5);
  std::vector<std::string> names;
  for (const auto& d : dims) names.push_back(d.at("name"));
  CHECK(names == std::vector<std::string>{"provenance", "dating", "description", "groups", "technique"});

  // Member counts agree with a scan of the star's dimension rows.
  const auto star = build_star(parse_source(acceptance_files(), BundleFormat::csv_bundle));
  std::set<std::string> countries, periods, groups;
  for (const auto& f : star.facts) {
    countries.insert(star.provenance(f.provenance_key).country.label);
    periods.insert(star.dating(f.dating_key).period.label);
    groups.insert(star.group(f.group_key).name.label);
  }
  CHECK(dims[0].at("levels")[3].at("member_count") == std::to_string(countries.size()));
  CHECK(dims[1].at("levels")[1].at("member_count") == std::to_string(periods.size()));
  CHECK(dims[3].at("levels")[0].at("member_count") == std::to_string(groups.size()));
  CHECK(dims[4].at("levels")[0].at("member_count") == "3");

  CHECK(svc.metadata("99").status == 404);
  CHECK(svc.metadata("abc").status == 404);
  CHECK(svc.metadata("99").body.at("error") == "NotFound");
}

TEST_CASE("POST query: scenario results and errors") {
  Service svc;
  const auto id = svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id").get<std::string>();

  auto r = svc.query(id, query_body(scenario::kTypologyQuery));
  REQUIRE(r.status == 200);
  CHECK(r.body.at("totals").at("value") == "163");
  CHECK(by_label(r.body).at("Greece") == "45");
  CHECK(r.body.at("elapsed_ms").is_string());
  CHECK(std::stod(r.body.at("elapsed_ms").get<std::string>()) >= 0);
  r = svc.query(id, query_body(scenario::kChemicalQuery));
  CHECK(r.body.at("totals").at("value") == "87");
  CHECK(by_label(r.body).at("France") == "2");

  r = svc.query(id, query_body("MEASURE count WHERE dating.period \"Medieval\""));
  CHECK(r.status == 400);
  CHECK(r.body.at("error") == "SyntaxError");
  CHECK(r.body.at("span") == json{{"begin", "34"}, {"end", "44"}});
  CHECK(!r.body.at("expected").empty());

  r = svc.query(id, query_body("MEASURE count GROUP BY material"));
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "SemanticError");
  CHECK(r.body.at("span") == json{{"begin", "14"}, {"end", "31"}});

  CHECK(svc.query(id, "{}").status == 400);
  CHECK(svc.query(id, R"({"cql": 5})").status == 400);
  CHECK(svc.query("42", query_body("MEASURE count")).status == 404);
}

TEST_CASE("GET compare") {
  Service svc;
  const auto id = svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id").get<std::string>();
  const std::string typo(scenario::kTypologyQuery), chem(scenario::kChemicalQuery);
  auto r = svc.compare(id, typo, chem, "provenance.country");
  REQUIRE(r.status == 200);
  CHECK(r.body.at("labels").size() == 7);
  CHECK(r.body.at("left").at("total") == "163");
  CHECK(r.body.at("right").at("total") == "87");

  const std::string france = R"(MEASURE count WHERE provenance.country = "France" GROUP BY provenance AT country)";
  r = svc.compare(id, france, chem, "provenance.country");
  REQUIRE(r.status == 200);
  const auto& labels = r.body.at("labels");
  const auto& left = r.body.at("left").at("values");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].at("label") != "France") CHECK(left[i] == "0");
  }

  r = svc.compare(id, typo, "MEASURE count GROUP BY provenance AT site", "provenance.country");
  CHECK(r.status == 422);
  CHECK(r.body.at("error") == "AxisMismatch");
  r = svc.compare(id, typo, chem, "provenance");
  CHECK(r.status == 422);
  r = svc.compare(id, "MEASURE", chem, "provenance.country");
  CHECK(r.status == 400);
  CHECK(r.body.at("side") == "left");
  r = svc.compare(id, typo, "MEASURE count GROUP BY nothing", "provenance.country");
  CHECK(r.status == 422);
  CHECK(r.body.at("side") == "right");
  CHECK(svc.compare(id, typo, std::nullopt, "provenance.country").status == 400);
  CHECK(svc.compare("7", typo, chem, "provenance.country").status == 404);
}

TEST_CASE("concurrent queries return identical results") {
  Service svc;
  const auto id = svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id").get<std::string>();
  const std::vector<std::string> queries{std::string(scenario::kTypologyQuery), std::string(scenario::kChemicalQuery),
                                         "MEASURE avg OF CHEMISTRY.Al IN ppm GROUP BY dating AT period",
                                         "MEASURE count(analyses) GROUP BY technique GROUP BY provenance AT region"};
  std::vector<json> expected;
  for (const auto& q : queries) {
    auto body = svc.query(id, query_body(q)).body;
    body.erase("elapsed_ms");
    expected.push_back(body);
  }
  std::vector<std::thread> threads;
  std::vector<int> mismatches(8, 0);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int k = 0; k < 20; ++k) {
        const std::size_t q = static_cast<std::size_t>(t + k) % queries.size();
        auto body = svc.query(id, query_body(queries[q])).body;
        body.erase("elapsed_ms");
        mismatches[static_cast<std::size_t>(t)] += body != expected[q];
      }
    });
  }
  // A registration while readers run.
  CHECK(svc.post_dataset(dataset_body(fx::source_bundle(fx::small_dataset()))).status == 200);
  for (auto& th : threads) th.join();
  for (int m : mismatches) CHECK(m == 0);
}

TEST_CASE("state directory snapshots survive a restart") {
  TempDir dir("state");
  {
    Service svc(dir.path.string());
    CHECK(svc.post_dataset(dataset_body(fx::source_bundle(fx::small_dataset()))).body.at("cube_id") == "1");
    CHECK(svc.post_dataset(dataset_body(acceptance_files())).body.at("cube_id") == "2");
  }
  CHECK(std::filesystem::is_directory(dir.path / "1"));
  CHECK(!std::filesystem::exists(dir.path / "1.tmp"));
  Service reloaded(dir.path.string());
  CHECK(reloaded.size() == 2);
  const auto r = reloaded.query("2", query_body(scenario::kTypologyQuery));
  CHECK(r.body.at("totals").at("value") == "163");
  CHECK(reloaded.metadata("1").body.at("fact_count") == "9");
  CHECK(reloaded.post_dataset(dataset_body(fx::source_bundle(fx::small_dataset()))).body.at("cube_id") == "3");
}

TEST_CASE("HTTP routes over a localhost socket") {
  Service svc;
  service::HttpServer server(svc);
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread th([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/cubes");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("cubes").empty());
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");

  res = client.Post("/datasets", dataset_body(acceptance_files()), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const std::string id = json::parse(res->body).at("cube_id");

  httplib::MultipartFormDataItems items;
  for (const auto& [name, text] : fx::source_bundle(fx::small_dataset()))
    items.push_back({"files", text, name, "text/csv"});
  items.push_back({"format", "csv_bundle", "", ""});
  res = client.Post("/datasets", items);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("fact_count") == "9");

  res = client.Get("/cubes/" + id + "/metadata");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("dimensions").size() == 5);

  res = client.Post("/cubes/" + id + "/query", query_body(scenario::kChemicalQuery), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("totals").at("value") == "87");

  res = client.Post("/cubes/" + id + "/query", query_body("MEASURE count GROUP provenance"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);
  CHECK(json::parse(res->body).at("error") == "SyntaxError");

  httplib::Params params{{"left", std::string(scenario::kTypologyQuery)},
                         {"right", std::string(scenario::kChemicalQuery)},
                         {"axis", "provenance.country"}};
  res = client.Get("/cubes/" + id + "/chart/compare", params, httplib::Headers{});
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).at("right").at("total") == "87");

  res = client.Get("/cubes/999/metadata");
  REQUIRE(res);
  CHECK(res->status == 404);
  res = client.Get("/nowhere");
  REQUIRE(res);
  CHECK(res->status == 404);
  CHECK(json::parse(res->body).at("error") == "NotFound");
  res = client.Options("/datasets");
  REQUIRE(res);
  CHECK(res->status == 204);

  server.stop();
  th.join();
}
