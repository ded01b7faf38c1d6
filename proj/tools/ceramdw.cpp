// ceramdw: command-line entry point.
//
// Exit codes: 0 success, 1 data or validation failure, 2 usage or CQL error.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ceramdw/cql.hpp"
#include "ceramdw/etl.hpp"
#include "ceramdw/report.hpp"
#include "ceramdw/scenario.hpp"
#include "ceramdw/service.hpp"

namespace fs = std::filesystem;
using namespace ceramdw;

namespace {

constexpr int kOk = 0;
constexpr int kDataError = 1;
constexpr int kUsageError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingFile(p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --cql accepts a path or the query text itself.
std::string cql_argument(const std::string& arg) {
  std::error_code ec;
  if (arg.find('\n') == std::string::npos && arg.size() < 4096 && fs::is_regular_file(arg, ec))
    return read_file(arg);
  return arg;
}

StarSchema load_star(const std::string& dir) {
  FileSet files = read_directory(dir);
  const auto format = files.contains("facts.json") && !files.contains("facts.csv")
                          ? BundleFormat::json_bundle
                          : BundleFormat::csv_bundle;
  return import_star(files, format);
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

// Prints the offending line with the span underlined.
void print_span(std::ostream& err, std::string_view query, cql::SourceSpan span) {
  const std::size_t begin = std::min(span.begin, query.size());
  std::size_t line_start = begin == 0 ? std::string_view::npos : query.rfind('\n', begin - 1);
  line_start = line_start == std::string_view::npos ? 0 : line_start + 1;
  std::size_t line_end = query.find('\n', begin);
  if (line_end == std::string_view::npos) line_end = query.size();
  const std::string_view line = query.substr(line_start, line_end - line_start);
  const std::size_t end = std::clamp(span.end, begin, line_end);
  const std::size_t lead = utf8_length(query.substr(line_start, begin - line_start));
  const std::size_t width = std::max<std::size_t>(1, utf8_length(query.substr(begin, end - begin)));
  err << "  " << line << "\n  " << std::string(lead, ' ') << std::string(width, '^') << "\n";
}

ResultTable run_cql(const std::string& text, const CubePtr& cube) {
  try {
    return cql::plan_and_execute(cql::parse(text), cube);
  } catch (const cql::SyntaxError& e) {
    std::ostringstream msg;
    msg << "syntax error at offset " << e.span().begin << ": " << e.what() << "\n";
    print_span(msg, text, e.span());
    throw UsageError(msg.str());
  } catch (const cql::SemanticError& e) {
    std::ostringstream msg;
    msg << "error: " << e.what() << "\n";
    print_span(msg, text, e.span());
    throw UsageError(msg.str());
  }
}

void print_result(const ResultTable& table, const std::string& format) {
  if (format == "csv") {
    std::cout << report::render_csv(table);
  } else if (format == "json") {
    std::cout << report::stable_dump(report::result_json(table));
  } else {
    std::cout << report::render_table(table);
  }
}

void print_report(const ValidationReport& report) {
  std::cerr << report.size() << " validation violation(s)\n";
  for (const auto& v : report)
    std::cerr << "  " << v.record_type << " " << v.record_id << ": " << v.rule << " (" << v.detail << ")\n";
}

service::HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ceramic data warehouse: ingest bundles, query cubes with CQL, serve the API"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a deterministic synthetic source bundle");
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out, gen_manifest;
  gen->add_option("--seed", gen_seed, "Random seed (overrides the manifest)");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--manifest", gen_manifest, "Generator manifest (JSON)")->check(CLI::ExistingFile);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a source bundle and write its star schema");
  std::string in_dir, in_out, in_format = "csv_bundle", in_vocab;
  std::string in_star_format = "csv_bundle";
  ingest->add_option("dir", in_dir, "Source bundle directory")->required()->check(CLI::ExistingDirectory);
  ingest->add_option("--out", in_out, "Star bundle directory")->required();
  ingest->add_option("--format", in_format, "Source format")->check(CLI::IsMember({"csv_bundle", "json_bundle"}));
  ingest->add_option("--star-format", in_star_format, "Star bundle format")
      ->check(CLI::IsMember({"csv_bundle", "json_bundle"}));
  ingest->add_option("--vocabulary", in_vocab, "Directory with categories.txt and periods.txt")
      ->check(CLI::ExistingDirectory);

  // query
  auto* query = app.add_subcommand("query", "Run a CQL query against a star bundle");
  std::string q_star, q_cql, q_format = "table";
  query->add_option("star-dir", q_star, "Star bundle directory")->required()->check(CLI::ExistingDirectory);
  query->add_option("--cql", q_cql, "Query text or a file containing it")->required();
  query->add_option("--format", q_format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));

  // scenario
  auto* scen = app.add_subcommand("scenario", "Replay a canonical analysis");
  scen->require_subcommand(1);
  auto* zeux = scen->add_subcommand("zeuxippus", "Typological and chemical Zeuxippus Ware distributions");
  std::string z_star, z_format = "table";
  zeux->add_option("star-dir", z_star, "Star bundle directory")->required()->check(CLI::ExistingDirectory);
  zeux->add_option("--format", z_format, "Output format")->check(CLI::IsMember({"table", "csv", "json"}));

  // chart
  auto* chart = app.add_subcommand("chart", "Emit chart data");
  chart->require_subcommand(1);
  auto* cmp = chart->add_subcommand("compare", "Paired series of two queries over one axis");
  std::string c_star, c_left, c_right, c_axis, c_out;
  cmp->add_option("star-dir", c_star, "Star bundle directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--left", c_left, "Left query text or file")->required();
  cmp->add_option("--right", c_right, "Right query text or file")->required();
  cmp->add_option("--axis", c_axis, "Shared axis, dim.level")->required();
  cmp->add_option("--out", c_out, "Output JSON file (default: standard output)");

  // serve
  auto* serve = app.add_subcommand("serve", "Serve the HTTP JSON API");
  int s_port = 8080;
  std::string s_host = "127.0.0.1", s_state;
  std::vector<std::string> s_load;
  serve->add_option("--port", s_port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", s_host, "Bind address");
  serve->add_option("--state-dir", s_state, "Snapshot registered cubes here and reload them on start");
  serve->add_option("--load", s_load, "Star bundle directories to register at start")
      ->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*gen) {
      auto manifest = gen_manifest.empty() ? scenario::GeneratorManifest::defaults()
                                           : scenario::manifest_from_json(read_file(gen_manifest));
      if (gen_seed) manifest.seed = *gen_seed;
      write_directory(gen_out, scenario::generate(manifest));
      std::cout << "wrote " << gen_out << " (seed " << manifest.seed << ", " << manifest.total_samples
                << " samples)\n";
    } else if (*ingest) {
      BuildOptions options;
      if (!in_vocab.empty()) {
        const fs::path dir(in_vocab);
        options.vocabulary.categories = Vocabulary::parse_list(read_file(dir / "categories.txt"));
        options.vocabulary.periods =
            fs::exists(dir / "periods.txt") ? Vocabulary::parse_list(read_file(dir / "periods.txt"))
                                            : std::vector<std::string>{};
      }
      const Dataset ds = parse_source(read_directory(in_dir), *parse_bundle_format(in_format));
      const StarSchema star = build_star(ds, options);
      write_directory(in_out, export_star(star, *parse_bundle_format(in_star_format)));
      std::cout << "ingested " << ds.samples.size() << " samples, " << star.facts.size() << " facts into "
                << in_out << "\n";
    } else if (*query) {
      const CubePtr cube = build_cube(load_star(q_star));
      print_result(run_cql(cql_argument(q_cql), cube), q_format);
    } else if (*zeux) {
      const CubePtr cube = build_cube(load_star(z_star));
      const auto typology = run_cql(std::string(scenario::kTypologyQuery), cube);
      const auto chemical = run_cql(std::string(scenario::kChemicalQuery), cube);
      if (z_format == "json") {
        std::cout << report::stable_dump(report::json{{"typological", report::result_json(typology)},
                                                      {"chemical", report::result_json(chemical)}});
      } else {
        std::cout << "Typological classification (description contains \"Zeuxippus\", Medieval)\n";
        print_result(typology, z_format);
        std::cout << "\nChemical classification (" << scenario::kStrictoSensuGroup << ")\n";
        print_result(chemical, z_format);
      }
    } else if (*cmp) {
      const CubePtr cube = build_cube(load_star(c_star));
      const std::string left = cql_argument(c_left), right = cql_argument(c_right);
      const auto l = run_cql(left, cube);
      const auto r = run_cql(right, cube);
      const std::string out = report::stable_dump(report::compare_json(l, r, report::parse_axis(c_axis), left, right));
      if (c_out.empty()) {
        std::cout << out;
      } else {
        std::ofstream f(c_out, std::ios::binary | std::ios::trunc);
        if (!f) throw Error("cannot write " + c_out);
        f << out;
      }
    } else if (*serve) {
      service::Service svc(s_state.empty() ? std::nullopt : std::optional<std::string>(s_state));
      for (const auto& dir : s_load) {
        const auto id = svc.register_star(load_star(dir));
        std::cout << "registered " << dir << " as cube " << id << "\n";
      }
      service::HttpServer server(svc);
      const int port = server.bind(s_host, s_port);
      if (port < 0) {
        std::cerr << "error: cannot bind " << s_host << ":" << s_port << "\n";
        return kDataError;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "listening on http://" << s_host << ":" << port << std::endl;
      server.listen();
      g_server = nullptr;
    }
  } catch (const UsageError& e) {
    std::cerr << e.what();
    return kUsageError;
  } catch (const report::AxisMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const InvalidManifest& e) {
    std::cerr << "error: invalid manifest: " << e.what() << "\n";
    return kUsageError;
  } catch (const ValidationFailed& e) {
    print_report(e.report());
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}
