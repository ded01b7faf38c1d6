#include "ceramdw/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <variant>

#include "ceramdw/cql.hpp"
#include "ceramdw/report.hpp"
#include "ceramdw/validate.hpp"
#include "httplib.h"

namespace ceramdw::service {

namespace fs = std::filesystem;

json error_body(std::string_view kind, std::string_view message) {
  return json{{"error", std::string(kind)}, {"message", std::string(message)}};
}

namespace {

Response fail(int status, std::string_view kind, std::string_view message) {
  return Response{status, error_body(kind, message)};
}

json violation_json(const Violation& v) {
  return json{{"record_type", v.record_type},
              {"record_id", v.record_id},
              {"rule", v.rule},
              {"detail", v.detail}};
}

json report_json(const ValidationReport& report) {
  json out = json::array();
  for (const auto& v : report) out.push_back(violation_json(v));
  return out;
}

json span_json(const cql::SourceSpan& s) {
  return json{{"begin", std::to_string(s.begin)}, {"end", std::to_string(s.end)}};
}

Response syntax_error(const cql::SyntaxError& e, std::string_view side = {}) {
  Response r = fail(400, "SyntaxError", e.what());
  r.body["span"] = span_json(e.span());
  r.body["expected"] = e.expected();
  if (!side.empty()) r.body["side"] = std::string(side);
  return r;
}

Response semantic_error(const cql::SemanticError& e, std::string_view side = {}) {
  Response r = fail(422, "SemanticError", e.what());
  r.body["span"] = span_json(e.span());
  if (!side.empty()) r.body["side"] = std::string(side);
  return r;
}

std::optional<std::uint64_t> parse_id(const std::string& id) {
  if (id.empty() || id.size() > 18) return std::nullopt;
  std::uint64_t v = 0;
  for (char c : id) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

}  // namespace

Service::Service(std::optional<std::string> state_dir) : state_dir_(std::move(state_dir)) {
  if (state_dir_) load_state();
}

void Service::load_state() {
  fs::create_directories(*state_dir_);
  std::vector<std::pair<std::uint64_t, fs::path>> snapshots;
  for (const auto& entry : fs::directory_iterator(*state_dir_)) {
    if (!entry.is_directory()) continue;
    if (auto id = parse_id(entry.path().filename().string())) snapshots.emplace_back(*id, entry.path());
  }
  std::sort(snapshots.begin(), snapshots.end());
  for (const auto& [id, path] : snapshots) {
    StarSchema star = import_star(read_directory(path.string()), BundleFormat::csv_bundle);
    cubes_[id] = build_cube(star);
    next_id_ = std::max(next_id_, id + 1);
  }
}

std::string Service::register_star(const StarSchema& star) {
  CubePtr cube = build_cube(star);
  std::unique_lock lock(mutex_);
  const std::uint64_t id = next_id_++;
  if (state_dir_) {
    const fs::path tmp = fs::path(*state_dir_) / (std::to_string(id) + ".tmp");
    fs::remove_all(tmp);
    write_directory(tmp.string(), export_star(star, BundleFormat::csv_bundle));
    fs::rename(tmp, fs::path(*state_dir_) / std::to_string(id));
  }
  cubes_[id] = std::move(cube);
  return std::to_string(id);
}

CubePtr Service::find(const std::string& cube_id) const {
  auto id = parse_id(cube_id);
  if (!id) return nullptr;
  std::shared_lock lock(mutex_);
  auto it = cubes_.find(*id);
  return it == cubes_.end() ? nullptr : it->second;
}

std::size_t Service::size() const {
  std::shared_lock lock(mutex_);
  return cubes_.size();
}

Response Service::post_dataset(std::string_view body) {
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object())
    return fail(400, "BadRequest", "body must be a JSON object");
  BundleFormat format = BundleFormat::csv_bundle;
  if (auto it = doc.find("format"); it != doc.end()) {
    if (!it->is_string()) return fail(400, "BadRequest", "\"format\" must be a string");
    auto f = parse_bundle_format(it->get<std::string>());
    if (!f) return fail(400, "BadRequest", "unknown format " + it->dump());
    format = *f;
  }
  auto files_it = doc.find("files");
  if (files_it == doc.end() || !files_it->is_object())
    return fail(400, "BadRequest", "\"files\" must be an object of file name to text");
  FileSet files;
  for (auto it = files_it->begin(); it != files_it->end(); ++it) {
    if (!it->is_string()) return fail(400, "BadRequest", "file " + it.key() + " must be a string");
    files[it.key()] = it->get<std::string>();
  }
  return post_dataset(files, format);
}

Response Service::post_dataset(const FileSet& files, BundleFormat format) {
  StarSchema star;
  try {
    star = build_star(parse_source(files, format));
  } catch (const MissingFile& e) {
    Response r = fail(422, "MissingFile", e.what());
    r.body["file"] = e.name();
    r.body["validation_report"] = json::array();
    return r;
  } catch (const MalformedRow& e) {
    Response r = fail(422, "MalformedRow", e.what());
    r.body["file"] = e.file();
    r.body["line"] = std::to_string(e.line());
    r.body["validation_report"] = json::array();
    return r;
  } catch (const DuplicateId& e) {
    Response r = fail(422, "DuplicateId", e.what());
    r.body["validation_report"] =
        report_json({Violation{e.type(), e.id(), std::string(rule::duplicate_id), "id appears more than once"}});
    return r;
  } catch (const ValidationFailed& e) {
    Response r = fail(422, "ValidationFailed", e.what());
    r.body["validation_report"] = report_json(e.report());
    return r;
  }
  const std::string id = register_star(star);
  std::size_t samples = 0;
  if (auto cube = find(id)) samples = cube->sample_count();
  return Response{200, json{{"cube_id", id},
                            {"validation_report", json::array()},
                            {"fact_count", std::to_string(star.facts.size())},
                            {"sample_count", std::to_string(samples)}}};
}

Response Service::list_cubes() const {
  json list = json::array();
  std::shared_lock lock(mutex_);
  for (const auto& [id, cube] : cubes_) {
    list.push_back(json{{"cube_id", std::to_string(id)},
                        {"fact_count", std::to_string(cube->fact_count())},
                        {"sample_count", std::to_string(cube->sample_count())}});
  }
  return Response{200, json{{"cubes", std::move(list)}}};
}

Response Service::metadata(const std::string& cube_id) const {
  CubePtr cube = find(cube_id);
  if (!cube) return fail(404, "NotFound", "no cube " + cube_id);
  json body = report::metadata_json(*cube);
  body["cube_id"] = cube_id;
  return Response{200, std::move(body)};
}

Response Service::query(const std::string& cube_id, std::string_view body) const {
  CubePtr cube = find(cube_id);
  if (!cube) return fail(404, "NotFound", "no cube " + cube_id);
  json doc = json::parse(body, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("cql") || !doc["cql"].is_string())
    return fail(400, "BadRequest", "body must be {\"cql\": text}");
  const std::string text = doc["cql"].get<std::string>();
  const auto start = std::chrono::steady_clock::now();
  try {
    ResultTable table = cql::plan_and_execute(cql::parse(text), cube);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    json out = report::result_json(table);
    out["elapsed_ms"] = format_ms(ms);
    return Response{200, std::move(out)};
  } catch (const cql::SyntaxError& e) {
    return syntax_error(e);
  } catch (const cql::SemanticError& e) {
    return semantic_error(e);
  }
}

Response Service::compare(const std::string& cube_id, const std::optional<std::string>& left,
                          const std::optional<std::string>& right,
                          const std::optional<std::string>& axis) const {
  CubePtr cube = find(cube_id);
  if (!cube) return fail(404, "NotFound", "no cube " + cube_id);
  if (!left || !right || !axis)
    return fail(400, "BadRequest", "parameters left, right and axis are required");
  auto run = [&](const std::string& text, std::string_view side) -> std::variant<ResultTable, Response> {
    try {
      return cql::plan_and_execute(cql::parse(text), cube);
    } catch (const cql::SyntaxError& e) {
      return syntax_error(e, side);
    } catch (const cql::SemanticError& e) {
      return semantic_error(e, side);
    }
  };
  auto l = run(*left, "left");
  if (auto* r = std::get_if<Response>(&l)) return *r;
  auto r = run(*right, "right");
  if (auto* resp = std::get_if<Response>(&r)) return *resp;
  try {
    return Response{200, report::compare_json(std::get<ResultTable>(l), std::get<ResultTable>(r),
                                              report::parse_axis(*axis), *left, *right)};
  } catch (const report::AxisMismatch& e) {
    return fail(422, "AxisMismatch", e.what());
  }
}

// ---------------------------------------------------------------------------

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) { routes(); }

  static void send(httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  }

  static std::optional<std::string> param(const httplib::Request& req, const char* key) {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/cubes", [this](const httplib::Request&, httplib::Response& res) {
      send(res, service.list_cubes());
    });
    server.Post("/datasets", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.is_multipart_form_data()) return send(res, service.post_dataset(req.body));
      FileSet files;
      BundleFormat format = BundleFormat::csv_bundle;
      for (const auto& [name, part] : req.files) {
        if (part.filename.empty() && name == "format") {
          auto f = parse_bundle_format(part.content);
          if (!f) return send(res, Response{400, error_body("BadRequest", "unknown format " + part.content)});
          format = *f;
          continue;
        }
        files[part.filename.empty() ? name : fs::path(part.filename).filename().string()] = part.content;
      }
      send(res, service.post_dataset(files, format));
    });
    server.Get(R"(/cubes/([^/]+)/metadata)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.metadata(req.matches[1]));
    });
    server.Post(R"(/cubes/([^/]+)/query)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.query(req.matches[1], req.body));
    });
    server.Get(R"(/cubes/([^/]+)/chart/compare)", [this](const httplib::Request& req, httplib::Response& res) {
      send(res, service.compare(req.matches[1], param(req, "left"), param(req, "right"), param(req, "axis")));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return;
      res.set_content(error_body(res.status == 404 ? "NotFound" : "HttpError",
                                 httplib::status_message(res.status))
                          .dump(),
                      "application/json");
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      res.status = 500;
      res.set_content(error_body("InternalError", message).dump(), "application/json");
    });
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }
void HttpServer::stop() { impl_->server.stop(); }
void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace ceramdw::service
