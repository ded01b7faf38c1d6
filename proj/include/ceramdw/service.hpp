#pragma once

// HTTP JSON facade. Handlers are plain member functions returning a status and a
// JSON body, so they can be called without a socket; HttpServer binds them to
// routes:
//
//   GET  /cubes                           -> {"cubes": [...]}
//   POST /datasets                        -> {"cube_id", "validation_report", ...}
//   GET  /cubes/{id}/metadata             -> report::metadata_json + "cube_id"
//   POST /cubes/{id}/query   {"cql"}      -> {"columns", "rows", "totals", "elapsed_ms"}
//   GET  /cubes/{id}/chart/compare?left=&right=&axis=
//
// Registered cubes are immutable; the registry takes a shared lock for reads and
// an exclusive lock only to insert.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include "ceramdw/cube.hpp"
#include "ceramdw/etl.hpp"
#include "json.hpp"

namespace ceramdw::service {

using nlohmann::json;

struct Response {
  int status = 200;
  json body;
};

class Service {
 public:
  /// With a state directory, every registered cube is snapshotted there as a CSV
  /// star bundle in "<state_dir>/<cube_id>/", and existing snapshots are reloaded.
  explicit Service(std::optional<std::string> state_dir = std::nullopt);

  /// JSON body: {"format": "csv_bundle" | "json_bundle", "files": {name: text}}.
  Response post_dataset(std::string_view body);
  /// Already-decoded bundle (multipart uploads).
  Response post_dataset(const FileSet& files, BundleFormat format);

  Response list_cubes() const;
  Response metadata(const std::string& cube_id) const;
  /// JSON body: {"cql": text}.
  Response query(const std::string& cube_id, std::string_view body) const;
  Response compare(const std::string& cube_id, const std::optional<std::string>& left,
                   const std::optional<std::string>& right,
                   const std::optional<std::string>& axis) const;

  /// Registers an already built star; returns the new cube id.
  std::string register_star(const StarSchema& star);
  CubePtr find(const std::string& cube_id) const;
  std::size_t size() const;

 private:
  void load_state();

  std::optional<std::string> state_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::uint64_t, CubePtr> cubes_;
  std::uint64_t next_id_ = 1;
};

/// Error body: {"error": kind, "message": text, ...}.
json error_body(std::string_view kind, std::string_view message);

class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  bool listen();
  void stop();
  /// Blocks until the server accepts connections.
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ceramdw::service
