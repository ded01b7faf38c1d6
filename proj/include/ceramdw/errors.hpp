#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ceramdw {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- ingestion ------------------------------------------------------------

class MissingFile : public Error {
 public:
  explicit MissingFile(std::string name)
      : Error("missing file: " + name), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

class MalformedRow : public Error {
 public:
  MalformedRow(std::string file, std::size_t line, std::string reason)
      : Error(file + ":" + std::to_string(line) + ": " + reason),
        file_(std::move(file)),
        line_(line),
        reason_(std::move(reason)) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::string file_;
  std::size_t line_;
  std::string reason_;
};

class DuplicateId : public Error {
 public:
  DuplicateId(std::string type, std::string id)
      : Error("duplicate " + type + " id: " + id), type_(std::move(type)), id_(std::move(id)) {}
  const std::string& type() const { return type_; }
  const std::string& id() const { return id_; }

 private:
  std::string type_;
  std::string id_;
};

// ---- cube engine ----------------------------------------------------------

class UnknownDimension : public Error {
 public:
  explicit UnknownDimension(const std::string& name) : Error("unknown dimension: " + name) {}
};

class UnknownLevel : public Error {
 public:
  UnknownLevel(const std::string& dim, const std::string& level)
      : Error("unknown level '" + level + "' for dimension " + dim) {}
};

class UnknownMember : public Error {
 public:
  UnknownMember(const std::string& dim, const std::string& level, const std::string& member)
      : Error("unknown member \"" + member + "\" at " + dim + "." + level) {}
};

class LevelOrderViolation : public Error {
 public:
  using Error::Error;
};

class UnitMismatch : public Error {
 public:
  using Error::Error;
};

class MissingComponent : public Error {
 public:
  using Error::Error;
};

class InvalidPermutation : public Error {
 public:
  using Error::Error;
};

// ---- generator ------------------------------------------------------------

class InvalidManifest : public Error {
 public:
  using Error::Error;
};

}  // namespace ceramdw
