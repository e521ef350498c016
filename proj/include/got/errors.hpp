#pragma once

#include <stdexcept>
#include <string>

namespace got {

/// Process exit codes used by the command-line front end.
enum class ExitCode : int {
  success = 0,
  usage = 2,
  ingestion = 3,
  geometry = 4,
  numeric = 5,
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual ExitCode exit_code() const noexcept = 0;
  virtual const char* category() const noexcept = 0;
};

class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::usage; }
  const char* category() const noexcept override { return "usage"; }
};

class IngestionError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::ingestion; }
  const char* category() const noexcept override { return "ingestion"; }
};

class GeometryError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::geometry; }
  const char* category() const noexcept override { return "geometry"; }
};

// Points from two different spaces were combined.
class DispatchError : public GeometryError {
 public:
  using GeometryError::GeometryError;
  const char* category() const noexcept override { return "dispatch"; }
};

class NumericError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numeric; }
  const char* category() const noexcept override { return "numeric"; }
};

}  // namespace got
