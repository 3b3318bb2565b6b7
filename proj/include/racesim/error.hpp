#pragma once

#include <stdexcept>
#include <string>

namespace racesim {

enum class ErrorCode {
  usage = 1,
  config = 2,
  track = 3,
  io = 4,
  replay = 5,
};

/// Base class for every error raised by the library. The code maps 1:1 onto
/// the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorCode::usage, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
    : Error(ErrorCode::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

/// Track parse failure. `line` is 1-based, 0 when the file could not be read.
class TrackError : public Error {
 public:
  TrackError(const std::string& path, int line, const std::string& field,
             const std::string& message)
    : Error(ErrorCode::track, path + ":" + std::to_string(line) + ": field '" +
                                field + "': " + message),
      line_(line),
      field_(field) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

}  // namespace racesim
