#pragma once

#include <stdexcept>
#include <string>

namespace sumstate {

// Error categories. They map 1:1 onto the C API status codes and onto the
// CLI exit codes (io/parse/invalid -> 2, internal -> 1).
enum class ErrorKind {
  Io,
  Parse,
  Invalid,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_io(const std::string& msg) { throw Error(ErrorKind::Io, msg); }
[[noreturn]] inline void throw_parse(const std::string& msg) { throw Error(ErrorKind::Parse, msg); }
[[noreturn]] inline void throw_invalid(const std::string& msg) { throw Error(ErrorKind::Invalid, msg); }
[[noreturn]] inline void throw_internal(const std::string& msg) { throw Error(ErrorKind::Internal, msg); }

}  // namespace sumstate
