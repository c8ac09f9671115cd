#pragma once

#include <stdexcept>
#include <string>

namespace klrfs {

// Broad failure classes. The C API and the CLI map these onto exit codes.
enum class ErrorKind {
  kData,        // malformed or inconsistent input data, shape mismatches
  kParameter,   // invalid argument values (non-positive gamma, delta out of range)
  kConfig,      // unknown or ill-typed configuration keys
  kDegenerate,  // mathematically undefined result (zero-norm kernel, one class)
  kNumerical,   // solver failed to converge
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace klrfs
