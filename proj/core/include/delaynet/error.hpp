#pragma once

#include <stdexcept>
#include <string>

namespace delaynet {

// Error taxonomy, mapped to CLI exit codes in tools/.
enum class ErrorKind {
  config,     // bad configuration or mismatched grids/shapes
  contract,   // precondition violated by the caller
  input,      // bad user-supplied value (label out of range, ...)
  ingestion,  // unreadable or malformed data file
  numeric,    // NaN/Inf where finite values are required
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool ok, ErrorKind kind, const std::string& msg) {
  if (!ok) throw Error(kind, msg);
}

}  // namespace delaynet
