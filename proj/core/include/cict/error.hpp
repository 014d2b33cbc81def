#pragma once

#include <stdexcept>
#include <string>

namespace cict {

enum class ErrorKind {
  Io,           // unreadable/unwritable files
  Format,       // malformed input documents
  Consistency,  // inputs that disagree with each other
  Lookup,       // unknown node or edge
  Argument,     // invalid function arguments
  Training,     // model cannot be fit
  Schema,       // feature schema mismatch
  Convergence,
  Metric,       // metric undefined for the given data
  Stratification,
  Sampling,     // not enough labeled edges of a class
  Spec,         // infeasible synthetic spec
  Config,       // CLI / experiment configuration
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Process exit code for the CLI: 1 validation/metric, 2 I/O, 3 configuration.
  int exit_code() const noexcept {
    switch (kind_) {
      case ErrorKind::Io: return 2;
      case ErrorKind::Config:
      case ErrorKind::Spec: return 3;
      default: return 1;
    }
  }

 private:
  ErrorKind kind_;
};

}  // namespace cict
