#pragma once

#include <stdexcept>
#include <string>

namespace ppdeal {

// Bad run configuration, parameter files, or input data. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Item that cannot be encoded into the group (raw mode 0 or +/-1 residues).
class DegenerateEncodingError : public ConfigError {
 public:
  explicit DegenerateEncodingError(const std::string& what) : ConfigError(what) {}
};

// Socket/connect/listen failures. CLI exit code 3.
class NetworkError : public std::runtime_error {
 public:
  explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};

enum class AbortCause {
  timeout,
  bad_frame,
  version_mismatch,
  params_mismatch,
  config_mismatch,
  provider_mismatch,
  ring_order_mismatch,
  malformed_element,
  count_mismatch,
  peer_abort,
  protocol_violation,
};

const char* abort_cause_name(AbortCause cause);

// A live session stopped before completing. Aborts reveal nothing beyond
// their occurrence and named cause. CLI exit code 4.
class ProtocolAbort : public std::runtime_error {
 public:
  ProtocolAbort(AbortCause cause, const std::string& detail);
  AbortCause cause() const { return cause_; }

 private:
  AbortCause cause_;
};

// A postcondition the protocol guarantees did not hold; signals an
// implementation bug (e.g. a canonical element missing from its owner's list).
class IntegrityError : public std::logic_error {
 public:
  explicit IntegrityError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace ppdeal
