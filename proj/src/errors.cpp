#include "ppdeal/errors.hpp"

namespace ppdeal {

const char* abort_cause_name(AbortCause cause) {
  switch (cause) {
    case AbortCause::timeout: return "timeout";
    case AbortCause::bad_frame: return "bad_frame";
    case AbortCause::version_mismatch: return "version_mismatch";
    case AbortCause::params_mismatch: return "params_mismatch";
    case AbortCause::config_mismatch: return "config_mismatch";
    case AbortCause::provider_mismatch: return "provider_mismatch";
    case AbortCause::ring_order_mismatch: return "ring_order_mismatch";
    case AbortCause::malformed_element: return "malformed_element";
    case AbortCause::count_mismatch: return "count_mismatch";
    case AbortCause::peer_abort: return "peer_abort";
    case AbortCause::protocol_violation: return "protocol_violation";
  }
  return "unknown";
}

ProtocolAbort::ProtocolAbort(AbortCause cause, const std::string& detail)
    : std::runtime_error(std::string("protocol abort (") + abort_cause_name(cause) +
                         "): " + detail),
      cause_(cause) {}

}  // namespace ppdeal
