#include "logstamp/error.hpp"

namespace logstamp {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kEmptyInput: return "EMPTY_INPUT";
    case Errc::kIndexRange: return "INDEX_RANGE";
    case Errc::kMalformedProof: return "MALFORMED_PROOF";
    case Errc::kBadParam: return "BAD_PARAM";
    case Errc::kDelayBudget: return "DELAY_BUDGET";
    case Errc::kCountMismatch: return "COUNT_MISMATCH";
    case Errc::kMalformedMarker: return "MALFORMED_MARKER";
    case Errc::kVersion: return "VERSION";
    case Errc::kRuleSyntax: return "RULE_SYNTAX";
    case Errc::kRuleDuplicate: return "RULE_DUPLICATE";
    case Errc::kIoSink: return "IO_SINK";
    case Errc::kIo: return "IO";
    case Errc::kBackendUnavailable: return "BACKEND_UNAVAILABLE";
    case Errc::kBackendRejected: return "BACKEND_REJECTED";
  }
  return "UNKNOWN";
}

}  // namespace logstamp
