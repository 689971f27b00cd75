#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace logstamp {

enum class Errc {
  kEmptyInput,
  kIndexRange,
  kMalformedProof,
  kBadParam,
  kDelayBudget,
  kCountMismatch,
  kMalformedMarker,
  kVersion,
  kRuleSyntax,
  kRuleDuplicate,
  kIoSink,
  kIo,
  kBackendUnavailable,
  kBackendRejected,
};

std::string_view errc_name(Errc code);

// All library failures surface as this exception; code() is the stable
// machine-readable part, what() carries the detail (field, line, class...).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace logstamp
