#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "logstamp/clock.hpp"
#include "logstamp/digest.hpp"

namespace logstamp::tsa {

// A time attestation over one digest. `evidence` is whatever the issuing
// backend needs to re-check the attestation later.
struct TimestampToken {
  std::string backend_id;
  Digest attested_digest;
  UtcSeconds attested_time{};
  Bytes evidence;

  friend bool operator==(const TimestampToken&, const TimestampToken&) = default;
};

class TimestampBackend {
 public:
  virtual ~TimestampBackend() = default;

  [[nodiscard]] virtual std::string backend_id() const = 0;

  // Throws kBackendUnavailable / kBackendRejected.
  virtual TimestampToken request_timestamp(const Digest& digest) = 0;

  // True iff the evidence checks out under this backend's trust anchor and
  // the token attests exactly `digest`. Never throws.
  [[nodiscard]] virtual bool verify_token(const TimestampToken& token, const Digest& digest) const = 0;
};

// Binary token framing used inside markers (base64'd there):
//   be16 len | backend_id | digest[32] | be64 unix seconds | be32 len | evidence
Bytes encode_token(const TimestampToken& token);
std::optional<TimestampToken> decode_token(ByteView data);

}  // namespace logstamp::tsa
