#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

#include "logstamp/tsa.hpp"

namespace logstamp::tsa {

// Client for a remote time-stamping authority. It sends a DER-encoded
// TimeStampReq (SHA-256 message imprint, policy OID, nonce) over HTTP(S) and
// accepts any structurally valid, granted TimeStampResp as evidence. The
// CMS signature inside the token is NOT validated.
struct ExternalTsaConfig {
  std::string endpoint;            // e.g. http://tsa.example:8080/tsr
  std::string policy_oid = "2.999.1";
  std::chrono::seconds timeout{10};

  // Reads TSA_ENDPOINT (and TSA_POLICY if set).
  static ExternalTsaConfig from_environment();
};

// DER TimeStampReq, version 1, certReq FALSE.
Bytes build_timestamp_request(const Digest& digest, std::uint64_t nonce, const std::string& policy_oid);

// Encodes a dotted OID into its DER content bytes. Throws kBadParam.
Bytes encode_oid(const std::string& dotted);

// Strict DER walk of a TimeStampResp: status granted (0) or grantedWithMods
// (1), a SignedData ContentInfo present, every length consistent.
bool is_granted_response(ByteView der);

// True iff the response carries a 32-byte OCTET STRING equal to `digest`.
bool response_binds_digest(ByteView der, const Digest& digest);

class ExternalTsaBackend final : public TimestampBackend {
 public:
  static constexpr const char* kBackendId = "external-tsa";
  using NonceSource = std::function<std::uint64_t()>;

  ExternalTsaBackend(ExternalTsaConfig config, Clock clock);
  ExternalTsaBackend(ExternalTsaConfig config, Clock clock, NonceSource nonces);

  [[nodiscard]] std::string backend_id() const override { return kBackendId; }
  TimestampToken request_timestamp(const Digest& digest) override;
  [[nodiscard]] bool verify_token(const TimestampToken& token, const Digest& digest) const override;

 private:
  ExternalTsaConfig config_;
  Clock clock_;
  NonceSource nonces_;
};

}  // namespace logstamp::tsa
