#include "logstamp/external_tsa.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cstdlib>
#include <utility>

#include "httplib.h"
#include "logstamp/error.hpp"

namespace logstamp::tsa {

namespace {

constexpr std::uint8_t kTagInteger = 0x02;
constexpr std::uint8_t kTagOctetString = 0x04;
constexpr std::uint8_t kTagNull = 0x05;
constexpr std::uint8_t kTagOid = 0x06;
constexpr std::uint8_t kTagSequence = 0x30;
constexpr std::uint8_t kTagContext0 = 0xa0;

// 2.16.840.1.101.3.4.2.1
constexpr std::uint8_t kSha256Oid[] = {0x60, 0x86, 0x48, 0x01, 0x65, 0x03, 0x04, 0x02, 0x01};
// 1.2.840.113549.1.7.2
constexpr std::uint8_t kSignedDataOid[] = {0x2a, 0x86, 0x48, 0x86, 0xf7, 0x0d, 0x01, 0x07, 0x02};

Bytes tlv(std::uint8_t tag, ByteView content) {
  Bytes out{tag};
  const std::size_t len = content.size();
  if (len < 0x80) {
    out.push_back(static_cast<std::uint8_t>(len));
  } else {
    Bytes len_bytes;
    for (std::size_t v = len; v != 0; v >>= 8) len_bytes.insert(len_bytes.begin(), static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(0x80 | len_bytes.size()));
    out.insert(out.end(), len_bytes.begin(), len_bytes.end());
  }
  out.insert(out.end(), content.begin(), content.end());
  return out;
}

Bytes concat(std::initializer_list<Bytes> parts) {
  Bytes out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

Bytes der_unsigned(std::uint64_t v) {
  Bytes content;
  do {
    content.insert(content.begin(), static_cast<std::uint8_t>(v));
    v >>= 8;
  } while (v != 0);
  if (content.front() & 0x80) content.insert(content.begin(), 0x00);
  return tlv(kTagInteger, content);
}

struct Tlv {
  std::uint8_t tag = 0;
  ByteView content;
  std::size_t total = 0;  // header + content
};

// One definite-length, low-tag-number DER element at the start of `in`.
std::optional<Tlv> read_tlv(ByteView in) {
  if (in.size() < 2) return std::nullopt;
  Tlv t;
  t.tag = in[0];
  if ((t.tag & 0x1f) == 0x1f) return std::nullopt;
  std::size_t pos = 1;
  std::size_t len = in[pos++];
  if (len & 0x80) {
    const std::size_t count = len & 0x7f;
    if (count == 0 || count > 4 || in.size() - pos < count) return std::nullopt;
    if (in[pos] == 0) return std::nullopt;  // non-minimal
    len = 0;
    for (std::size_t i = 0; i < count; ++i) len = (len << 8) | in[pos++];
    if (len < 0x80) return std::nullopt;
  }
  if (in.size() - pos < len) return std::nullopt;
  t.content = in.subspan(pos, len);
  t.total = pos + len;
  return t;
}

std::optional<std::vector<Tlv>> read_children(ByteView content) {
  std::vector<Tlv> out;
  while (!content.empty()) {
    auto t = read_tlv(content);
    if (!t) return std::nullopt;
    out.push_back(*t);
    content = content.subspan(t->total);
  }
  return out;
}

bool well_formed(ByteView content, int depth) {
  if (depth > 32) return false;
  auto children = read_children(content);
  if (!children) return false;
  for (const auto& c : *children) {
    if ((c.tag & 0x20) && !well_formed(c.content, depth + 1)) return false;
  }
  return true;
}

std::uint64_t random_nonce() {
  std::uint64_t v = 0;
  if (RAND_bytes(reinterpret_cast<unsigned char*>(&v), sizeof v) != 1) {
    throw Error(Errc::kBackendUnavailable, "no randomness for nonce");
  }
  return v;
}

// "http://host:port/path" -> {"http://host:port", "/path"}
std::pair<std::string, std::string> split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::kBackendUnavailable, "bad TSA endpoint: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ExternalTsaConfig ExternalTsaConfig::from_environment() {
  ExternalTsaConfig cfg;
  if (const char* e = std::getenv("TSA_ENDPOINT")) cfg.endpoint = e;
  if (const char* p = std::getenv("TSA_POLICY"); p && *p) cfg.policy_oid = p;
  return cfg;
}

Bytes encode_oid(const std::string& dotted) {
  std::vector<std::uint64_t> arcs;
  std::size_t pos = 0;
  while (pos <= dotted.size()) {
    const auto dot = std::min(dotted.find('.', pos), dotted.size());
    const std::string part = dotted.substr(pos, dot - pos);
    if (part.empty() || part.size() > 18 || !std::all_of(part.begin(), part.end(), ::isdigit)) {
      throw Error(Errc::kBadParam, "bad OID: " + dotted);
    }
    arcs.push_back(std::stoull(part));
    pos = dot + 1;
  }
  if (arcs.size() < 2 || arcs[0] > 2 || (arcs[0] < 2 && arcs[1] > 39)) {
    throw Error(Errc::kBadParam, "bad OID: " + dotted);
  }
  Bytes out;
  auto put_arc = [&out](std::uint64_t v) {
    Bytes chunk{static_cast<std::uint8_t>(v & 0x7f)};
    for (v >>= 7; v != 0; v >>= 7) chunk.insert(chunk.begin(), static_cast<std::uint8_t>(0x80 | (v & 0x7f)));
    out.insert(out.end(), chunk.begin(), chunk.end());
  };
  put_arc(arcs[0] * 40 + arcs[1]);
  for (std::size_t i = 2; i < arcs.size(); ++i) put_arc(arcs[i]);
  return out;
}

Bytes build_timestamp_request(const Digest& digest, std::uint64_t nonce, const std::string& policy_oid) {
  const Bytes algorithm = tlv(kTagSequence, concat({tlv(kTagOid, kSha256Oid), tlv(kTagNull, {})}));
  const Bytes imprint = tlv(kTagSequence, concat({algorithm, tlv(kTagOctetString, digest.view())}));
  return tlv(kTagSequence, concat({der_unsigned(1), imprint, tlv(kTagOid, encode_oid(policy_oid)),
                                   der_unsigned(nonce)}));
}

bool is_granted_response(ByteView der) {
  const auto outer = read_tlv(der);
  if (!outer || outer->tag != kTagSequence || outer->total != der.size()) return false;
  if (!well_formed(outer->content, 0)) return false;

  const auto fields = read_children(outer->content);
  if (!fields || fields->size() != 2) return false;

  const auto& status_info = (*fields)[0];
  if (status_info.tag != kTagSequence) return false;
  const auto status_fields = read_children(status_info.content);
  if (!status_fields || status_fields->empty()) return false;
  const auto& status = status_fields->front();
  if (status.tag != kTagInteger || status.content.size() != 1 || status.content[0] > 1) return false;

  const auto& content_info = (*fields)[1];
  if (content_info.tag != kTagSequence) return false;
  const auto ci_fields = read_children(content_info.content);
  if (!ci_fields || ci_fields->size() != 2) return false;
  const auto& type = (*ci_fields)[0];
  return type.tag == kTagOid && std::ranges::equal(type.content, ByteView(kSignedDataOid)) &&
         (*ci_fields)[1].tag == kTagContext0;
}

bool response_binds_digest(ByteView der, const Digest& digest) {
  Bytes needle{kTagOctetString, static_cast<std::uint8_t>(kDigestSize)};
  needle.insert(needle.end(), digest.bytes.begin(), digest.bytes.end());
  return std::ranges::search(der, needle).begin() != der.end();
}

ExternalTsaBackend::ExternalTsaBackend(ExternalTsaConfig config, Clock clock)
    : ExternalTsaBackend(std::move(config), std::move(clock), random_nonce) {}

ExternalTsaBackend::ExternalTsaBackend(ExternalTsaConfig config, Clock clock, NonceSource nonces)
    : config_(std::move(config)), clock_(std::move(clock)), nonces_(std::move(nonces)) {}

TimestampToken ExternalTsaBackend::request_timestamp(const Digest& digest) {
  if (config_.endpoint.empty()) throw Error(Errc::kBackendUnavailable, "TSA_ENDPOINT is not set");

  const Bytes request = build_timestamp_request(digest, nonces_(), config_.policy_oid);
  const auto [base, path] = split_endpoint(config_.endpoint);

  httplib::Client client(base);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  auto res = client.Post(path, reinterpret_cast<const char*>(request.data()), request.size(),
                         "application/timestamp-query");
  if (!res) {
    throw Error(Errc::kBackendUnavailable, config_.endpoint + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(Errc::kBackendRejected, "HTTP " + std::to_string(res->status));
  }
  Bytes body(res->body.begin(), res->body.end());
  if (!is_granted_response(body)) throw Error(Errc::kBackendRejected, "response is not a granted TimeStampResp");
  if (!response_binds_digest(body, digest)) throw Error(Errc::kBackendRejected, "response does not carry the imprint");

  TimestampToken token;
  token.backend_id = kBackendId;
  token.attested_digest = digest;
  token.attested_time = clock_();
  token.evidence = std::move(body);
  return token;
}

bool ExternalTsaBackend::verify_token(const TimestampToken& token, const Digest& digest) const {
  return token.backend_id == kBackendId && token.attested_digest == digest &&
         is_granted_response(token.evidence) && response_binds_digest(token.evidence, digest);
}

}  // namespace logstamp::tsa
