#include "logstamp/tsa.hpp"

#include <limits>

namespace logstamp::tsa {

Bytes encode_token(const TimestampToken& token) {
  Bytes out;
  const auto id_len = static_cast<std::uint16_t>(
      std::min<std::size_t>(token.backend_id.size(), std::numeric_limits<std::uint16_t>::max()));
  out.push_back(static_cast<std::uint8_t>(id_len >> 8));
  out.push_back(static_cast<std::uint8_t>(id_len));
  out.insert(out.end(), token.backend_id.begin(), token.backend_id.begin() + id_len);
  out.insert(out.end(), token.attested_digest.bytes.begin(), token.attested_digest.bytes.end());
  put_be64(out, static_cast<std::uint64_t>(token.attested_time.time_since_epoch().count()));
  const auto ev_len = static_cast<std::uint32_t>(token.evidence.size());
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(ev_len >> shift));
  out.insert(out.end(), token.evidence.begin(), token.evidence.end());
  return out;
}

std::optional<TimestampToken> decode_token(ByteView data) {
  std::size_t pos = 0;
  auto need = [&](std::size_t n) { return data.size() - pos >= n; };

  if (!need(2)) return std::nullopt;
  const std::size_t id_len = (std::size_t{data[0]} << 8) | data[1];
  pos = 2;
  if (!need(id_len + kDigestSize + 8 + 4)) return std::nullopt;

  TimestampToken token;
  token.backend_id.assign(reinterpret_cast<const char*>(data.data() + pos), id_len);
  pos += id_len;
  std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(pos), kDigestSize, token.attested_digest.bytes.begin());
  pos += kDigestSize;
  token.attested_time = UtcSeconds{std::chrono::seconds{static_cast<std::int64_t>(get_be64(data.data() + pos))}};
  pos += 8;
  std::size_t ev_len = 0;
  for (int i = 0; i < 4; ++i) ev_len = (ev_len << 8) | data[pos + i];
  pos += 4;
  if (data.size() - pos != ev_len) return std::nullopt;
  token.evidence.assign(data.begin() + static_cast<std::ptrdiff_t>(pos), data.end());
  return token;
}

}  // namespace logstamp::tsa
