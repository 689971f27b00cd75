#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logstamp {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kDigestSize = 32;

// A SHA-256 output. Always exactly 32 bytes.
struct Digest {
  std::array<std::uint8_t, kDigestSize> bytes{};

  [[nodiscard]] ByteView view() const noexcept { return bytes; }
  [[nodiscard]] std::string hex() const;
  static std::optional<Digest> from_hex(std::string_view hex);

  friend bool operator==(const Digest&, const Digest&) = default;
  friend auto operator<=>(const Digest&, const Digest&) = default;
};

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// SHA-256 (OpenSSL). One call is one hash evaluation.
Digest sha256(ByteView data);
inline Digest sha256(std::string_view data) { return sha256(as_bytes(data)); }

// SHA-256 over the concatenation of two digests, left first.
Digest sha256_pair(const Digest& left, const Digest& right);

// Streams a file through SHA-256 without loading it whole.
Digest sha256_file(const std::string& path);

std::string to_hex(ByteView data);
std::optional<Bytes> from_hex(std::string_view hex);

std::string base64_encode(ByteView data);
std::optional<Bytes> base64_decode(std::string_view text);

void put_be64(Bytes& out, std::uint64_t v);
void put_le64(Bytes& out, std::uint64_t v);
std::uint64_t get_be64(const std::uint8_t* p) noexcept;
std::uint64_t get_le64(const std::uint8_t* p) noexcept;

}  // namespace logstamp
