#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "logstamp/tsa.hpp"

namespace logstamp::tsa {

// On-disk record, 80 bytes:
//   le64 serial | le64 unix seconds | digest[32] | chain[32]
// chain_i = sha256(chain_{i-1} || le64 serial_i || le64 time_i || digest_i),
// chain_0 = 32 zero bytes. Serials start at 1 and increase by one.
struct LedgerRecord {
  std::uint64_t serial = 0;
  std::int64_t time = 0;
  Digest digest;
  Digest chain;

  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

inline constexpr std::size_t kLedgerRecordSize = 80;

Digest chain_link(const Digest& previous, std::uint64_t serial, std::int64_t time, const Digest& digest);

Bytes encode_record(const LedgerRecord& record);
std::optional<LedgerRecord> decode_record(ByteView data);

// Throws kIo on read failure or a partial trailing record.
std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path);

struct LedgerAudit {
  // entry_ok[i]: records 0..i all carry serial j + 1 and the chain value
  // recomputed from genesis over record contents. Once broken, stays broken.
  std::vector<bool> entry_ok;
  std::optional<std::size_t> first_bad;

  [[nodiscard]] bool ok() const noexcept { return !first_bad.has_value(); }
};

LedgerAudit audit_ledger(std::span<const LedgerRecord> records);

// Local hash-chained, append-only ledger acting as the timestamp authority.
// Appends are serialized with a process mutex plus an advisory file lock.
class LedgerBackend final : public TimestampBackend {
 public:
  static constexpr const char* kBackendId = "local-ledger";

  LedgerBackend(std::filesystem::path path, Clock clock);

  [[nodiscard]] std::string backend_id() const override { return kBackendId; }
  TimestampToken request_timestamp(const Digest& digest) override;
  [[nodiscard]] bool verify_token(const TimestampToken& token, const Digest& digest) const override;

  [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  Clock clock_;
  std::mutex append_mutex_;
};

}  // namespace logstamp::tsa
