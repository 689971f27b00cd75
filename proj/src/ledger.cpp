#include "logstamp/ledger.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <utility>

#include "logstamp/error.hpp"

namespace logstamp::tsa {

Digest chain_link(const Digest& previous, std::uint64_t serial, std::int64_t time, const Digest& digest) {
  Bytes buf;
  buf.reserve(2 * kDigestSize + 16);
  buf.insert(buf.end(), previous.bytes.begin(), previous.bytes.end());
  put_le64(buf, serial);
  put_le64(buf, static_cast<std::uint64_t>(time));
  buf.insert(buf.end(), digest.bytes.begin(), digest.bytes.end());
  return sha256(ByteView(buf));
}

Bytes encode_record(const LedgerRecord& record) {
  Bytes out;
  out.reserve(kLedgerRecordSize);
  put_le64(out, record.serial);
  put_le64(out, static_cast<std::uint64_t>(record.time));
  out.insert(out.end(), record.digest.bytes.begin(), record.digest.bytes.end());
  out.insert(out.end(), record.chain.bytes.begin(), record.chain.bytes.end());
  return out;
}

std::optional<LedgerRecord> decode_record(ByteView data) {
  if (data.size() != kLedgerRecordSize) return std::nullopt;
  LedgerRecord r;
  r.serial = get_le64(data.data());
  r.time = static_cast<std::int64_t>(get_le64(data.data() + 8));
  std::copy_n(data.begin() + 16, kDigestSize, r.digest.bytes.begin());
  std::copy_n(data.begin() + 48, kDigestSize, r.chain.bytes.begin());
  return r;
}

namespace {

std::vector<LedgerRecord> decode_all(const Bytes& raw, const std::string& what) {
  if (raw.size() % kLedgerRecordSize != 0) {
    throw Error(Errc::kIo, what + ": partial trailing record");
  }
  std::vector<LedgerRecord> records;
  records.reserve(raw.size() / kLedgerRecordSize);
  for (std::size_t off = 0; off < raw.size(); off += kLedgerRecordSize) {
    records.push_back(*decode_record(ByteView(raw).subspan(off, kLedgerRecordSize)));
  }
  return records;
}

class FileLock {
 public:
  explicit FileLock(int fd) : fd_(fd) {
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) throw Error(Errc::kBackendUnavailable, std::string("flock: ") + std::strerror(errno));
    }
  }
  ~FileLock() { ::flock(fd_, LOCK_UN); }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_;
};

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  [[nodiscard]] int get() const noexcept { return fd_; }

 private:
  int fd_;
};

bool write_all(int fd, const Bytes& data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    done += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

std::vector<LedgerRecord> read_ledger(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open ledger " + path.string());
  Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_all(raw, path.string());
}

LedgerAudit audit_ledger(std::span<const LedgerRecord> records) {
  LedgerAudit audit;
  audit.entry_ok.reserve(records.size());
  Digest running{};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    running = chain_link(running, r.serial, r.time, r.digest);
    const bool ok = !audit.first_bad && r.serial == i + 1 && r.chain == running;
    audit.entry_ok.push_back(ok);
    if (!ok && !audit.first_bad) audit.first_bad = i;
  }
  return audit;
}

LedgerBackend::LedgerBackend(std::filesystem::path path, Clock clock)
    : path_(std::move(path)), clock_(std::move(clock)) {}

TimestampToken LedgerBackend::request_timestamp(const Digest& digest) {
  std::lock_guard guard(append_mutex_);

  Fd fd(::open(path_.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644));
  if (fd.get() < 0) {
    throw Error(Errc::kBackendUnavailable, "ledger " + path_.string() + ": " + std::strerror(errno));
  }
  FileLock lock(fd.get());

  struct stat st{};
  if (::fstat(fd.get(), &st) != 0) throw Error(Errc::kBackendUnavailable, "fstat failed");
  const auto size = static_cast<std::size_t>(st.st_size);
  if (size % kLedgerRecordSize != 0) {
    throw Error(Errc::kBackendRejected, "ledger has a partial trailing record");
  }

  LedgerRecord previous{};
  if (size > 0) {
    Bytes last(kLedgerRecordSize);
    if (::pread(fd.get(), last.data(), last.size(), static_cast<off_t>(size - kLedgerRecordSize)) !=
        static_cast<ssize_t>(kLedgerRecordSize)) {
      throw Error(Errc::kBackendUnavailable, "cannot read last ledger record");
    }
    previous = *decode_record(last);
    if (previous.serial != size / kLedgerRecordSize) {
      throw Error(Errc::kBackendRejected, "ledger serials out of sequence");
    }
  }

  LedgerRecord record;
  record.serial = previous.serial + 1;
  record.time = clock_().time_since_epoch().count();
  record.digest = digest;
  record.chain = chain_link(previous.chain, record.serial, record.time, digest);

  const Bytes encoded = encode_record(record);
  if (!write_all(fd.get(), encoded) || ::fsync(fd.get()) != 0) {
    throw Error(Errc::kBackendUnavailable, "ledger append failed");
  }

  TimestampToken token;
  token.backend_id = kBackendId;
  token.attested_digest = digest;
  token.attested_time = UtcSeconds{std::chrono::seconds{record.time}};
  token.evidence = encoded;
  return token;
}

bool LedgerBackend::verify_token(const TimestampToken& token, const Digest& digest) const {
  if (token.backend_id != kBackendId || token.attested_digest != digest) return false;
  const auto claimed = decode_record(token.evidence);
  if (!claimed || claimed->digest != digest || claimed->time != token.attested_time.time_since_epoch().count()) {
    return false;
  }
  std::vector<LedgerRecord> records;
  try {
    records = read_ledger(path_);
  } catch (const Error&) {
    return false;
  }
  if (claimed->serial == 0 || claimed->serial > records.size()) return false;
  const std::span<const LedgerRecord> prefix(records.data(), claimed->serial);
  if (prefix.back() != *claimed) return false;
  return audit_ledger(prefix).ok();
}

}  // namespace logstamp::tsa
