#include "logstamp/kdf.hpp"

#include <openssl/rand.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "logstamp/error.hpp"

namespace logstamp::kdf {

void validate(const KdfParams& params) {
  if (params.repetitions == 0) throw Error(Errc::kBadParam, "repetitions must be >= 1");
  if (params.n_files == 0) throw Error(Errc::kBadParam, "n_files must be >= 1");
}

Salt random_salt() {
  Salt salt;
  if (RAND_bytes(salt.data(), static_cast<int>(salt.size())) != 1) {
    throw Error(Errc::kBadParam, "system randomness unavailable");
  }
  return salt;
}

Digest kdf_chain(const Digest& root, const Salt& salt, std::uint64_t repetitions) {
  return kdf_chain(root, salt, repetitions, [](ByteView data) { return sha256(data); });
}

Digest kdf_chain(const Digest& root, const Salt& salt, std::uint64_t repetitions, const HashFn& hash) {
  if (repetitions == 0) throw Error(Errc::kBadParam, "repetitions must be >= 1");

  std::array<std::uint8_t, kSaltSize + kDigestSize> seed;
  std::copy(salt.begin(), salt.end(), seed.begin());
  std::copy(root.bytes.begin(), root.bytes.end(), seed.begin() + kSaltSize);

  Digest d = hash(seed);
  for (std::uint64_t i = 1; i < repetitions; ++i) d = hash(d.view());
  return d;
}

Bytes commitment_preimage(const Digest& kdf_output, const KdfParams& params) {
  Bytes buf;
  buf.reserve(kDigestSize + kSaltSize + 16);
  buf.insert(buf.end(), kdf_output.bytes.begin(), kdf_output.bytes.end());
  buf.insert(buf.end(), params.salt.begin(), params.salt.end());
  put_be64(buf, params.repetitions);
  put_be64(buf, params.n_files);
  return buf;
}

Commitment commit(const Digest& kdf_output, const KdfParams& params) {
  return Commitment{sha256(ByteView(commitment_preimage(kdf_output, params)))};
}

bool verify_commitment(const Commitment& commitment, const Digest& kdf_output, const KdfParams& params) {
  return commit(kdf_output, params) == commitment;
}

double measure_seconds_per_iteration(int rounds) {
  using clock = std::chrono::steady_clock;
  const Digest root = sha256(std::string_view("calibration"));
  const Salt salt{};
  double best = std::numeric_limits<double>::infinity();
  [[maybe_unused]] static volatile std::uint8_t sink = 0;
  for (int r = 0; r < std::max(rounds, 1); ++r) {
    const auto start = clock::now();
    const Digest out = kdf_chain(root, salt, kCalibrationProbe);
    const auto stop = clock::now();
    sink = out.bytes[0];
    best = std::min(best, std::chrono::duration<double>(stop - start).count());
  }
  return std::max(best, 1e-12) / static_cast<double>(kCalibrationProbe);
}

std::uint64_t repetitions_for_budget(double target_seconds, double seconds_per_iteration) {
  if (!(target_seconds > 0) || !(seconds_per_iteration > 0)) {
    throw Error(Errc::kBadParam, "calibration inputs must be positive");
  }
  const double reps = std::floor(target_seconds / seconds_per_iteration);
  if (reps >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(reps));
}

std::uint64_t calibrate_repetitions(double target_seconds, double max_allowed_seconds) {
  if (!(target_seconds > 0) || !(max_allowed_seconds > 0)) {
    throw Error(Errc::kBadParam, "delays must be positive");
  }
  if (target_seconds > max_allowed_seconds) {
    throw Error(Errc::kDelayBudget, "target delay exceeds the allowed timestamping delay");
  }
  return repetitions_for_budget(target_seconds, measure_seconds_per_iteration());
}

}  // namespace logstamp::kdf
