#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>

#include "logstamp/digest.hpp"

namespace logstamp::kdf {

inline constexpr std::size_t kSaltSize = 16;
using Salt = std::array<std::uint8_t, kSaltSize>;

struct KdfParams {
  Salt salt{};
  std::uint64_t repetitions = 1;
  std::uint64_t n_files = 1;

  friend bool operator==(const KdfParams&, const KdfParams&) = default;
};

struct Commitment {
  Digest digest;

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

// A single hash evaluation; swappable so tests can count invocations.
using HashFn = std::function<Digest(ByteView)>;

// Throws kBadParam unless repetitions >= 1 and n_files >= 1.
void validate(const KdfParams& params);

// Fresh salt from OpenSSL's CSPRNG.
Salt random_salt();

// d1 = H(salt || root), d_i = H(d_{i-1}); returns d_repetitions.
// Exactly `repetitions` hash evaluations.
Digest kdf_chain(const Digest& root, const Salt& salt, std::uint64_t repetitions);
Digest kdf_chain(const Digest& root, const Salt& salt, std::uint64_t repetitions, const HashFn& hash);

// Bytes fed to the commitment hash:
// kdf_output || salt || be64(repetitions) || be64(n_files).
Bytes commitment_preimage(const Digest& kdf_output, const KdfParams& params);

Commitment commit(const Digest& kdf_output, const KdfParams& params);
bool verify_commitment(const Commitment& commitment, const Digest& kdf_output, const KdfParams& params);

inline constexpr std::uint64_t kCalibrationProbe = 10'000;

// Seconds per chain iteration on this machine: best of `rounds` probes of
// kCalibrationProbe iterations each.
double measure_seconds_per_iteration(int rounds = 3);

// Largest repetition count whose extrapolated time fits target_seconds,
// never below 1.
std::uint64_t repetitions_for_budget(double target_seconds, double seconds_per_iteration);

// Throws kDelayBudget if target_seconds > max_allowed_seconds and kBadParam
// for non-positive inputs. Not meant to run alongside other CPU-heavy work.
std::uint64_t calibrate_repetitions(double target_seconds, double max_allowed_seconds);

}  // namespace logstamp::kdf
