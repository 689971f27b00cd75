#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace logstamp::estimate {

// Non-proof, non-token bytes of one serialized .tsm marker: the eleven
// key=value lines and the terminator, with a 16-byte file name and typical
// widths for leaf_index, n_files and repetitions.
inline constexpr std::uint64_t kMarkerOverheadBytes = 320;
// One proof step in the text envelope: side letter, ':', 64 hex digits, ';'.
inline constexpr std::uint64_t kProofStepTextBytes = 2 + 64 + 1;

struct CostModel {
  std::uint64_t files_per_rotation = 1;
  std::uint64_t rotations_per_day = 1;
  std::uint64_t days = 1;
  std::uint64_t hash_size_bytes = 32;
  std::uint64_t token_size_bytes = 5120;
  std::optional<double> price_per_timestamp;  // no default on purpose
  std::uint64_t marker_overhead_bytes = kMarkerOverheadBytes;
};

struct SavingsReport {
  std::uint64_t tokens_legacy = 0;
  std::uint64_t tokens_new = 0;
  std::uint64_t legacy_storage_bytes = 0;
  std::uint64_t new_storage_bytes = 0;
  std::uint64_t legacy_storage_floor_kib_bytes = 0;
  std::uint64_t new_storage_floor_kib_bytes = 0;
  std::uint64_t proof_steps = 0;
  std::uint64_t marker_overhead_bytes = 0;
  double storage_ratio = 1.0;  // legacy / new, unrounded
  std::optional<double> legacy_cost;
  std::optional<double> new_cost;
  std::optional<double> cost_ratio;

  [[nodiscard]] bool has_savings() const noexcept { return tokens_new < tokens_legacy; }
};

struct AttackFeasibility {
  int hash_bits = 0;
  std::uint64_t retention_seconds = 0;  // 0 when the window was given in log2
  std::uint64_t handling_seconds = 0;
  double attacker_rate_hps = 0;
  double tries_log2 = 0;        // birthday bound, hash_bits / 2
  double window_log2 = 0;
  double required_rate_log2 = 0;
  double available_rate_log2 = 0;
  double gap_log2 = 0;          // required - available
  bool feasible = false;        // gap_log2 <= 0
};

// Largest multiple of 1024 not above `bytes`.
std::uint64_t floor_to_kib(std::uint64_t bytes) noexcept;

// Throws kBadParam on zero counts or sizes. Overflow is reported as
// kBadParam rather than wrapped.
SavingsReport savings_report(const CostModel& model);

// Throws kBadParam unless hash_bits > 0, the window is non-empty and
// attacker_rate_hps >= 0. A zero rate yields an infinitely negative
// available rate, i.e. never feasible.
AttackFeasibility security_margin(int hash_bits, std::uint64_t retention_seconds, std::uint64_t handling_seconds,
                                  double attacker_rate_hps);
AttackFeasibility security_margin_log2(int hash_bits, double window_log2, double attacker_rate_log2);

// Each candidate path now costs `repetitions` hash evaluations.
AttackFeasibility kdf_adjusted_margin(const AttackFeasibility& base, std::uint64_t repetitions);

// Modelled size of one .tsm file for an n-file batch whose token encodes to
// `token_bytes` raw bytes (before base64).
std::uint64_t marker_size_model(std::uint64_t n_files, std::uint64_t token_bytes);

std::string render_table(const SavingsReport& report);
std::string render_kv(const SavingsReport& report);
std::string render_table(const AttackFeasibility& margin);
std::string render_kv(const AttackFeasibility& margin);

}  // namespace logstamp::estimate
