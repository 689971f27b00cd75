#include "logstamp/estimator.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "logstamp/error.hpp"
#include "logstamp/merkle.hpp"

namespace logstamp::estimate {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw Error(Errc::kBadParam, "cost model overflows 64 bits");
  }
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) throw Error(Errc::kBadParam, "cost model overflows 64 bits");
  return a + b;
}

AttackFeasibility finish(AttackFeasibility f) {
  f.required_rate_log2 = f.tries_log2 - f.window_log2;
  f.gap_log2 = f.required_rate_log2 - f.available_rate_log2;
  f.feasible = f.gap_log2 <= 0.0;
  return f;
}

std::string fmt(double v, int precision = 2) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

std::string kib(std::uint64_t bytes) { return std::to_string(bytes / 1024) + " KiB"; }

}  // namespace

std::uint64_t floor_to_kib(std::uint64_t bytes) noexcept { return bytes - bytes % 1024; }

SavingsReport savings_report(const CostModel& m) {
  if (m.files_per_rotation == 0 || m.rotations_per_day == 0 || m.days == 0 || m.hash_size_bytes == 0 ||
      m.token_size_bytes == 0) {
    throw Error(Errc::kBadParam, "cost model counts and sizes must be positive");
  }
  if (m.price_per_timestamp && !(*m.price_per_timestamp >= 0)) {
    throw Error(Errc::kBadParam, "price must be non-negative");
  }

  SavingsReport r;
  r.tokens_new = checked_mul(m.rotations_per_day, m.days);
  r.tokens_legacy = checked_mul(m.files_per_rotation, r.tokens_new);
  r.proof_steps = merkle::proof_length(m.files_per_rotation);
  r.marker_overhead_bytes = m.marker_overhead_bytes;

  r.legacy_storage_bytes = checked_mul(r.tokens_legacy, m.token_size_bytes);
  const std::uint64_t per_marker = checked_add(checked_mul(r.proof_steps, m.hash_size_bytes), m.marker_overhead_bytes);
  r.new_storage_bytes =
      checked_add(checked_mul(r.tokens_new, m.token_size_bytes), checked_mul(r.tokens_legacy, per_marker));

  r.legacy_storage_floor_kib_bytes = floor_to_kib(r.legacy_storage_bytes);
  r.new_storage_floor_kib_bytes = floor_to_kib(r.new_storage_bytes);
  r.storage_ratio = static_cast<double>(r.legacy_storage_bytes) / static_cast<double>(r.new_storage_bytes);

  if (m.price_per_timestamp) {
    r.legacy_cost = static_cast<double>(r.tokens_legacy) * *m.price_per_timestamp;
    r.new_cost = static_cast<double>(r.tokens_new) * *m.price_per_timestamp;
    r.cost_ratio = static_cast<double>(r.tokens_legacy) / static_cast<double>(r.tokens_new);
  }
  return r;
}

AttackFeasibility security_margin(int hash_bits, std::uint64_t retention_seconds, std::uint64_t handling_seconds,
                                  double attacker_rate_hps) {
  if (hash_bits <= 0) throw Error(Errc::kBadParam, "hash_bits must be positive");
  if (retention_seconds == 0 && handling_seconds == 0) throw Error(Errc::kBadParam, "empty attack window");
  if (!(attacker_rate_hps >= 0)) throw Error(Errc::kBadParam, "attacker rate must be >= 0");

  AttackFeasibility f;
  f.hash_bits = hash_bits;
  f.retention_seconds = retention_seconds;
  f.handling_seconds = handling_seconds;
  f.attacker_rate_hps = attacker_rate_hps;
  f.tries_log2 = hash_bits / 2.0;
  f.window_log2 = std::log2(static_cast<double>(retention_seconds) + static_cast<double>(handling_seconds));
  f.available_rate_log2 = std::log2(attacker_rate_hps);  // -inf at 0
  return finish(f);
}

AttackFeasibility security_margin_log2(int hash_bits, double window_log2, double attacker_rate_log2) {
  if (hash_bits <= 0) throw Error(Errc::kBadParam, "hash_bits must be positive");
  if (!std::isfinite(window_log2) || std::isnan(attacker_rate_log2)) {
    throw Error(Errc::kBadParam, "log2 inputs must be numbers");
  }
  AttackFeasibility f;
  f.hash_bits = hash_bits;
  f.attacker_rate_hps = std::exp2(attacker_rate_log2);
  f.tries_log2 = hash_bits / 2.0;
  f.window_log2 = window_log2;
  f.available_rate_log2 = attacker_rate_log2;
  return finish(f);
}

AttackFeasibility kdf_adjusted_margin(const AttackFeasibility& base, std::uint64_t repetitions) {
  if (repetitions == 0) throw Error(Errc::kBadParam, "repetitions must be >= 1");
  AttackFeasibility f = base;
  const double cost_log2 = std::log2(static_cast<double>(repetitions));
  f.available_rate_log2 -= cost_log2;
  f.attacker_rate_hps /= static_cast<double>(repetitions);
  return finish(f);
}

std::uint64_t marker_size_model(std::uint64_t n_files, std::uint64_t token_bytes) {
  const std::uint64_t steps = merkle::proof_length(n_files);
  const std::uint64_t proof_text = steps == 0 ? 0 : steps * kProofStepTextBytes - 1;
  const std::uint64_t token_text = 4 * ((token_bytes + 2) / 3);
  return kMarkerOverheadBytes + proof_text + token_text;
}

std::string render_table(const SavingsReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(24) << "" << std::right << std::setw(16) << "legacy" << std::setw(16) << "merkle"
     << '\n';
  auto row = [&os](const std::string& label, const std::string& legacy, const std::string& merkle) {
    os << std::left << std::setw(24) << label << std::right << std::setw(16) << legacy << std::setw(16) << merkle
       << '\n';
  };
  row("timestamps", std::to_string(r.tokens_legacy), std::to_string(r.tokens_new));
  row("storage (bytes)", std::to_string(r.legacy_storage_bytes), std::to_string(r.new_storage_bytes));
  row("storage (KiB floor)", kib(r.legacy_storage_floor_kib_bytes), kib(r.new_storage_floor_kib_bytes));
  if (r.legacy_cost && r.new_cost) row("cost", fmt(*r.legacy_cost), fmt(*r.new_cost));
  os << "proof steps per marker: " << r.proof_steps << ", marker overhead: " << r.marker_overhead_bytes
     << " bytes\n";
  os << "storage ratio: " << fmt(r.storage_ratio) << "x";
  if (r.cost_ratio) os << ", cost ratio: " << fmt(*r.cost_ratio) << "x";
  os << '\n';
  if (!r.has_savings()) os << "note: a single file per rotation gives no savings\n";
  return os.str();
}

std::string render_kv(const SavingsReport& r) {
  std::ostringstream os;
  os << "tokens_legacy=" << r.tokens_legacy << '\n'
     << "tokens_new=" << r.tokens_new << '\n'
     << "legacy_storage_bytes=" << r.legacy_storage_bytes << '\n'
     << "new_storage_bytes=" << r.new_storage_bytes << '\n'
     << "legacy_storage_floor_kib_bytes=" << r.legacy_storage_floor_kib_bytes << '\n'
     << "new_storage_floor_kib_bytes=" << r.new_storage_floor_kib_bytes << '\n'
     << "proof_steps=" << r.proof_steps << '\n'
     << "marker_overhead_bytes=" << r.marker_overhead_bytes << '\n'
     << "storage_ratio=" << fmt(r.storage_ratio, 4) << '\n';
  if (r.legacy_cost) os << "legacy_cost=" << fmt(*r.legacy_cost, 4) << '\n';
  if (r.new_cost) os << "new_cost=" << fmt(*r.new_cost, 4) << '\n';
  if (r.cost_ratio) os << "cost_ratio=" << fmt(*r.cost_ratio, 4) << '\n';
  os << "savings=" << (r.has_savings() ? "yes" : "no") << '\n';
  return os.str();
}

std::string render_table(const AttackFeasibility& f) {
  std::ostringstream os;
  auto row = [&os](const std::string& label, const std::string& value) {
    os << std::left << std::setw(28) << label << value << '\n';
  };
  row("hash bits", std::to_string(f.hash_bits));
  row("tries (birthday bound)", "2^" + fmt(f.tries_log2));
  row("attack window", "2^" + fmt(f.window_log2) + " s");
  row("required rate", "2^" + fmt(f.required_rate_log2) + " H/s");
  row("attacker rate", "2^" + fmt(f.available_rate_log2) + " H/s");
  row("gap", "2^" + fmt(f.gap_log2));
  row("verdict", f.feasible ? "FEASIBLE" : "INFEASIBLE");
  return os.str();
}

std::string render_kv(const AttackFeasibility& f) {
  std::ostringstream os;
  os << "hash_bits=" << f.hash_bits << '\n'
     << "tries_log2=" << fmt(f.tries_log2, 4) << '\n'
     << "window_log2=" << fmt(f.window_log2, 4) << '\n'
     << "required_rate_log2=" << fmt(f.required_rate_log2, 4) << '\n'
     << "available_rate_log2=" << fmt(f.available_rate_log2, 4) << '\n'
     << "gap_log2=" << fmt(f.gap_log2, 4) << '\n'
     << "feasible=" << (f.feasible ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace logstamp::estimate
