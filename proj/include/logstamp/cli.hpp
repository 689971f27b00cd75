#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "logstamp/clock.hpp"
#include "logstamp/estimator.hpp"
#include "logstamp/tsa.hpp"

namespace logstamp::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitBackend = 4,
};

inline constexpr std::uint64_t kDefaultRepetitions = 100'000;

enum class BackendKind { kLedger, kExternal };

struct BackendOptions {
  BackendKind kind = BackendKind::kLedger;
  std::filesystem::path ledger_path = "logstamp.ledger";
  std::string tsa_endpoint;  // empty: TSA_ENDPOINT from the environment
  std::string tsa_policy;
};

std::unique_ptr<tsa::TimestampBackend> make_backend(const BackendOptions& options, Clock clock);

struct SplitOptions {
  std::filesystem::path input;
  std::filesystem::path rules;
  std::filesystem::path out_dir = ".";
};

struct StampOptions {
  std::vector<std::filesystem::path> files;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> repetitions;
  std::optional<double> target_seconds;
  std::optional<double> max_allowed_seconds;
};

struct MarginOptions {
  int hash_bits = 256;
  std::optional<double> window_log2;
  std::optional<std::uint64_t> retention_seconds;
  std::optional<std::uint64_t> handling_seconds;
  std::optional<double> rate_log2;
  std::optional<double> rate_hps;
  std::optional<std::uint64_t> repetitions;
};

int cmd_split(const SplitOptions& options, std::ostream& out, std::ostream& err);

// Exactly one request_timestamp per call. Markers land as <basename>.tsm in
// out_dir, all or none.
int cmd_stamp(const StampOptions& options, tsa::TimestampBackend& backend, const Clock& clock, std::ostream& out,
              std::ostream& err);

int cmd_verify(const std::filesystem::path& file, const std::filesystem::path& marker_file,
               const tsa::TimestampBackend& backend, std::ostream& out, std::ostream& err);

int cmd_estimate(const estimate::CostModel& model, bool want_cost, bool key_value, std::ostream& out,
                 std::ostream& err);

int cmd_margin(const MarginOptions& options, bool key_value, std::ostream& out, std::ostream& err);

// Full command line: split|stamp|verify|estimate|margin, --config FILE.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace logstamp::cli
