#include "logstamp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "CLI11.hpp"
#include "logstamp/error.hpp"
#include "logstamp/external_tsa.hpp"
#include "logstamp/kdf.hpp"
#include "logstamp/ledger.hpp"
#include "logstamp/marker.hpp"
#include "logstamp/merkle.hpp"
#include "logstamp/retention.hpp"

namespace logstamp::cli {

namespace fs = std::filesystem;

namespace {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(Errc::kIo, "read failed: " + path.string());
  return buf.str();
}

void write_file(const fs::path& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  if (!out) throw Error(Errc::kIo, "write failed: " + path.string());
}

int exit_for(const Error& e) {
  switch (e.code()) {
    case Errc::kBackendUnavailable:
    case Errc::kBackendRejected:
      return kExitBackend;
    case Errc::kIo:
    case Errc::kIoSink:
      return kExitIo;
    default:
      return kExitUsage;
  }
}

// Hashes every file; the first failure (by index) is rethrown after the loop.
std::vector<Digest> hash_files(const std::vector<fs::path>& files) {
  std::vector<Digest> digests(files.size());
  std::vector<std::string> failures(files.size());
  const auto n = static_cast<std::int64_t>(files.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      digests[i] = sha256_file(files[i].string());
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  }
  for (const auto& f : failures) {
    if (!f.empty()) throw Error(Errc::kIo, f);
  }
  return digests;
}

std::uint64_t resolve_repetitions(const StampOptions& o) {
  const bool calibrate = o.target_seconds.has_value() || o.max_allowed_seconds.has_value();
  if (o.repetitions && calibrate) {
    throw Error(Errc::kBadParam, "give either --repetitions or --target-seconds/--max-delay-seconds, not both");
  }
  if (o.repetitions) {
    if (*o.repetitions == 0) throw Error(Errc::kBadParam, "repetitions must be >= 1");
    return *o.repetitions;
  }
  if (calibrate) {
    if (!o.target_seconds || !o.max_allowed_seconds) {
      throw Error(Errc::kBadParam, "calibration needs both --target-seconds and --max-delay-seconds");
    }
    return kdf::calibrate_repetitions(*o.target_seconds, *o.max_allowed_seconds);
  }
  return kDefaultRepetitions;
}

void remove_quietly(const fs::path& p) {
  std::error_code ec;
  fs::remove(p, ec);
}

}  // namespace

std::unique_ptr<tsa::TimestampBackend> make_backend(const BackendOptions& options, Clock clock) {
  if (options.kind == BackendKind::kLedger) {
    return std::make_unique<tsa::LedgerBackend>(options.ledger_path, std::move(clock));
  }
  auto cfg = tsa::ExternalTsaConfig::from_environment();
  if (!options.tsa_endpoint.empty()) cfg.endpoint = options.tsa_endpoint;
  if (!options.tsa_policy.empty()) cfg.policy_oid = options.tsa_policy;
  return std::make_unique<tsa::ExternalTsaBackend>(std::move(cfg), std::move(clock));
}

int cmd_split(const SplitOptions& o, std::ostream& out, std::ostream& err) {
  retention::RetentionRuleSet rules;
  try {
    rules = retention::compile_rules(read_text_file(o.rules));
  } catch (const Error& e) {
    err << "split: rules: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    std::ifstream input(o.input, std::ios::binary);
    if (!input) throw Error(Errc::kIo, "cannot open " + o.input.string());
    fs::create_directories(o.out_dir);

    retention::DirectorySink sink(o.out_dir);
    const auto stats = retention::split_stream(input, rules, sink);
    sink.commit();

    for (const auto& [cls, count] : stats.lines_per_class) out << "class " << cls << '=' << count << '\n';
    out << "total=" << stats.total << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "split: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "split: " << e.what() << '\n';
    return kExitIo;
  }
}

int cmd_stamp(const StampOptions& o, tsa::TimestampBackend& backend, const Clock& clock, std::ostream& out,
              std::ostream& err) {
  if (o.files.empty()) {
    err << "stamp: no input files\n";
    return kExitUsage;
  }

  std::vector<fs::path> files = o.files;
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) { return a.string() < b.string(); });

  std::vector<std::string> names;
  std::set<std::string> unique;
  for (const auto& f : files) {
    names.push_back(f.filename().string());
    if (names.back().empty() || !unique.insert(names.back()).second) {
      err << "stamp: duplicate or empty file name '" << names.back() << "'\n";
      return kExitUsage;
    }
  }

  std::uint64_t repetitions = 0;
  try {
    repetitions = resolve_repetitions(o);
  } catch (const Error& e) {
    err << "stamp: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<Digest> digests;
  try {
    digests = hash_files(files);
  } catch (const Error& e) {
    err << "stamp: " << e.what() << '\n';
    return kExitIo;
  }

  std::optional<marker::StampResult> stamped;
  try {
    stamped = marker::stamp(names, std::move(digests), repetitions, kdf::random_salt(), backend, clock);
  } catch (const Error& e) {
    err << "stamp: " << e.what() << '\n';
    return exit_for(e);
  }
  const auto& result = *stamped;

  std::vector<fs::path> temps;
  std::vector<fs::path> finals;
  try {
    fs::create_directories(o.out_dir);
    for (const auto& m : result.markers) {
      finals.push_back(o.out_dir / (m.file_name + ".tsm"));
      temps.push_back(o.out_dir / ("." + m.file_name + ".tsm.tmp"));
      write_file(temps.back(), marker::serialize_marker(m));
    }
    for (std::size_t i = 0; i < temps.size(); ++i) fs::rename(temps[i], finals[i]);
  } catch (const std::exception& e) {
    for (const auto& t : temps) remove_quietly(t);
    for (const auto& f : finals) remove_quietly(f);
    err << "stamp: writing markers: " << e.what() << '\n';
    return kExitIo;
  }

  out << "files=" << result.markers.size() << '\n'
      << "root=" << result.tree.root().hex() << '\n'
      << "repetitions=" << result.kdf_params.repetitions << '\n'
      << "commitment=" << result.commitment.digest.hex() << '\n'
      << "backend=" << result.token.backend_id << '\n'
      << "attested_time=" << format_utc(result.token.attested_time) << '\n';
  for (const auto& f : finals) out << "wrote " << f.string() << '\n';
  return kExitOk;
}

int cmd_verify(const fs::path& file, const fs::path& marker_file, const tsa::TimestampBackend& backend,
               std::ostream& out, std::ostream& err) {
  std::string marker_text;
  Digest leaf;
  try {
    marker_text = read_text_file(marker_file);
    leaf = sha256_file(file.string());
  } catch (const Error& e) {
    err << "verify: " << e.what() << '\n';
    return kExitIo;
  }

  marker::TimestampMarker m;
  try {
    m = marker::parse_marker(marker_text);
  } catch (const Error& e) {
    err << "verify: " << marker_file.string() << ": " << e.what() << '\n';
    return kExitUsage;
  }

  const auto report = marker::verify_marker_digest(leaf, m, backend);
  auto flag = [](bool ok) { return ok ? "ok" : "FAIL"; };
  out << "file=" << file.string() << '\n'
      << "marker_file_name=" << m.file_name << '\n'
      << "path_ok=" << flag(report.path_ok) << '\n'
      << "commitment_ok=" << flag(report.commitment_ok) << '\n'
      << "token_ok=" << flag(report.token_ok) << '\n'
      << "attested_time=" << format_utc(m.token.attested_time) << '\n'
      << "overall=" << (report.overall ? "VALID" : "INVALID") << '\n';
  if (report.failure_detail) out << "detail=" << *report.failure_detail << '\n';
  return report.overall ? kExitOk : kExitVerifyFailed;
}

int cmd_estimate(const estimate::CostModel& model, bool want_cost, bool key_value, std::ostream& out,
                 std::ostream& err) {
  if (want_cost && !model.price_per_timestamp) {
    err << "estimate: cost columns need --price (there is no default price)\n";
    return kExitUsage;
  }
  try {
    const auto report = estimate::savings_report(model);
    out << (key_value ? estimate::render_kv(report) : estimate::render_table(report));
    return kExitOk;
  } catch (const Error& e) {
    err << "estimate: " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_margin(const MarginOptions& o, bool key_value, std::ostream& out, std::ostream& err) {
  try {
    const bool seconds_given = o.retention_seconds || o.handling_seconds;
    if (o.window_log2.has_value() == seconds_given) {
      throw Error(Errc::kBadParam, "give --window-log2 or --retention-seconds/--handling-seconds");
    }
    if (o.rate_log2.has_value() == o.rate_hps.has_value()) {
      throw Error(Errc::kBadParam, "give exactly one of --rate-log2 and --rate-hps");
    }
    estimate::AttackFeasibility f;
    if (o.window_log2) {
      const double rate_log2 = o.rate_log2 ? *o.rate_log2 : std::log2(*o.rate_hps);
      f = estimate::security_margin_log2(o.hash_bits, *o.window_log2, rate_log2);
    } else {
      const double rate = o.rate_hps ? *o.rate_hps : std::exp2(*o.rate_log2);
      f = estimate::security_margin(o.hash_bits, o.retention_seconds.value_or(0), o.handling_seconds.value_or(0),
                                    rate);
    }
    if (o.repetitions) f = estimate::kdf_adjusted_margin(f, *o.repetitions);
    out << (key_value ? estimate::render_kv(f) : estimate::render_table(f));
    return kExitOk;
  } catch (const Error& e) {
    err << "margin: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Merkle-aggregated, KDF-hardened timestamping of rotated log files"};
  app.set_config("--config", "", "Read options from a key=value config file");
  app.require_subcommand(1);

  BackendOptions backend;
  std::string backend_name = "ledger";
  auto add_backend_flags = [&](CLI::App* sub) {
    sub->add_option("--backend", backend_name, "Timestamp backend")
        ->check(CLI::IsMember({"ledger", "external"}))
        ->capture_default_str();
    sub->add_option("--ledger", backend.ledger_path, "Local ledger file")->capture_default_str();
    sub->add_option("--tsa-endpoint", backend.tsa_endpoint, "External TSA URL (default: $TSA_ENDPOINT)");
    sub->add_option("--tsa-policy", backend.tsa_policy, "Policy OID sent to the external TSA");
  };

  SplitOptions split;
  auto* split_cmd = app.add_subcommand("split", "Split a log into per-retention-class files");
  split_cmd->add_option("input", split.input, "Log file")->required();
  split_cmd->add_option("--rules", split.rules, "Rules file")->required();
  split_cmd->add_option("--out-dir", split.out_dir)->capture_default_str();

  StampOptions stamp;
  std::uint64_t repetitions = 0;
  double target = 0, max_delay = 0;
  auto* stamp_cmd = app.add_subcommand("stamp", "Timestamp files under one Merkle root");
  stamp_cmd->add_option("files", stamp.files, "Files to stamp")->required();
  stamp_cmd->add_option("--out-dir", stamp.out_dir)->capture_default_str();
  auto* reps_opt = stamp_cmd->add_option("--repetitions", repetitions, "KDF repetitions");
  auto* target_opt = stamp_cmd->add_option("--target-seconds", target, "Calibrate KDF to this delay");
  auto* max_opt = stamp_cmd->add_option("--max-delay-seconds", max_delay, "Allowed timestamping delay");
  add_backend_flags(stamp_cmd);

  std::filesystem::path verify_file, verify_marker;
  auto* verify_cmd = app.add_subcommand("verify", "Check a file against its timestamp marker");
  verify_cmd->add_option("file", verify_file)->required();
  verify_cmd->add_option("marker", verify_marker)->required();
  add_backend_flags(verify_cmd);

  estimate::CostModel model;
  model.marker_overhead_bytes = 0;
  double price = 0;
  bool want_cost = false, estimate_kv = false;
  auto* estimate_cmd = app.add_subcommand("estimate", "Compare legacy and Merkle timestamping storage/cost");
  estimate_cmd->add_option("--n", model.files_per_rotation, "Files per rotation")->required();
  estimate_cmd->add_option("--rotations-per-day", model.rotations_per_day)->capture_default_str();
  estimate_cmd->add_option("--days", model.days)->capture_default_str();
  estimate_cmd->add_option("--hash-size", model.hash_size_bytes)->capture_default_str();
  estimate_cmd->add_option("--token-size", model.token_size_bytes)->capture_default_str();
  estimate_cmd->add_option("--marker-overhead", model.marker_overhead_bytes,
                           "Extra bytes per marker (" + std::to_string(estimate::kMarkerOverheadBytes) +
                               " for the .tsm envelope)")
      ->capture_default_str();
  auto* price_opt = estimate_cmd->add_option("--price", price, "Price per timestamp");
  estimate_cmd->add_flag("--cost", want_cost, "Require cost columns");
  estimate_cmd->add_flag("--kv", estimate_kv, "key=value output");

  MarginOptions margin;
  double m_window = 0, m_rate_log2 = 0, m_rate = 0;
  std::uint64_t m_ret = 0, m_handle = 0, m_reps = 0;
  bool margin_kv = false;
  auto* margin_cmd = app.add_subcommand("margin", "Brute-force feasibility against the timestamped root");
  margin_cmd->add_option("--hash-bits", margin.hash_bits)->capture_default_str();
  auto* mw = margin_cmd->add_option("--window-log2", m_window);
  auto* mret = margin_cmd->add_option("--retention-seconds", m_ret);
  auto* mhandle = margin_cmd->add_option("--handling-seconds", m_handle);
  auto* mrl = margin_cmd->add_option("--rate-log2", m_rate_log2);
  auto* mrh = margin_cmd->add_option("--rate-hps", m_rate);
  auto* mreps = margin_cmd->add_option("--repetitions", m_reps, "KDF repetitions per candidate");
  margin_cmd->add_flag("--kv", margin_kv, "key=value output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kExitUsage;
  }

  backend.kind = backend_name == "external" ? BackendKind::kExternal : BackendKind::kLedger;
  const Clock clock = system_clock();

  if (split_cmd->parsed()) return cmd_split(split, out, err);

  if (stamp_cmd->parsed()) {
    if (*reps_opt) stamp.repetitions = repetitions;
    if (*target_opt) stamp.target_seconds = target;
    if (*max_opt) stamp.max_allowed_seconds = max_delay;
    auto b = make_backend(backend, clock);
    return cmd_stamp(stamp, *b, clock, out, err);
  }

  if (verify_cmd->parsed()) {
    auto b = make_backend(backend, clock);
    return cmd_verify(verify_file, verify_marker, *b, out, err);
  }

  if (estimate_cmd->parsed()) {
    if (*price_opt) model.price_per_timestamp = price;
    return cmd_estimate(model, want_cost, estimate_kv, out, err);
  }

  if (*mw) margin.window_log2 = m_window;
  if (*mret) margin.retention_seconds = m_ret;
  if (*mhandle) margin.handling_seconds = m_handle;
  if (*mrl) margin.rate_log2 = m_rate_log2;
  if (*mrh) margin.rate_hps = m_rate;
  if (*mreps) margin.repetitions = m_reps;
  return cmd_margin(margin, margin_kv, out, err);
}

}  // namespace logstamp::cli
