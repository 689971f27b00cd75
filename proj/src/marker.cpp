#include "logstamp/marker.hpp"

#include <charconv>
#include <sstream>
#include <utility>

#include "logstamp/error.hpp"

namespace logstamp::marker {

namespace {

constexpr std::string_view kFields[] = {"schema_version", "file_name", "leaf_index", "n_files",
                                        "root",           "proof",     "salt",       "repetitions",
                                        "commitment",     "token",     "created_at"};

[[noreturn]] void malformed(std::string_view field, std::string_view why) {
  throw Error(Errc::kMalformedMarker, std::string(field) + ": " + std::string(why));
}

std::uint64_t parse_uint(std::string_view field, std::string_view text) {
  if (text.empty() || (text.size() > 1 && text[0] == '0')) malformed(field, "not a canonical decimal");
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) malformed(field, "not a canonical decimal");
  return v;
}

Digest parse_digest(std::string_view field, std::string_view text) {
  auto d = Digest::from_hex(text);
  if (!d) malformed(field, "expected 64 lowercase hex digits");
  return *d;
}

std::string encode_proof(const merkle::MerkleProof& proof) {
  std::string out;
  for (std::size_t i = 0; i < proof.steps.size(); ++i) {
    if (i) out.push_back(';');
    out.push_back(proof.steps[i].side == merkle::Side::kLeft ? 'L' : 'R');
    out.push_back(':');
    out += proof.steps[i].sibling.hex();
  }
  return out;
}

std::vector<merkle::ProofStep> parse_proof(std::string_view text) {
  std::vector<merkle::ProofStep> steps;
  if (text.empty()) return steps;
  std::size_t pos = 0;
  while (true) {
    const auto end = std::min(text.find(';', pos), text.size());
    const auto item = text.substr(pos, end - pos);
    if (item.size() != 2 + 2 * kDigestSize || item[1] != ':' || (item[0] != 'L' && item[0] != 'R')) {
      malformed("proof", "step " + std::to_string(steps.size()) + " is not side:hex");
    }
    steps.push_back({parse_digest("proof", item.substr(2)), item[0] == 'L' ? merkle::Side::kLeft : merkle::Side::kRight});
    if (end == text.size()) break;
    pos = end + 1;
  }
  return steps;
}

bool valid_text_field(std::string_view s) {
  return s.find('\n') == std::string_view::npos && s.find('\r') == std::string_view::npos;
}

}  // namespace

std::vector<TimestampMarker> assemble_markers(std::span<const std::string> file_names,
                                              const merkle::MerkleTree& tree, const kdf::KdfParams& kdf_params,
                                              const kdf::Commitment& commitment, const tsa::TimestampToken& token,
                                              const std::string& created_at) {
  if (file_names.size() != tree.leaf_count() || kdf_params.n_files != tree.leaf_count()) {
    throw Error(Errc::kCountMismatch, std::to_string(file_names.size()) + " names, " +
                                          std::to_string(tree.leaf_count()) + " leaves, n_files " +
                                          std::to_string(kdf_params.n_files));
  }
  std::vector<TimestampMarker> markers;
  markers.reserve(file_names.size());
  for (std::size_t i = 0; i < file_names.size(); ++i) {
    TimestampMarker m;
    m.file_name = file_names[i];
    m.leaf_index = i;
    m.proof = merkle::merkle_path(tree, i);
    m.root = tree.root();
    m.kdf_params = kdf_params;
    m.commitment = commitment;
    m.token = token;
    m.created_at = created_at;
    markers.push_back(std::move(m));
  }
  return markers;
}

std::string serialize_marker(const TimestampMarker& m) {
  if (!valid_text_field(m.file_name) || !valid_text_field(m.created_at)) {
    throw Error(Errc::kMalformedMarker, "file_name/created_at must be single-line");
  }
  std::string out;
  out.reserve(512 + 67 * m.proof.steps.size() + m.token.evidence.size() * 2);
  auto line = [&out](std::string_view key, std::string_view value) {
    out.append(key).push_back('=');
    out.append(value).push_back('\n');
  };
  line("schema_version", std::to_string(m.schema_version));
  line("file_name", m.file_name);
  line("leaf_index", std::to_string(m.leaf_index));
  line("n_files", std::to_string(m.kdf_params.n_files));
  line("root", m.root.hex());
  line("proof", encode_proof(m.proof));
  line("salt", to_hex(m.kdf_params.salt));
  line("repetitions", std::to_string(m.kdf_params.repetitions));
  line("commitment", m.commitment.digest.hex());
  line("token", base64_encode(tsa::encode_token(m.token)));
  line("created_at", m.created_at);
  out.push_back('\n');
  return out;
}

TimestampMarker parse_marker(std::string_view text) {
  std::vector<std::string_view> values;
  std::size_t pos = 0;
  for (const auto key : kFields) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) malformed(key, "truncated");
    const auto line = text.substr(pos, nl - pos);
    if (line.size() <= key.size() || line.substr(0, key.size()) != key || line[key.size()] != '=') {
      malformed(key, "expected '" + std::string(key) + "=' line");
    }
    values.push_back(line.substr(key.size() + 1));
    pos = nl + 1;

    if (key == "schema_version") {
      if (values.back() != std::to_string(kSchemaVersion)) {
        throw Error(Errc::kVersion, "unsupported schema_version '" + std::string(values.back()) + "'");
      }
    }
  }
  if (text.substr(pos) != "\n") malformed("terminator", "expected a single blank line at end");

  TimestampMarker m;
  m.schema_version = kSchemaVersion;
  m.file_name = std::string(values[1]);
  m.leaf_index = parse_uint("leaf_index", values[2]);
  m.kdf_params.n_files = parse_uint("n_files", values[3]);
  m.root = parse_digest("root", values[4]);
  m.proof.leaf_index = m.leaf_index;
  m.proof.steps = parse_proof(values[5]);

  const auto salt = from_hex(values[6]);
  if (!salt || salt->size() != kdf::kSaltSize) malformed("salt", "expected 32 lowercase hex digits");
  std::copy(salt->begin(), salt->end(), m.kdf_params.salt.begin());
  m.kdf_params.repetitions = parse_uint("repetitions", values[7]);
  m.commitment.digest = parse_digest("commitment", values[8]);

  const auto token_bytes = base64_decode(values[9]);
  if (!token_bytes) malformed("token", "not canonical base64");
  auto token = tsa::decode_token(*token_bytes);
  if (!token) malformed("token", "bad token framing");
  m.token = std::move(*token);

  if (!parse_utc(values[10])) malformed("created_at", "expected YYYY-MM-DDTHH:MM:SSZ");
  m.created_at = std::string(values[10]);

  if (m.file_name.empty()) malformed("file_name", "empty");
  if (m.kdf_params.n_files == 0) malformed("n_files", "must be >= 1");
  if (m.kdf_params.repetitions == 0) malformed("repetitions", "must be >= 1");
  return m;
}

VerificationReport verify_marker_digest(const Digest& leaf_digest, const TimestampMarker& marker,
                                        const tsa::TimestampBackend& backend) {
  VerificationReport report;
  std::vector<std::string> problems;

  if (marker.proof.leaf_index != marker.leaf_index) {
    problems.emplace_back("proof leaf_index differs from marker leaf_index");
  } else {
    try {
      report.path_ok = merkle::fold_path(leaf_digest, marker.proof) == marker.root;
      if (!report.path_ok) problems.emplace_back("content and Merkle path do not reproduce the root");
    } catch (const Error& e) {
      problems.emplace_back(e.what());
    }
  }

  // n_files fixes the proof length, so the shape check belongs to the
  // committed-parameter verdict.
  const auto& params = marker.kdf_params;
  const bool shape_ok = params.repetitions >= 1 && params.n_files >= 1 && marker.leaf_index < params.n_files &&
                        marker.proof.steps.size() == merkle::proof_length(params.n_files);
  if (!shape_ok) {
    problems.emplace_back("proof shape does not match committed n_files");
  } else {
    const Digest hardened = kdf::kdf_chain(marker.root, params.salt, params.repetitions);
    report.commitment_ok = kdf::verify_commitment(marker.commitment, hardened, params);
    if (!report.commitment_ok) problems.emplace_back("commitment does not match root and KDF parameters");
  }

  report.token_ok = backend.verify_token(marker.token, marker.commitment.digest);
  if (!report.token_ok) problems.emplace_back("token does not attest the commitment");

  report.overall = report.path_ok && report.commitment_ok && report.token_ok;
  if (!problems.empty()) {
    std::ostringstream joined;
    for (std::size_t i = 0; i < problems.size(); ++i) joined << (i ? "; " : "") << problems[i];
    report.failure_detail = joined.str();
  }
  return report;
}

VerificationReport verify_marker(ByteView content, const TimestampMarker& marker,
                                 const tsa::TimestampBackend& backend) {
  return verify_marker_digest(merkle::hash_leaf(content), marker, backend);
}

StampResult stamp(std::span<const std::string> file_names, std::vector<Digest> leaf_digests,
                  std::uint64_t repetitions, const kdf::Salt& salt, tsa::TimestampBackend& backend,
                  const Clock& clock) {
  if (file_names.size() != leaf_digests.size()) {
    throw Error(Errc::kCountMismatch, "names and digests differ in count");
  }
  auto tree = merkle::build_tree_from_digests(std::move(leaf_digests));
  kdf::KdfParams params{salt, repetitions, tree.leaf_count()};
  kdf::validate(params);

  const Digest hardened = kdf::kdf_chain(tree.root(), params.salt, params.repetitions);
  const kdf::Commitment commitment = kdf::commit(hardened, params);
  auto token = backend.request_timestamp(commitment.digest);
  auto markers = assemble_markers(file_names, tree, params, commitment, token, format_utc(clock()));
  return StampResult{std::move(tree), params, hardened, commitment, std::move(token), std::move(markers)};
}

std::vector<tsa::TimestampToken> stamp_legacy(std::span<const Digest> leaf_digests, tsa::TimestampBackend& backend) {
  std::vector<tsa::TimestampToken> tokens;
  tokens.reserve(leaf_digests.size());
  for (const auto& d : leaf_digests) tokens.push_back(backend.request_timestamp(d));
  return tokens;
}

}  // namespace logstamp::marker
