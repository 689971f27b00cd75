#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logstamp/kdf.hpp"
#include "logstamp/merkle.hpp"
#include "logstamp/tsa.hpp"

namespace logstamp::marker {

inline constexpr int kSchemaVersion = 1;

// Per-file evidence: the single timestamped root, this file's Merkle path,
// the KDF parameters with their commitment, and the token over the
// commitment. created_at is informational and never checked.
struct TimestampMarker {
  int schema_version = kSchemaVersion;
  std::string file_name;
  std::size_t leaf_index = 0;
  merkle::MerkleProof proof;
  Digest root;
  kdf::KdfParams kdf_params;
  kdf::Commitment commitment;
  tsa::TimestampToken token;
  std::string created_at;

  friend bool operator==(const TimestampMarker&, const TimestampMarker&) = default;
};

struct VerificationReport {
  bool path_ok = false;
  bool commitment_ok = false;
  bool token_ok = false;
  bool overall = false;
  std::optional<std::string> failure_detail;
};

// Throws kCountMismatch unless names, tree leaves and params.n_files agree.
std::vector<TimestampMarker> assemble_markers(std::span<const std::string> file_names,
                                              const merkle::MerkleTree& tree, const kdf::KdfParams& kdf_params,
                                              const kdf::Commitment& commitment, const tsa::TimestampToken& token,
                                              const std::string& created_at);

// `.tsm` text envelope: key=value lines in fixed order, LF endings, blank
// line terminator. Digests lowercase hex, token base64.
std::string serialize_marker(const TimestampMarker& marker);

// Throws kVersion for an unknown schema_version, kMalformedMarker (naming
// the field) for anything else that does not match the envelope exactly.
TimestampMarker parse_marker(std::string_view text);

VerificationReport verify_marker(ByteView content, const TimestampMarker& marker,
                                 const tsa::TimestampBackend& backend);
// Same checks starting from an already computed leaf digest.
VerificationReport verify_marker_digest(const Digest& leaf_digest, const TimestampMarker& marker,
                                        const tsa::TimestampBackend& backend);

struct StampResult {
  merkle::MerkleTree tree;
  kdf::KdfParams kdf_params;
  Digest kdf_output;
  kdf::Commitment commitment;
  tsa::TimestampToken token;
  std::vector<TimestampMarker> markers;
};

// root -> kdf_chain -> commitment -> one request_timestamp -> n markers.
StampResult stamp(std::span<const std::string> file_names, std::vector<Digest> leaf_digests,
                  std::uint64_t repetitions, const kdf::Salt& salt, tsa::TimestampBackend& backend,
                  const Clock& clock);

// One token per file, the way files are stamped without aggregation.
std::vector<tsa::TimestampToken> stamp_legacy(std::span<const Digest> leaf_digests, tsa::TimestampBackend& backend);

}  // namespace logstamp::marker
