#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "logstamp/digest.hpp"

namespace logstamp::merkle {

// Which side of the running digest the sibling is concatenated on.
enum class Side : std::uint8_t { kLeft, kRight };

struct ProofStep {
  Digest sibling;
  Side side = Side::kRight;

  friend bool operator==(const ProofStep&, const ProofStep&) = default;
};

// Merkle path for one leaf, ordered from the leaf toward the root. Positions
// whose node has no sibling carry the running digest itself (duplication),
// so every proof for a tree of n leaves has exactly ceil(log2 n) steps.
struct MerkleProof {
  std::size_t leaf_index = 0;
  std::vector<ProofStep> steps;

  friend bool operator==(const MerkleProof&, const MerkleProof&) = default;
};

class MerkleTree {
 public:
  // levels[0] holds the leaf digests; each level above has ceil(size/2)
  // nodes; the last level holds only the root.
  explicit MerkleTree(std::vector<std::vector<Digest>> levels);

  [[nodiscard]] std::size_t leaf_count() const noexcept { return levels_.front().size(); }
  [[nodiscard]] std::size_t height() const noexcept { return levels_.size() - 1; }
  [[nodiscard]] const Digest& root() const noexcept { return levels_.back().front(); }
  [[nodiscard]] const std::vector<std::vector<Digest>>& levels() const noexcept { return levels_; }

  friend bool operator==(const MerkleTree&, const MerkleTree&) = default;

 private:
  std::vector<std::vector<Digest>> levels_;
};

// ceil(log2 n), 0 for n <= 1.
[[nodiscard]] std::size_t proof_length(std::size_t n) noexcept;

[[nodiscard]] Digest hash_leaf(ByteView content);

// Parent of one node pair; a lone child is paired with itself.
[[nodiscard]] inline Digest hash_children(const Digest& left, const Digest& right) {
  return sha256_pair(left, right);
}

// OpenMP kernels. Bit-identical to the serial:: versions below.
[[nodiscard]] std::vector<Digest> hash_leaves(std::span<const ByteView> contents);
[[nodiscard]] std::vector<Digest> next_level(std::span<const Digest> level);
[[nodiscard]] MerkleTree build_tree_from_digests(std::vector<Digest> leaf_digests);
[[nodiscard]] MerkleTree build_tree(std::span<const ByteView> contents);
[[nodiscard]] MerkleTree build_tree(std::span<const Bytes> contents);
[[nodiscard]] MerkleTree build_tree(std::span<const std::string> contents);

// Single-threaded reference path, kept for equivalence tests and benchmarks.
namespace serial {
[[nodiscard]] std::vector<Digest> hash_leaves(std::span<const ByteView> contents);
[[nodiscard]] std::vector<Digest> next_level(std::span<const Digest> level);
[[nodiscard]] MerkleTree build_tree_from_digests(std::vector<Digest> leaf_digests);
[[nodiscard]] MerkleTree build_tree(std::span<const ByteView> contents);
}  // namespace serial

[[nodiscard]] MerkleProof merkle_path(const MerkleTree& tree, std::size_t leaf_index);

// Folds a leaf digest through the proof. Throws kMalformedProof if the step
// sides disagree with the bits of leaf_index.
[[nodiscard]] Digest fold_path(const Digest& leaf_digest, const MerkleProof& proof);

[[nodiscard]] bool verify_path(ByteView content, const MerkleProof& proof, const Digest& expected_root);

}  // namespace logstamp::merkle
