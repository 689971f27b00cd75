#include "logstamp/merkle.hpp"

#include <bit>
#include <utility>

#include "logstamp/error.hpp"

namespace logstamp::merkle {

MerkleTree::MerkleTree(std::vector<std::vector<Digest>> levels) : levels_(std::move(levels)) {
  if (levels_.empty() || levels_.front().empty()) {
    throw Error(Errc::kEmptyInput, "tree needs at least one leaf");
  }
}

std::size_t proof_length(std::size_t n) noexcept {
  if (n <= 1) return 0;
  return static_cast<std::size_t>(std::bit_width(n - 1));
}

Digest hash_leaf(ByteView content) { return sha256(content); }

namespace {

std::vector<ByteView> views_of(std::span<const Bytes> contents) {
  std::vector<ByteView> views;
  views.reserve(contents.size());
  for (const auto& c : contents) views.emplace_back(c);
  return views;
}

std::vector<ByteView> views_of(std::span<const std::string> contents) {
  std::vector<ByteView> views;
  views.reserve(contents.size());
  for (const auto& c : contents) views.push_back(as_bytes(c));
  return views;
}

}  // namespace

MerkleTree build_tree(std::span<const ByteView> contents) {
  if (contents.empty()) throw Error(Errc::kEmptyInput, "nothing to timestamp");
  return build_tree_from_digests(hash_leaves(contents));
}

MerkleTree build_tree(std::span<const Bytes> contents) {
  const auto views = views_of(contents);
  return build_tree(std::span<const ByteView>(views));
}

MerkleTree build_tree(std::span<const std::string> contents) {
  const auto views = views_of(contents);
  return build_tree(std::span<const ByteView>(views));
}

MerkleProof merkle_path(const MerkleTree& tree, std::size_t leaf_index) {
  if (leaf_index >= tree.leaf_count()) {
    throw Error(Errc::kIndexRange,
                "leaf " + std::to_string(leaf_index) + " of " + std::to_string(tree.leaf_count()));
  }
  MerkleProof proof;
  proof.leaf_index = leaf_index;
  proof.steps.reserve(tree.height());

  std::size_t pos = leaf_index;
  for (std::size_t k = 0; k < tree.height(); ++k) {
    const auto& level = tree.levels()[k];
    if (pos % 2 == 1) {
      proof.steps.push_back({level[pos - 1], Side::kLeft});
    } else if (pos + 1 < level.size()) {
      proof.steps.push_back({level[pos + 1], Side::kRight});
    } else {
      // single child: canonical proofs repeat the node itself
      proof.steps.push_back({level[pos], Side::kRight});
    }
    pos /= 2;
  }
  return proof;
}

Digest fold_path(const Digest& leaf_digest, const MerkleProof& proof) {
  const std::size_t depth = proof.steps.size();
  if (depth < 64 && (proof.leaf_index >> depth) != 0) {
    throw Error(Errc::kMalformedProof, "leaf_index does not fit in " + std::to_string(depth) + " steps");
  }
  Digest running = leaf_digest;
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& step = proof.steps[k];
    const bool index_bit = k < 64 && ((proof.leaf_index >> k) & 1U) != 0;
    const Side expected = index_bit ? Side::kLeft : Side::kRight;
    if (step.side != expected) {
      throw Error(Errc::kMalformedProof, "step " + std::to_string(k) + " side disagrees with leaf_index");
    }
    running = step.side == Side::kLeft ? hash_children(step.sibling, running)
                                       : hash_children(running, step.sibling);
  }
  return running;
}

bool verify_path(ByteView content, const MerkleProof& proof, const Digest& expected_root) {
  return fold_path(hash_leaf(content), proof) == expected_root;
}

}  // namespace logstamp::merkle
