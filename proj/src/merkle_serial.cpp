#include <utility>

#include "logstamp/error.hpp"
#include "logstamp/merkle.hpp"

namespace logstamp::merkle::serial {

std::vector<Digest> hash_leaves(std::span<const ByteView> contents) {
  std::vector<Digest> out;
  out.reserve(contents.size());
  for (const auto& c : contents) out.push_back(hash_leaf(c));
  return out;
}

std::vector<Digest> next_level(std::span<const Digest> level) {
  std::vector<Digest> out;
  out.reserve((level.size() + 1) / 2);
  for (std::size_t i = 0; i < level.size(); i += 2) {
    const Digest& right = i + 1 < level.size() ? level[i + 1] : level[i];
    out.push_back(hash_children(level[i], right));
  }
  return out;
}

MerkleTree build_tree_from_digests(std::vector<Digest> leaf_digests) {
  if (leaf_digests.empty()) throw Error(Errc::kEmptyInput, "nothing to timestamp");
  std::vector<std::vector<Digest>> levels;
  levels.push_back(std::move(leaf_digests));
  while (levels.back().size() > 1) {
    auto up = next_level(levels.back());
    levels.push_back(std::move(up));
  }
  return MerkleTree(std::move(levels));
}

MerkleTree build_tree(std::span<const ByteView> contents) {
  if (contents.empty()) throw Error(Errc::kEmptyInput, "nothing to timestamp");
  return build_tree_from_digests(hash_leaves(contents));
}

}  // namespace logstamp::merkle::serial
