#include <omp.h>

#include <cstdint>
#include <utility>

#include "logstamp/error.hpp"
#include "logstamp/merkle.hpp"

namespace logstamp::merkle {

namespace {

// Below this many nodes the fork/join overhead dominates one SHA-256 each.
constexpr std::int64_t kParallelThreshold = 256;

}  // namespace

std::vector<Digest> hash_leaves(std::span<const ByteView> contents) {
  const auto n = static_cast<std::int64_t>(contents.size());
  std::vector<Digest> out(contents.size());
  // Leaf sizes vary wildly for log files, hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 16) if (n >= 8)
  for (std::int64_t i = 0; i < n; ++i) {
    out[i] = hash_leaf(contents[i]);
  }
  return out;
}

std::vector<Digest> next_level(std::span<const Digest> level) {
  const auto parents = static_cast<std::int64_t>((level.size() + 1) / 2);
  const std::size_t size = level.size();
  std::vector<Digest> out(static_cast<std::size_t>(parents));
#pragma omp parallel for schedule(static) if (parents >= kParallelThreshold)
  for (std::int64_t p = 0; p < parents; ++p) {
    const std::size_t left = 2 * static_cast<std::size_t>(p);
    const std::size_t right = left + 1 < size ? left + 1 : left;
    out[p] = hash_children(level[left], level[right]);
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

}  // namespace logstamp::merkle
