#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sbp/errors.hpp"

namespace sbp {

using Block = std::size_t;

// Block assignment b with block count B. Labels are compact (every label in
// [0, B) used) after construction via make_partition/compact and after every
// engine phase; the engine never lets a nodal move empty a block.
struct Partition {
  std::vector<Block> assignment;
  std::size_t num_blocks = 0;

  std::size_t size() const noexcept { return assignment.size(); }
  Block operator[](std::size_t i) const { return assignment[i]; }

  friend bool operator==(const Partition&, const Partition&) = default;
};

inline Partition singleton_partition(std::size_t num_nodes) {
  Partition p;
  p.assignment.resize(num_nodes);
  std::iota(p.assignment.begin(), p.assignment.end(), Block{0});
  p.num_blocks = num_nodes;
  return p;
}

inline std::vector<std::size_t> block_sizes(const Partition& p) {
  std::vector<std::size_t> sizes(p.num_blocks, 0);
  for (Block b : p.assignment) ++sizes.at(b);
  return sizes;
}

inline bool is_compact(const Partition& p) {
  const auto sizes = block_sizes(p);
  return std::none_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; });
}

// Relabels used blocks to [0, B) preserving the order of the old labels.
inline Partition compact(const Partition& p) {
  std::size_t bound = p.num_blocks;
  for (Block b : p.assignment) bound = std::max(bound, b + 1);
  std::vector<Block> remap(bound, 0);
  std::vector<bool> used(bound, false);
  for (Block b : p.assignment) used[b] = true;
  Block next = 0;
  for (std::size_t b = 0; b < bound; ++b) {
    if (used[b]) remap[b] = next++;
  }
  Partition out;
  out.assignment.reserve(p.size());
  for (Block b : p.assignment) out.assignment.push_back(remap[b]);
  out.num_blocks = next;
  return out;
}

// Builds a compact partition from raw labels.
inline Partition make_partition(std::vector<Block> assignment) {
  Partition p;
  p.num_blocks = 0;
  for (Block b : assignment) p.num_blocks = std::max(p.num_blocks, b + 1);
  p.assignment = std::move(assignment);
  return compact(p);
}

inline void validate_partition(const Partition& p, std::size_t num_nodes) {
  if (p.size() != num_nodes) {
    detail::fail("partition covers " + std::to_string(p.size()) + " nodes, graph has " + std::to_string(num_nodes));
  }
  for (Block b : p.assignment) {
    if (b >= p.num_blocks) {
      detail::fail("block label " + std::to_string(b) + " out of range [0, " + std::to_string(p.num_blocks) + ")");
    }
  }
}

}  // namespace sbp
