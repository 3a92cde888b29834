#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hbw/error.hpp"
#include "hbw/types.hpp"

namespace hbw {

struct BlockOrigin {
  Eigen::Index row = 0;
  Eigen::Index col = 0;

  friend bool operator==(const BlockOrigin&, const BlockOrigin&) = default;
};

// Uniform partition of a matrix into disjoint block_size x block_size tiles.
// blocks[i] was copied from the source at origins[i]; the pair travels
// together under permutation and segmentation.
template <typename Scalar>
struct BlockPartition {
  Eigen::Index block_size = 0;
  Eigen::Index grid_rows = 0;
  Eigen::Index grid_cols = 0;
  std::vector<Matrix<Scalar>> blocks;
  std::vector<BlockOrigin> origins;

  std::size_t size() const { return blocks.size(); }
  Eigen::Index source_rows() const { return grid_rows * block_size; }
  Eigen::Index source_cols() const { return grid_cols * block_size; }
};

// mapping[i] is the source position of the block now at position i.
struct BlockPermutation {
  std::uint64_t seed = 0;
  std::vector<std::size_t> mapping;
};

template <typename Derived>
BlockPartition<typename Derived::Scalar> partition_blocks(const Eigen::MatrixBase<Derived>& m,
                                                          Eigen::Index block_size) {
  using Scalar = typename Derived::Scalar;
  if (block_size < 1) throw Error(ErrorCode::invalid_dimensions, "block size must be positive");
  if (m.rows() % block_size != 0 || m.cols() % block_size != 0) {
    throw Error(ErrorCode::dimension_not_divisible, std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                                        " is not divisible by block size " +
                                                        std::to_string(block_size));
  }
  BlockPartition<Scalar> p;
  p.block_size = block_size;
  p.grid_rows = m.rows() / block_size;
  p.grid_cols = m.cols() / block_size;
  p.blocks.reserve(static_cast<std::size_t>(p.grid_rows * p.grid_cols));
  p.origins.reserve(p.blocks.capacity());
  for (Eigen::Index br = 0; br < p.grid_rows; ++br) {
    for (Eigen::Index bc = 0; bc < p.grid_cols; ++bc) {
      const BlockOrigin o{br * block_size, bc * block_size};
      p.blocks.emplace_back(m.block(o.row, o.col, block_size, block_size));
      p.origins.push_back(o);
    }
  }
  return p;
}

// Writes every block back at its origin, so assembly also works on permuted
// partitions.
template <typename Scalar>
Matrix<Scalar> assemble_blocks(const BlockPartition<Scalar>& p) {
  Matrix<Scalar> m = Matrix<Scalar>::Zero(p.source_rows(), p.source_cols());
  for (std::size_t i = 0; i < p.blocks.size(); ++i) {
    m.block(p.origins[i].row, p.origins[i].col, p.block_size, p.block_size) = p.blocks[i];
  }
  return m;
}

// Block order is shuffled with Fisher-Yates driven by std::mt19937_64 seeded
// with `seed`; both are fully specified so permutations are reproducible
// across platforms. (std::shuffle is avoided: its algorithm is unspecified.)
template <typename Scalar>
std::pair<BlockPartition<Scalar>, BlockPermutation> permute_blocks(const BlockPartition<Scalar>& p,
                                                                   std::uint64_t seed) {
  BlockPermutation perm{seed, std::vector<std::size_t>(p.size())};
  std::iota(perm.mapping.begin(), perm.mapping.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = perm.mapping.size(); i > 1; --i) {
    // Uniform draw in [0, i) by rejection; no modulo bias.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::mt19937_64::max() - (std::mt19937_64::max() % bound + 1) % bound;
    std::uint64_t draw = rng();
    while (draw > limit) draw = rng();
    std::swap(perm.mapping[i - 1], perm.mapping[static_cast<std::size_t>(draw % bound)]);
  }

  BlockPartition<Scalar> out;
  out.block_size = p.block_size;
  out.grid_rows = p.grid_rows;
  out.grid_cols = p.grid_cols;
  out.blocks.reserve(p.size());
  out.origins.reserve(p.size());
  for (std::size_t src : perm.mapping) {
    out.blocks.push_back(p.blocks[src]);
    out.origins.push_back(p.origins[src]);
  }
  return {std::move(out), std::move(perm)};
}

template <typename Scalar>
BlockPartition<Scalar> unpermute_blocks(const BlockPartition<Scalar>& p, const BlockPermutation& perm) {
  if (perm.mapping.size() != p.size()) {
    throw Error(ErrorCode::q_mismatch, "permutation over " + std::to_string(perm.mapping.size()) +
                                           " blocks applied to a partition of " + std::to_string(p.size()));
  }
  BlockPartition<Scalar> out;
  out.block_size = p.block_size;
  out.grid_rows = p.grid_rows;
  out.grid_cols = p.grid_cols;
  out.blocks.resize(p.size());
  out.origins.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.blocks[perm.mapping[i]] = p.blocks[i];
    out.origins[perm.mapping[i]] = p.origins[i];
  }
  return out;
}

inline BlockPermutation invert(const BlockPermutation& perm) {
  BlockPermutation inv{perm.seed, std::vector<std::size_t>(perm.mapping.size())};
  for (std::size_t i = 0; i < perm.mapping.size(); ++i) inv.mapping[perm.mapping[i]] = i;
  return inv;
}

// Contiguous runs of Q / n_segments blocks. Each segment keeps the grid
// geometry of the parent so its blocks can still be assembled in place.
template <typename Scalar>
std::vector<BlockPartition<Scalar>> segment_blocks(const BlockPartition<Scalar>& p, std::size_t n_segments) {
  if (n_segments == 0 || p.size() % n_segments != 0) {
    throw Error(ErrorCode::segment_count_not_divisor, std::to_string(n_segments) + " segments do not divide " +
                                                          std::to_string(p.size()) + " blocks");
  }
  const std::size_t per = p.size() / n_segments;
  std::vector<BlockPartition<Scalar>> segments(n_segments);
  for (std::size_t s = 0; s < n_segments; ++s) {
    auto& seg = segments[s];
    seg.block_size = p.block_size;
    seg.grid_rows = p.grid_rows;
    seg.grid_cols = p.grid_cols;
    seg.blocks.assign(p.blocks.begin() + static_cast<std::ptrdiff_t>(s * per),
                      p.blocks.begin() + static_cast<std::ptrdiff_t>((s + 1) * per));
    seg.origins.assign(p.origins.begin() + static_cast<std::ptrdiff_t>(s * per),
                       p.origins.begin() + static_cast<std::ptrdiff_t>((s + 1) * per));
  }
  return segments;
}

template <typename Scalar>
BlockPartition<Scalar> concatenate_segments(const std::vector<BlockPartition<Scalar>>& segments) {
  BlockPartition<Scalar> out;
  if (segments.empty()) return out;
  out.block_size = segments.front().block_size;
  out.grid_rows = segments.front().grid_rows;
  out.grid_cols = segments.front().grid_cols;
  for (const auto& seg : segments) {
    out.blocks.insert(out.blocks.end(), seg.blocks.begin(), seg.blocks.end());
    out.origins.insert(out.origins.end(), seg.origins.begin(), seg.origins.end());
  }
  return out;
}

}  // namespace hbw
