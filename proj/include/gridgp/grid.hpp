#ifndef GRIDGP_GRID_HPP
#define GRIDGP_GRID_HPP

#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridgp/errors.hpp"

namespace gridgp {

using Vec = Eigen::VectorXd;

inline std::int64_t product_of(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) p *= d;
  return p;
}

/// Evenly spaced D-dimensional grid of inducing locations. Linear indices
/// are C-order: the last dimension varies fastest.
struct InducingGrid {
  std::vector<int> dims;
  Vec spacing;
  Vec origin;

  InducingGrid() = default;
  InducingGrid(std::vector<int> dims_, Vec spacing_, Vec origin_)
      : dims(std::move(dims_)), spacing(std::move(spacing_)), origin(std::move(origin_)) {
    validate();
  }

  int input_dim() const { return static_cast<int>(dims.size()); }
  std::int64_t size() const { return product_of(dims); }

  void validate() const {
    if (dims.empty()) throw std::invalid_argument("grid: dims empty");
    for (int d : dims)
      if (d < 1) throw std::invalid_argument("grid: dims must be >= 1");
    if (spacing.size() != input_dim() || origin.size() != input_dim())
      throw std::invalid_argument("grid: spacing/origin dimension mismatch");
    for (int d = 0; d < input_dim(); ++d)
      if (!(spacing[d] > 0.0)) throw std::invalid_argument("grid: spacing must be positive");
  }

  std::vector<int> multi_index(std::int64_t linear) const {
    std::vector<int> mi(dims.size());
    for (int d = input_dim() - 1; d >= 0; --d) {
      mi[d] = static_cast<int>(linear % dims[d]);
      linear /= dims[d];
    }
    return mi;
  }

  std::int64_t linear_index(const std::vector<int>& mi) const {
    std::int64_t idx = 0;
    for (int d = 0; d < input_dim(); ++d) idx = idx * dims[d] + mi[d];
    return idx;
  }

  Vec point(std::int64_t linear) const {
    if (linear < 0 || linear >= size())
      throw IndexOutOfRange("grid point index " + std::to_string(linear) + " out of range");
    Vec x = origin;
    const auto mi = multi_index(linear);
    for (int d = 0; d < input_dim(); ++d) x[d] += mi[d] * spacing[d];
    return x;
  }

  /// Grid of the circulant embedding: dims doubled, same spacing/origin.
  InducingGrid doubled() const {
    std::vector<int> dd(dims);
    for (int& d : dd) d *= 2;
    return InducingGrid(dd, spacing, origin);
  }
};

/// Permutation between C-order grid indexing and block-major indexing,
/// where blocks are axis-aligned tiles enumerated in C-order and points
/// within each tile are enumerated in C-order. perm[p] is the original
/// C-order index of the p-th entry in block-major order.
struct BlockLayout {
  std::vector<int> grid_dims;
  std::vector<int> block_dims;
  std::vector<std::int64_t> perm;
  std::vector<std::int64_t> inv_perm;
  std::int64_t num_blocks = 0;
  std::int64_t block_size = 0;

  std::int64_t size() const { return static_cast<std::int64_t>(perm.size()); }

  template <typename Derived>
  Eigen::VectorXd gather(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != size()) throw ShapeMismatch("block gather: length mismatch");
    Eigen::VectorXd out(size());
    for (std::int64_t p = 0; p < size(); ++p) out[p] = v[perm[p]];
    return out;
  }

  template <typename Derived>
  Eigen::VectorXd scatter(const Eigen::MatrixBase<Derived>& v) const {
    if (v.size() != size()) throw ShapeMismatch("block scatter: length mismatch");
    Eigen::VectorXd out(size());
    for (std::int64_t p = 0; p < size(); ++p) out[perm[p]] = v[p];
    return out;
  }
};

/// Build the block-major permutation for axis-aligned tiles of shape
/// block_dims covering a grid of shape grid_dims (elementwise divisible).
inline BlockLayout block_permutation(const std::vector<int>& grid_dims,
                                     const std::vector<int>& block_dims) {
  if (grid_dims.size() != block_dims.size())
    throw NonDividingBlocks("block_permutation: dimension count mismatch");
  const int D = static_cast<int>(grid_dims.size());
  for (int d = 0; d < D; ++d) {
    if (block_dims[d] < 1 || grid_dims[d] < 1 || grid_dims[d] % block_dims[d] != 0)
      throw NonDividingBlocks("block_permutation: block dims must divide grid dims");
  }

  BlockLayout layout;
  layout.grid_dims = grid_dims;
  layout.block_dims = block_dims;
  layout.block_size = product_of(block_dims);
  const std::int64_t total = product_of(grid_dims);
  layout.num_blocks = total / layout.block_size;
  layout.perm.resize(total);
  layout.inv_perm.resize(total);

  std::vector<int> tiles(D);
  for (int d = 0; d < D; ++d) tiles[d] = grid_dims[d] / block_dims[d];

  std::vector<int> tile_mi(D, 0), local_mi(D, 0);
  std::int64_t p = 0;
  auto advance = [](std::vector<int>& mi, const std::vector<int>& lim) {
    for (int d = static_cast<int>(mi.size()) - 1; d >= 0; --d) {
      if (++mi[d] < lim[d]) return true;
      mi[d] = 0;
    }
    return false;
  };
  do {
    std::fill(local_mi.begin(), local_mi.end(), 0);
    do {
      std::int64_t orig = 0;
      for (int d = 0; d < D; ++d)
        orig = orig * grid_dims[d] + (tile_mi[d] * block_dims[d] + local_mi[d]);
      layout.perm[p++] = orig;
    } while (advance(local_mi, block_dims));
  } while (advance(tile_mi, tiles));

  for (std::int64_t i = 0; i < total; ++i) layout.inv_perm[layout.perm[i]] = i;
  return layout;
}

} // namespace gridgp

#endif
