#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace hbw {

// Tournament tree over per-block cached maxima. Updating one slot and reading
// the global winner are both O(log Q). Ties go to the smaller key, which the
// scheduler sets to the block id.
template <typename Scalar>
class MaxTracker {
 public:
  static constexpr Scalar kInactive = -std::numeric_limits<Scalar>::infinity();

  MaxTracker(std::vector<Scalar> values, std::vector<std::size_t> keys)
      : size_(values.size()), values_(std::move(values)), keys_(std::move(keys)) {
    leaves_ = 1;
    while (leaves_ < size_) leaves_ *= 2;
    tree_.assign(2 * leaves_, npos);
    for (std::size_t i = 0; i < size_; ++i) tree_[leaves_ + i] = i;
    for (std::size_t node = leaves_ - 1; node >= 1; --node) tree_[node] = winner(tree_[2 * node], tree_[2 * node + 1]);
  }

  void update(std::size_t slot, Scalar value) {
    values_[slot] = value;
    for (std::size_t node = (leaves_ + slot) / 2; node >= 1; node /= 2) {
      tree_[node] = winner(tree_[2 * node], tree_[2 * node + 1]);
    }
  }

  // Slot holding the maximum, or npos when every slot is inactive.
  std::size_t top() const {
    const std::size_t best = tree_[1];
    if (best == npos || values_[best] == kInactive) return npos;
    return best;
  }

  Scalar value(std::size_t slot) const { return values_[slot]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t winner(std::size_t a, std::size_t b) const {
    if (a == npos) return b;
    if (b == npos) return a;
    if (values_[a] != values_[b]) return values_[a] > values_[b] ? a : b;
    return keys_[a] <= keys_[b] ? a : b;
  }

  std::size_t size_;
  std::size_t leaves_ = 1;
  std::vector<Scalar> values_;
  std::vector<std::size_t> keys_;
  std::vector<std::size_t> tree_;
};

}  // namespace hbw
