#pragma once

#include <vector>

#include "catdist/common/rng.hpp"
#include "catdist/envs/matrix_game.hpp"

namespace catdist::train {

// FIFO ring buffer of whole episodes.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(envs::Episode episode);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }
  // 0 is the oldest stored episode.
  const envs::Episode& at(std::size_t i) const;

  // n distinct episodes drawn uniformly. Throws if n > size().
  std::vector<const envs::Episode*> sample(std::size_t n, Rng& rng) const;

 private:
  std::vector<envs::Episode> storage_;
  std::size_t head_ = 0;  // next write slot
  std::size_t size_ = 0;
};

}  // namespace catdist::train
