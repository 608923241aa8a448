#include "catdist/trainer/replay_memory.hpp"

#include <numeric>

#include "catdist/common/errors.hpp"

namespace catdist::train {

ReplayMemory::ReplayMemory(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayMemory::push(envs::Episode episode) {
  storage_[head_] = std::move(episode);
  head_ = (head_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const envs::Episode& ReplayMemory::at(std::size_t i) const {
  if (i >= size_) throw ConfigError("replay index out of range");
  const std::size_t oldest = size_ < storage_.size() ? 0 : head_;
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<const envs::Episode*> ReplayMemory::sample(std::size_t n, Rng& rng) const {
  if (n > size_) throw ConfigError("cannot sample more episodes than are stored");
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), 0);
  std::vector<const envs::Episode*> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pick = k + rng.uniform_index(size_ - k);
    std::swap(order[k], order[pick]);
    out.push_back(&at(order[k]));
  }
  return out;
}

}  // namespace catdist::train
