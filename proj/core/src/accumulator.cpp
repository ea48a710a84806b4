#include "mlspgemm/accumulator.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

MemoryPool::MemoryPool(std::size_t slab_words, std::size_t num_slabs)
    : slab_words_((slab_words + 7) / 8 * 8),
      num_slabs_(num_slabs),
      storage_(slab_words_ * num_slabs, HashAccumulator::kEmpty) {
  if (num_slabs == 0) throw InvalidArgument("memory pool needs at least one slab");
  free_list_.reserve(num_slabs);
  for (std::size_t i = num_slabs; i-- > 0;) free_list_.push_back(i);
}

MemoryPool::Slab MemoryPool::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return !free_list_.empty(); });
  const std::size_t id = free_list_.back();
  free_list_.pop_back();
  return Slab(this, id, std::span<std::uint64_t>(storage_).subspan(id * slab_words_, slab_words_));
}

std::size_t MemoryPool::available() const {
  std::lock_guard lock(mutex_);
  return free_list_.size();
}

void MemoryPool::give_back(std::size_t id) noexcept {
  {
    std::lock_guard lock(mutex_);
    free_list_.push_back(id);
  }
  cv_.notify_one();
}

MemoryPool::Slab::Slab(Slab&& other) noexcept
    : pool_(std::exchange(other.pool_, nullptr)), id_(other.id_), words_(other.words_) {}

MemoryPool::Slab& MemoryPool::Slab::operator=(Slab&& other) noexcept {
  if (this != &other) {
    release();
    pool_ = std::exchange(other.pool_, nullptr);
    id_ = other.id_;
    words_ = other.words_;
  }
  return *this;
}

MemoryPool::Slab::~Slab() { release(); }

void MemoryPool::Slab::release() noexcept {
  if (pool_ != nullptr) {
    pool_->give_back(id_);
    pool_ = nullptr;
  }
}

HashAccumulator::HashAccumulator(std::span<std::uint64_t> slab, bool fresh)
    : slab_(slab), max_capacity_(std::bit_floor(static_cast<index_t>(slab.size() / 3))) {
  if (max_capacity_ < 2) throw InvalidArgument("accumulator slab too small");
  if (fresh) std::fill_n(keys(), max_capacity_, kEmpty);
}

void HashAccumulator::begin_row(index_t bound) {
  const index_t cap = capacity_for(bound);
  if (cap > max_capacity_) {
    throw InternalError("row bound " + std::to_string(bound) + " exceeds accumulator slab");
  }
  capacity_ = cap;
  bound_ = bound;
  size_ = 0;
}

template <class Combine>
void HashAccumulator::upsert(index_t key, std::uint64_t payload, Combine combine) {
  std::uint64_t* k = keys();
  index_t slot = slot_for(key);
  while (k[slot] != kEmpty) {
    if (k[slot] == key) {
      payloads()[slot] = combine(payloads()[slot], payload);
      return;
    }
    slot = (slot + 1) & (capacity_ - 1);
  }
  if (size_ == bound_) {
    throw InternalError("accumulator overflow: more than " + std::to_string(bound_) +
                        " distinct keys in a row");
  }
  k[slot] = key;
  payloads()[slot] = payload;
  used()[size_++] = slot;
}

void HashAccumulator::add(index_t key, double value) {
  upsert(key, std::bit_cast<std::uint64_t>(value), [](std::uint64_t old, std::uint64_t v) {
    return std::bit_cast<std::uint64_t>(std::bit_cast<double>(old) + std::bit_cast<double>(v));
  });
}

void HashAccumulator::merge_bits(index_t key, std::uint64_t bits) {
  upsert(key, bits, [](std::uint64_t old, std::uint64_t v) { return old | v; });
}

const std::uint64_t* HashAccumulator::find(index_t key) const noexcept {
  const std::uint64_t* k = keys();
  index_t slot = slot_for(key);
  while (k[slot] != kEmpty) {
    if (k[slot] == key) return payloads() + slot;
    slot = (slot + 1) & (capacity_ - 1);
  }
  return nullptr;
}

void HashAccumulator::reset() noexcept {
  std::uint64_t* k = keys();
  const std::uint64_t* u = used();
  for (index_t i = 0; i < size_; ++i) k[u[i]] = kEmpty;
  size_ = 0;
}

bool HashAccumulator::scan_empty() const noexcept {
  const std::uint64_t* k = keys();
  return std::all_of(k, k + max_capacity_, [](std::uint64_t x) { return x == kEmpty; });
}

}  // namespace mlspgemm
