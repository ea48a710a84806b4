#pragma once

#include <bit>
#include <condition_variable>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

/// Fixed number of equally sized slabs handed out to accumulators.
///
/// acquire() blocks until a slab is free; the returned handle gives the slab
/// back on destruction. Slab contents survive release, so an accumulator that
/// leaves its slab clean lets the next owner skip initialisation.
class MemoryPool {
 public:
  MemoryPool(std::size_t slab_words, std::size_t num_slabs);

  MemoryPool(const MemoryPool&) = delete;
  MemoryPool& operator=(const MemoryPool&) = delete;

  class Slab {
   public:
    Slab() = default;
    Slab(Slab&& other) noexcept;
    Slab& operator=(Slab&& other) noexcept;
    Slab(const Slab&) = delete;
    Slab& operator=(const Slab&) = delete;
    ~Slab();

    [[nodiscard]] std::span<std::uint64_t> words() const noexcept { return words_; }
    [[nodiscard]] std::size_t id() const noexcept { return id_; }
    [[nodiscard]] bool valid() const noexcept { return pool_ != nullptr; }

   private:
    friend class MemoryPool;
    Slab(MemoryPool* pool, std::size_t id, std::span<std::uint64_t> words)
        : pool_(pool), id_(id), words_(words) {}
    void release() noexcept;

    MemoryPool* pool_ = nullptr;
    std::size_t id_ = 0;
    std::span<std::uint64_t> words_;
  };

  [[nodiscard]] Slab acquire();

  [[nodiscard]] std::size_t slab_words() const noexcept { return slab_words_; }
  [[nodiscard]] std::size_t slab_bytes() const noexcept { return slab_words_ * 8; }
  [[nodiscard]] std::size_t num_slabs() const noexcept { return num_slabs_; }
  [[nodiscard]] std::size_t available() const;

 private:
  void give_back(std::size_t id) noexcept;

  std::size_t slab_words_;
  std::size_t num_slabs_;
  std::vector<std::uint64_t> storage_;
  std::vector<std::size_t> free_list_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
};

/// Open-addressing hash map from column (or column-set) index to a 64-bit
/// payload, laid out inside a pool slab as [keys | payloads | occupied slots].
///
/// Each row starts with begin_row(bound); the table capacity for that row is
/// the next power of two >= 2 * bound. Inserting more than `bound` distinct
/// keys throws InternalError. reset() clears only the occupied slots.
class HashAccumulator {
 public:
  static constexpr std::uint64_t kEmpty = std::numeric_limits<std::uint64_t>::max();

  [[nodiscard]] static index_t capacity_for(index_t bound) noexcept {
    return std::bit_ceil(std::max<index_t>(2 * bound, 2));
  }
  /// Slab words needed to serve rows whose bound never exceeds `max_bound`,
  /// rounded up to a 64-byte multiple.
  [[nodiscard]] static std::size_t words_for(index_t max_bound) noexcept {
    const std::size_t words = 3 * capacity_for(max_bound);
    return (words + 7) / 8 * 8;
  }

  /// Takes over a slab that is either fresh or was left clean by reset().
  /// `fresh` fills the key region with the empty marker first.
  HashAccumulator(std::span<std::uint64_t> slab, bool fresh);

  void begin_row(index_t bound);

  /// Numeric mode: payload += value.
  void add(index_t key, double value);
  /// Symbolic / masking mode: payload |= bits.
  void merge_bits(index_t key, std::uint64_t bits);

  /// Payload word for `key`, or nullptr.
  [[nodiscard]] const std::uint64_t* find(index_t key) const noexcept;

  [[nodiscard]] index_t size() const noexcept { return size_; }
  /// i-th distinct key in insertion order, with its payload.
  [[nodiscard]] index_t key_at(index_t i) const noexcept { return keys()[used()[i]]; }
  [[nodiscard]] std::uint64_t payload_at(index_t i) const noexcept {
    return payloads()[used()[i]];
  }
  [[nodiscard]] double value_at(index_t i) const noexcept {
    return std::bit_cast<double>(payload_at(i));
  }

  void reset() noexcept;
  /// Full scan of the key region; true when no key is live.
  [[nodiscard]] bool scan_empty() const noexcept;

  [[nodiscard]] index_t max_capacity() const noexcept { return max_capacity_; }

 private:
  template <class Combine>
  void upsert(index_t key, std::uint64_t payload, Combine combine);

  [[nodiscard]] std::uint64_t* keys() const noexcept { return slab_.data(); }
  [[nodiscard]] std::uint64_t* payloads() const noexcept { return slab_.data() + max_capacity_; }
  [[nodiscard]] std::uint64_t* used() const noexcept { return slab_.data() + 2 * max_capacity_; }

  [[nodiscard]] index_t slot_for(index_t key) const noexcept {
    std::uint64_t h = key * 0x9E3779B97F4A7C15ull;
    h ^= h >> 29;
    return h & (capacity_ - 1);
  }

  std::span<std::uint64_t> slab_;
  index_t max_capacity_ = 0;
  index_t capacity_ = 2;
  index_t bound_ = 0;
  index_t size_ = 0;
};

}  // namespace mlspgemm
