#pragma once

#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlspgemm/csr_matrix.hpp"

namespace mlspgemm {

enum class Space { fast, slow };

[[nodiscard]] std::string_view to_string(Space space) noexcept;

struct MemorySpaceSpec {
  /// std::nullopt means unbounded.
  std::optional<index_t> capacity;
  double bandwidth = 1.0;  ///< bytes per second
  double latency = 0.0;    ///< seconds per transfer initiation

  void validate(std::string_view name) const;
};

/// Two-tier machine description used by every simulated timing.
///
/// This is a linear traffic model, not a cache simulator: kernel time is
/// bytes touched over the bandwidth of the space holding each operand plus a
/// fixed cost per accumulator insert. Temporal locality is not modelled.
struct MemoryModel {
  MemorySpaceSpec fast;
  MemorySpaceSpec slow;
  double insert_seconds = 0.0;

  /// fast = {16 GiB, 400 GB/s, 1e-7 s}, slow = {unbounded, 20 GB/s, 1e-6 s},
  /// 5e-10 s per accumulator insert.
  [[nodiscard]] static MemoryModel desk_preset();

  [[nodiscard]] const MemorySpaceSpec& spec(Space s) const noexcept {
    return s == Space::fast ? fast : slow;
  }
  /// Same model with the fast capacity replaced.
  [[nodiscard]] MemoryModel with_fast_capacity(index_t bytes) const;
  void validate() const;

  /// Latency of the slower endpoint plus bytes over the lower bandwidth.
  [[nodiscard]] double transfer_seconds(index_t bytes, Space src, Space dst) const noexcept;
};

enum class TransferKind {
  copy,   ///< staged transfer counted as copy cost
  stream  ///< kernel output written through to its home space
};

[[nodiscard]] std::string_view to_string(TransferKind kind) noexcept;

struct LedgerEvent {
  index_t bytes = 0;
  Space src = Space::slow;
  Space dst = Space::fast;
  double seconds = 0.0;
  TransferKind kind = TransferKind::copy;
  std::string label;
};

/// Ordered record of simulated data movement with per-space residency.
///
/// copy() stages bytes into the destination (residency grows there and is
/// checked against capacity); write_back() and stream() land in a home
/// allocation that already exists, so residency is unchanged. release()
/// frees staged bytes. Appends are serialised by an internal mutex.
class CopyLedger {
 public:
  explicit CopyLedger(MemoryModel model);
  CopyLedger(const CopyLedger& other);
  CopyLedger& operator=(const CopyLedger& other);
  CopyLedger(CopyLedger&& other) noexcept;
  CopyLedger& operator=(CopyLedger&& other) noexcept;
  ~CopyLedger() = default;

  double copy(index_t bytes, Space src, Space dst, std::string label = {});
  double write_back(index_t bytes, Space src, Space dst, std::string label = {});
  double stream(index_t bytes, Space src, Space dst, std::string label = {});

  /// Allocation without a transfer (e.g. an output buffer).
  void reserve(Space space, index_t bytes);
  void release(Space space, index_t bytes);

  [[nodiscard]] index_t resident(Space space) const;
  [[nodiscard]] index_t peak_resident(Space space) const;

  [[nodiscard]] const std::vector<LedgerEvent>& events() const noexcept { return events_; }
  /// Bytes of copy and write-back events (the copy cost).
  [[nodiscard]] index_t copy_bytes() const;
  [[nodiscard]] index_t copy_bytes(Space src, Space dst) const;
  [[nodiscard]] index_t stream_bytes() const;
  [[nodiscard]] double total_seconds() const;
  [[nodiscard]] const MemoryModel& model() const noexcept { return model_; }

  /// One JSON object per line: bytes, src, dst, seconds, kind, label.
  void write_json_lines(std::ostream& out) const;

 private:
  double append(index_t bytes, Space src, Space dst, TransferKind kind, std::string label);
  void grow(Space space, index_t bytes);
  static std::size_t slot(Space s) noexcept { return s == Space::fast ? 0 : 1; }

  MemoryModel model_;
  std::vector<LedgerEvent> events_;
  index_t resident_[2] = {0, 0};
  index_t peak_[2] = {0, 0};
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

/// Appends a staged copy to `ledger`; returns its simulated seconds.
double simulate_copy(index_t bytes, Space src, Space dst, CopyLedger& ledger);

/// Where each operand of C = A * B lives during the multiply.
struct PlacementPolicy {
  std::string name;
  Space a = Space::slow;
  Space b = Space::slow;
  Space c = Space::slow;
  /// Chunked runs stage operands piecewise; capacity is checked per chunk.
  bool chunked = false;

  [[nodiscard]] static PlacementPolicy all_fast();
  [[nodiscard]] static PlacementPolicy all_slow();
  /// Only B (the reuse-heavy operand) in fast memory.
  [[nodiscard]] static PlacementPolicy b_in_fast();
  [[nodiscard]] static PlacementPolicy chunked_policy();
  /// all_fast, all_slow, b_in_fast or chunked.
  [[nodiscard]] static PlacementPolicy from_name(std::string_view name);

  /// Throws CapacityExceeded when the matrices assigned to a space do not fit.
  void validate(index_t size_a, index_t size_b, index_t size_c, const MemoryModel& model) const;
};

/// Access counts of one row-wise multiply.
struct AccessStats {
  index_t a_entry_reads = 0;
  /// b_row_reads[j]: times row j of B is traversed (nnz of column j of A).
  std::vector<index_t> b_row_reads;
  /// Bytes read per traversal of row j of B.
  std::vector<index_t> b_row_bytes;
  index_t c_entry_writes = 0;
  index_t accumulator_inserts = 0;
  /// Streamed byte volumes of A and C.
  index_t a_bytes = 0;
  index_t c_bytes = 0;

  [[nodiscard]] index_t b_row_read_total() const noexcept;
  [[nodiscard]] index_t b_bytes() const noexcept;
};

[[nodiscard]] AccessStats compute_access_stats(const CsrMatrix& a, const CsrMatrix& b,
                                               std::span<const index_t> c_counts);

/// Stats of one fused multiply-add call: every entry of A in `a_rows` is
/// scanned, B rows are counted chunk-locally, C traffic is the partial read
/// plus the result write, and partial entries count as accumulator inserts.
[[nodiscard]] AccessStats compute_fused_access_stats(const CsrMatrix& a, const CsrMatrix& b_chunk,
                                                     const CsrMatrix& c_partial,
                                                     const CsrMatrix& result, RowRange a_rows,
                                                     RowRange b_rows);

/// a_bytes / bw(A) + sum_j b_row_reads[j] * b_row_bytes[j] / bw(B)
///   + c_bytes / bw(C) + accumulator_inserts * insert_seconds
[[nodiscard]] double estimate_kernel_time(const AccessStats& stats, const PlacementPolicy& placement,
                                          const MemoryModel& model);

}  // namespace mlspgemm
