#include "mlspgemm/memory_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>

#include <json.hpp>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

std::string_view to_string(Space space) noexcept {
  return space == Space::fast ? "fast" : "slow";
}

std::string_view to_string(TransferKind kind) noexcept {
  return kind == TransferKind::copy ? "copy" : "stream";
}

void MemorySpaceSpec::validate(std::string_view name) const {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument(std::string(name) + " bandwidth must be positive and finite");
  }
  if (!(latency >= 0.0) || !std::isfinite(latency)) {
    throw InvalidArgument(std::string(name) + " latency must be non-negative and finite");
  }
}

MemoryModel MemoryModel::desk_preset() {
  MemoryModel m;
  m.fast = {index_t{16} << 30, 400e9, 1e-7};
  m.slow = {std::nullopt, 20e9, 1e-6};
  m.insert_seconds = 5e-10;
  return m;
}

MemoryModel MemoryModel::with_fast_capacity(index_t bytes) const {
  MemoryModel m = *this;
  m.fast.capacity = bytes;
  return m;
}

void MemoryModel::validate() const {
  fast.validate("fast");
  slow.validate("slow");
  if (!(insert_seconds >= 0.0) || !std::isfinite(insert_seconds)) {
    throw InvalidArgument("insert cost must be non-negative and finite");
  }
}

double MemoryModel::transfer_seconds(index_t bytes, Space src, Space dst) const noexcept {
  const auto& s = spec(src);
  const auto& d = spec(dst);
  return std::max(s.latency, d.latency) +
         static_cast<double>(bytes) / std::min(s.bandwidth, d.bandwidth);
}

CopyLedger::CopyLedger(MemoryModel model) : model_(std::move(model)) { model_.validate(); }

CopyLedger::CopyLedger(const CopyLedger& other)
    : model_(other.model_), events_(other.events_) {
  std::copy(std::begin(other.resident_), std::end(other.resident_), resident_);
  std::copy(std::begin(other.peak_), std::end(other.peak_), peak_);
}

CopyLedger& CopyLedger::operator=(const CopyLedger& other) {
  if (this != &other) {
    CopyLedger tmp(other);
    *this = std::move(tmp);
  }
  return *this;
}

CopyLedger::CopyLedger(CopyLedger&& other) noexcept
    : model_(std::move(other.model_)), events_(std::move(other.events_)),
      mutex_(std::move(other.mutex_)) {
  std::copy(std::begin(other.resident_), std::end(other.resident_), resident_);
  std::copy(std::begin(other.peak_), std::end(other.peak_), peak_);
  other.mutex_ = std::make_unique<std::mutex>();
}

CopyLedger& CopyLedger::operator=(CopyLedger&& other) noexcept {
  if (this != &other) {
    model_ = std::move(other.model_);
    events_ = std::move(other.events_);
    std::copy(std::begin(other.resident_), std::end(other.resident_), resident_);
    std::copy(std::begin(other.peak_), std::end(other.peak_), peak_);
  }
  return *this;
}

void CopyLedger::grow(Space space, index_t bytes) {
  auto& r = resident_[slot(space)];
  const auto& cap = model_.spec(space).capacity;
  if (cap && (bytes > *cap || r > *cap - bytes)) {
    throw CapacityExceeded(std::string(to_string(space)) + " memory: " + std::to_string(r) +
                           " resident + " + std::to_string(bytes) + " requested > capacity " +
                           std::to_string(*cap));
  }
  r += bytes;
  peak_[slot(space)] = std::max(peak_[slot(space)], r);
}

double CopyLedger::append(index_t bytes, Space src, Space dst, TransferKind kind,
                          std::string label) {
  const double seconds = model_.transfer_seconds(bytes, src, dst);
  events_.push_back({bytes, src, dst, seconds, kind, std::move(label)});
  return seconds;
}

double CopyLedger::copy(index_t bytes, Space src, Space dst, std::string label) {
  std::lock_guard lock(*mutex_);
  grow(dst, bytes);
  return append(bytes, src, dst, TransferKind::copy, std::move(label));
}

double CopyLedger::write_back(index_t bytes, Space src, Space dst, std::string label) {
  std::lock_guard lock(*mutex_);
  return append(bytes, src, dst, TransferKind::copy, std::move(label));
}

double CopyLedger::stream(index_t bytes, Space src, Space dst, std::string label) {
  std::lock_guard lock(*mutex_);
  return append(bytes, src, dst, TransferKind::stream, std::move(label));
}

void CopyLedger::reserve(Space space, index_t bytes) {
  std::lock_guard lock(*mutex_);
  grow(space, bytes);
}

void CopyLedger::release(Space space, index_t bytes) {
  std::lock_guard lock(*mutex_);
  auto& r = resident_[slot(space)];
  if (bytes > r) {
    throw InternalError("release of " + std::to_string(bytes) + " bytes exceeds " +
                        std::to_string(r) + " resident in " + std::string(to_string(space)));
  }
  r -= bytes;
}

index_t CopyLedger::resident(Space space) const { return resident_[slot(space)]; }
index_t CopyLedger::peak_resident(Space space) const { return peak_[slot(space)]; }

index_t CopyLedger::copy_bytes() const {
  index_t total = 0;
  for (const auto& e : events_) {
    if (e.kind == TransferKind::copy) total += e.bytes;
  }
  return total;
}

index_t CopyLedger::copy_bytes(Space src, Space dst) const {
  index_t total = 0;
  for (const auto& e : events_) {
    if (e.kind == TransferKind::copy && e.src == src && e.dst == dst) total += e.bytes;
  }
  return total;
}

index_t CopyLedger::stream_bytes() const {
  index_t total = 0;
  for (const auto& e : events_) {
    if (e.kind == TransferKind::stream) total += e.bytes;
  }
  return total;
}

double CopyLedger::total_seconds() const {
  double total = 0.0;
  for (const auto& e : events_) total += e.seconds;
  return total;
}

void CopyLedger::write_json_lines(std::ostream& out) const {
  for (const auto& e : events_) {
    nlohmann::ordered_json j;
    j["bytes"] = e.bytes;
    j["src"] = to_string(e.src);
    j["dst"] = to_string(e.dst);
    j["seconds"] = e.seconds;
    j["kind"] = to_string(e.kind);
    j["label"] = e.label;
    out << j.dump() << '\n';
  }
}

double simulate_copy(index_t bytes, Space src, Space dst, CopyLedger& ledger) {
  return ledger.copy(bytes, src, dst);
}

PlacementPolicy PlacementPolicy::all_fast() {
  return {"all_fast", Space::fast, Space::fast, Space::fast, false};
}
PlacementPolicy PlacementPolicy::all_slow() {
  return {"all_slow", Space::slow, Space::slow, Space::slow, false};
}
PlacementPolicy PlacementPolicy::b_in_fast() {
  return {"b_in_fast", Space::slow, Space::fast, Space::slow, false};
}
PlacementPolicy PlacementPolicy::chunked_policy() {
  return {"chunked", Space::slow, Space::slow, Space::slow, true};
}

PlacementPolicy PlacementPolicy::from_name(std::string_view name) {
  if (name == "all_fast") return all_fast();
  if (name == "all_slow") return all_slow();
  if (name == "b_in_fast") return b_in_fast();
  if (name == "chunked" || name == "chunk") return chunked_policy();
  throw InvalidArgument("unknown placement '" + std::string(name) + "'");
}

void PlacementPolicy::validate(index_t size_a, index_t size_b, index_t size_c,
                               const MemoryModel& model) const {
  if (chunked) return;
  for (Space s : {Space::fast, Space::slow}) {
    const auto& cap = model.spec(s).capacity;
    if (!cap) continue;
    index_t total = 0;
    if (a == s) total += size_a;
    if (b == s) total += size_b;
    if (c == s) total += size_c;
    if (total > *cap) {
      throw CapacityExceeded("placement " + name + " needs " + std::to_string(total) +
                             " bytes in " + std::string(to_string(s)) + " memory, capacity " +
                             std::to_string(*cap));
    }
  }
}

index_t AccessStats::b_row_read_total() const noexcept {
  index_t total = 0;
  for (index_t r : b_row_reads) total += r;
  return total;
}

index_t AccessStats::b_bytes() const noexcept {
  index_t total = 0;
  for (std::size_t j = 0; j < b_row_reads.size(); ++j) total += b_row_reads[j] * b_row_bytes[j];
  return total;
}

AccessStats compute_access_stats(const CsrMatrix& a, const CsrMatrix& b,
                                 std::span<const index_t> c_counts) {
  if (a.num_cols() != b.num_rows()) {
    throw DimensionMismatch("A has " + std::to_string(a.num_cols()) + " columns, B has " +
                            std::to_string(b.num_rows()) + " rows");
  }
  if (c_counts.size() != a.num_rows()) {
    throw InvalidArgument("c_counts must have one entry per row of A");
  }
  AccessStats s;
  s.a_entry_reads = a.nnz();
  s.b_row_reads.assign(b.num_rows(), 0);
  s.b_row_bytes = b.row_byte_sizes();
  for (index_t k : a.col_idx()) {
    ++s.b_row_reads[k];
    s.accumulator_inserts += b.row_nnz(k);
  }
  for (index_t n : c_counts) s.c_entry_writes += n;
  s.a_bytes = a.byte_size();
  s.c_bytes = csr_byte_size(c_counts);
  return s;
}

AccessStats compute_fused_access_stats(const CsrMatrix& a, const CsrMatrix& b_chunk,
                                       const CsrMatrix& c_partial, const CsrMatrix& result,
                                       RowRange a_rows, RowRange b_rows) {
  if (b_chunk.num_rows() != b_rows.size()) {
    throw InvalidArgument("b_chunk rows do not match b_rows");
  }
  AccessStats s;
  s.b_row_reads.assign(b_chunk.num_rows(), 0);
  s.b_row_bytes = b_chunk.row_byte_sizes();
  for (index_t i = a_rows.begin; i < a_rows.end; ++i) {
    const auto cols = a.row_cols(i);
    s.a_entry_reads += cols.size();
    for (index_t k : cols) {
      if (!b_rows.contains(k)) continue;
      ++s.b_row_reads[k - b_rows.begin];
      s.accumulator_inserts += b_chunk.row_nnz(k - b_rows.begin);
    }
  }
  s.accumulator_inserts += c_partial.nnz();
  s.c_entry_writes = result.nnz();
  s.a_bytes = a.range_byte_size(a_rows);
  s.c_bytes = c_partial.byte_size() + result.byte_size();
  return s;
}

double estimate_kernel_time(const AccessStats& stats, const PlacementPolicy& placement,
                            const MemoryModel& model) {
  if (stats.b_row_reads.size() != stats.b_row_bytes.size()) {
    throw InvalidArgument("access stats row vectors differ in length");
  }
  const double bw_a = model.spec(placement.a).bandwidth;
  const double bw_b = model.spec(placement.b).bandwidth;
  const double bw_c = model.spec(placement.c).bandwidth;
  return static_cast<double>(stats.a_bytes) / bw_a +
         static_cast<double>(stats.b_bytes()) / bw_b +
         static_cast<double>(stats.c_bytes) / bw_c +
         static_cast<double>(stats.accumulator_inserts) * model.insert_seconds;
}

}  // namespace mlspgemm
