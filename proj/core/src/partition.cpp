#include "mlspgemm/partition.hpp"

#include <algorithm>
#include <string>

#include "mlspgemm/error.hpp"

namespace mlspgemm {

index_t RowPartition::max_bytes() const noexcept {
  index_t m = 0;
  for (index_t b : bytes) m = std::max(m, b);
  return m;
}

index_t RowPartition::total_bytes() const noexcept {
  index_t t = 0;
  for (index_t b : bytes) t += b;
  return t;
}

void RowPartition::validate(index_t num_rows, index_t capacity) const {
  if (ranges.empty() || ranges.size() != bytes.size()) {
    throw InternalError("partition has no ranges or mismatched byte list");
  }
  index_t next = 0;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    if (ranges[i].begin != next || ranges[i].end < ranges[i].begin) {
      throw InternalError("partition range " + std::to_string(i) + " is not contiguous");
    }
    if (ranges[i].empty() && num_rows != 0) {
      throw InternalError("partition range " + std::to_string(i) + " is empty");
    }
    if (bytes[i] > capacity) {
      throw InternalError("partition range " + std::to_string(i) + " exceeds capacity");
    }
    next = ranges[i].end;
  }
  if (next != num_rows) throw InternalError("partition does not cover every row");
}

RowPartition binary_search_partition(std::span<const index_t> row_bytes, index_t target,
                                     index_t capacity) {
  if (target == 0) throw InvalidArgument("partition target must be positive");
  const index_t n = row_bytes.size();
  std::vector<index_t> prefix(n + 1, 0);
  for (index_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + row_bytes[i];

  RowPartition p;
  if (n == 0) {
    p.ranges.push_back({0, 0});
    p.bytes.push_back(0);
    return p;
  }
  index_t start = 0;
  index_t multiple = target;
  while (start < n) {
    while (multiple <= prefix[start]) multiple += target;
    const index_t cap_limit =
        capacity > prefix[n] - prefix[start] ? prefix[n] : prefix[start] + capacity;
    const index_t limit = std::min(multiple, cap_limit);
    // Last e with prefix[e] <= limit.
    auto it = std::upper_bound(prefix.begin() + static_cast<std::ptrdiff_t>(start),
                               prefix.end(), limit);
    index_t end = static_cast<index_t>(it - prefix.begin()) - 1;
    if (end == start) {
      if (row_bytes[start] > capacity) {
        throw UnsplittableRow("row " + std::to_string(start) + " needs " +
                              std::to_string(row_bytes[start]) + " bytes, capacity is " +
                              std::to_string(capacity));
      }
      end = start + 1;
    }
    p.ranges.push_back({start, end});
    p.bytes.push_back(prefix[end] - prefix[start]);
    // Every range consumes its multiple, even when it stops short of it.
    multiple += target;
    start = end;
  }
  return p;
}

RowPartition balanced_partition(std::span<const index_t> row_bytes, index_t portion) {
  if (portion == 0) {
    throw CapacityExceeded("no fast memory left for a partition");
  }
  index_t total = 0;
  for (index_t b : row_bytes) total += b;
  if (total == 0) return single_range_partition(row_bytes);
  const index_t np = (total + portion - 1) / portion;
  const index_t target = (total + np - 1) / np;
  return binary_search_partition(row_bytes, target, portion);
}

RowPartition single_range_partition(std::span<const index_t> row_bytes) {
  RowPartition p;
  index_t total = 0;
  for (index_t b : row_bytes) total += b;
  p.ranges.push_back({0, row_bytes.size()});
  p.bytes.push_back(total);
  return p;
}

std::vector<index_t> combine_row_bytes(std::span<const index_t> x, std::span<const index_t> y) {
  if (x.size() != y.size()) throw InvalidArgument("row byte lists differ in length");
  std::vector<index_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

}  // namespace mlspgemm
