#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "mlspgemm/chunking.hpp"
#include "mlspgemm/compressed_matrix.hpp"
#include "mlspgemm/error.hpp"
#include "mlspgemm/generators.hpp"
#include "oracles.hpp"

using namespace mlspgemm;

namespace {

constexpr index_t GB = 1'000'000'000;

std::vector<index_t> ends_of(const RowPartition& p) {
  std::vector<index_t> e;
  for (const auto& r : p.ranges) e.push_back(r.end);
  return e;
}

/// n rows summing exactly to `total`.
std::vector<index_t> spread(index_t total, index_t n) {
  std::vector<index_t> v(n, total / n);
  for (index_t i = 0; i < total % n; ++i) ++v[i];
  return v;
}

struct Instance {
  CsrMatrix a;
  CsrMatrix b;
  std::vector<index_t> counts;
  CsrMatrix plain;
};

Instance random_instance(std::mt19937& rng) {
  Instance in;
  const index_t n = 20 + rng() % 40;
  const index_t k = 20 + rng() % 40;
  in.a = oracle::random_matrix(n, k, 8, rng);
  in.b = oracle::random_matrix(k, 30, 8, rng);
  in.counts = spgemm_symbolic(in.a, compress(in.b));
  in.plain = spgemm_numeric(in.a, in.b, in.counts);
  return in;
}

MemoryModel unbounded() {
  MemoryModel m = MemoryModel::desk_preset();
  m.fast.capacity = std::nullopt;
  return m;
}

}  // namespace

TEST(Partition, Examples) {
  const std::vector<index_t> even{10, 10, 10, 10};
  EXPECT_EQ(ends_of(binary_search_partition(even, 20)), (std::vector<index_t>{2, 4}));
  const std::vector<index_t> uneven{30, 10, 10, 30};
  const auto p = binary_search_partition(uneven, 40, 40);
  EXPECT_EQ(ends_of(p), (std::vector<index_t>{2, 4}));
  EXPECT_EQ(p.bytes, (std::vector<index_t>{40, 40}));
  const std::vector<index_t> big{50};
  EXPECT_THROW((void)binary_search_partition(big, 40, 40), UnsplittableRow);
  const auto none = binary_search_partition(std::vector<index_t>{}, 10, 10);
  ASSERT_EQ(none.size(), 1u);
  EXPECT_TRUE(none.ranges[0].empty());
  EXPECT_THROW((void)binary_search_partition(even, 0, 10), InvalidArgument);
}

TEST(Partition, MatchesGreedyOracle) {
  std::mt19937 rng(21);
  for (int t = 0; t < 300; ++t) {
    std::vector<index_t> rows(1 + rng() % 60);
    for (auto& r : rows) r = 1 + rng() % 100;
    const index_t biggest = *std::max_element(rows.begin(), rows.end());
    const index_t capacity = biggest + rng() % 300;
    const index_t target = 1 + rng() % 400;
    const auto p = binary_search_partition(rows, target, capacity);
    EXPECT_EQ(ends_of(p), oracle::greedy_partition_ends(rows, target, capacity));
    EXPECT_NO_THROW(p.validate(rows.size(), capacity));
  }
}

TEST(Partition, BalancedUsesFewestRanges) {
  const auto rows = spread(1000, 100);
  const auto p = balanced_partition(rows, 300);
  EXPECT_EQ(p.size(), 4u);
  EXPECT_LE(p.max_bytes(), 300u);
  EXPECT_EQ(p.total_bytes(), 1000u);
  EXPECT_THROW((void)balanced_partition(rows, 0), CapacityExceeded);
}

TEST(CopyCost, Formulas) {
  EXPECT_EQ(copy_cost_chunk1(2 * GB, 4 * GB, 3 * GB, 3), 17 * GB);
  EXPECT_EQ(copy_cost_chunk1(2, 4, 3, 1), 9u);
  EXPECT_EQ(copy_cost_chunk1(2'300'000'000, 4 * GB, 5 * GB, 2), 15'300'000'000u);
  EXPECT_EQ(copy_cost_chunk2(2 * GB, 4 * GB, 3 * GB, 3), 16 * GB);
  EXPECT_EQ(copy_cost_chunk2(2, 4, 3, 1), 6u);
  EXPECT_EQ(copy_cost_chunk2(3'900'000'000, 250'000'000, 500'000'000, 2), 8'550'000'000u);
  EXPECT_THROW((void)copy_cost_chunk1(1, 1, 1, 0), InvalidArgument);
  EXPECT_THROW((void)copy_cost_chunk2(1, 1, 1, 0), InvalidArgument);
}

TEST(Decide, BranchOneWhenBFits) {
  const auto a = spread(300, 30), b = spread(500, 50), c = spread(400, 30);
  const auto plan = decide_chunking(300, 500, 400, a, b, c, 1000);
  EXPECT_EQ(plan.branch, 1);
  EXPECT_EQ(plan.algorithm, ChunkAlgorithm::gpu_chunk2_b_in_place);
  EXPECT_EQ(plan.partition_b.size(), 1u);
  EXPECT_LE(plan.partition_ac->max_bytes(), 1000u - 500u);
}

TEST(Decide, TableThreeLaplaceCase) {
  const index_t sa = 2'300'000'000, sb = 4 * GB, sc = 5 * GB;
  const auto plan = decide_chunking(sa, sb, sc, spread(sa, 1000), spread(sb, 1000),
                                    spread(sc, 1000), 8 * GB);
  EXPECT_EQ(plan.big_portion, 6 * GB);
  EXPECT_EQ(plan.branch, 1);
  EXPECT_EQ(plan.algorithm, ChunkAlgorithm::gpu_chunk2_b_in_place);
  EXPECT_EQ(plan.predicted_copy_bytes, copy_cost_chunk2(sa, sb, sc, 1));
}

TEST(Decide, BranchTwoWhenACFits) {
  const auto plan =
      decide_chunking(200, 2000, 300, spread(200, 20), spread(2000, 100), spread(300, 20), 1000);
  EXPECT_EQ(plan.branch, 2);
  EXPECT_EQ(plan.algorithm, ChunkAlgorithm::gpu_chunk1_ac_in_place);
  EXPECT_EQ(plan.partition_ac->size(), 1u);
  EXPECT_LE(plan.partition_b.max_bytes(), 1000u - 500u);
}

TEST(Decide, BranchThreePicksCheaper) {
  // A + 2C > B, neither side fits the big portion.
  const index_t sa = 900, sb = 1500, sc = 400;
  const auto plan =
      decide_chunking(sa, sb, sc, spread(sa, 90), spread(sb, 150), spread(sc, 90), 1000);
  EXPECT_EQ(plan.branch, 3);
  const index_t c1 = copy_cost_chunk1(sa, sb, sc, plan.partition_ac->size());
  const index_t c2 = copy_cost_chunk2(sa, sb, sc, plan.partition_b.size());
  EXPECT_EQ(plan.predicted_copy_bytes, std::min(c1, c2));
  EXPECT_EQ(plan.algorithm, c1 <= c2 ? ChunkAlgorithm::gpu_chunk1_ac_in_place
                                     : ChunkAlgorithm::gpu_chunk2_b_in_place);
}

TEST(Decide, TieGoesToChunkOne) {
  const auto plan = decide_chunking(80, 80, 10, spread(80, 8), spread(80, 8), spread(10, 8), 100);
  EXPECT_EQ(plan.branch, 3);
  EXPECT_EQ(plan.cost_chunk1, plan.cost_chunk2);
  EXPECT_EQ(plan.algorithm, ChunkAlgorithm::gpu_chunk1_ac_in_place);
}

TEST(Decide, BranchFour) {
  const index_t sa = 500, sb = 4000, sc = 600;
  const auto plan =
      decide_chunking(sa, sb, sc, spread(sa, 50), spread(sb, 400), spread(sc, 50), 1000);
  EXPECT_EQ(plan.branch, 4);
  EXPECT_LE(plan.partition_b.max_bytes(), plan.big_portion);
  EXPECT_LE(plan.partition_b.max_bytes() + plan.partition_ac->max_bytes(), 1000u);
}

TEST(Decide, Errors) {
  const auto r = spread(100, 10);
  EXPECT_THROW((void)decide_chunking(100, 100, 100, r, r, r, 0), InvalidArgument);
  EXPECT_THROW((void)decide_chunking(100, 101, 100, r, r, r, 50), InvalidArgument);
  const std::vector<index_t> huge{400, 400}, small{1, 1};
  EXPECT_THROW((void)decide_chunking(800, 800, 2, huge, huge, small, 100), UnsplittableRow);
}

TEST(Decide, PlanSerializes) {
  const auto a = spread(300, 30), b = spread(500, 50), c = spread(400, 30);
  const auto plan = decide_chunking(300, 500, 400, a, b, c, 1000);
  const auto j = nlohmann::json::parse(to_json(plan, plan.predicted_copy_bytes));
  EXPECT_EQ(j["algorithm"], "gpu_chunk2_b_in_place");
  EXPECT_EQ(j["partition_b"].size(), 1u);
  EXPECT_EQ(j["predicted_copy_bytes"], plan.predicted_copy_bytes);
  EXPECT_EQ(j["actual_copy_bytes"], plan.predicted_copy_bytes);
}

TEST(KnlChunk, SingleChunkIsPlainProduct) {
  std::mt19937 rng(31);
  const auto in = random_instance(rng);
  const auto res =
      knl_chunk_multiply(in.a, in.b, in.counts, in.b.byte_size(), MemoryModel::desk_preset());
  EXPECT_EQ(res.ledger.events().size(), 1u);
  EXPECT_EQ(res.c, in.plain);
  EXPECT_EQ(res.ledger.copy_bytes(), in.b.byte_size());
}

TEST(KnlChunk, ChunkCountFromCeiling) {
  const auto rows = spread(2100, 210);
  EXPECT_EQ(plan_knl_chunk(rows, 1000).partition_b.size(), 3u);
}

TEST(KnlChunk, FourWayLaplaceRestriction) {
  const StencilSpec spec{StencilKind::laplace3d, {9, 9, 9}};
  const auto a = generate_stencil(spec);
  const auto r = generate_interpolation(spec).restriction;
  const auto counts = spgemm_symbolic(r, compress(a));
  const auto plain = spgemm_numeric(r, a, counts);
  const index_t fast = a.byte_size() / 4 + a.byte_size() / 40;
  const auto res = knl_chunk_multiply(r, a, counts, fast, MemoryModel::desk_preset());
  EXPECT_EQ(res.fused_calls, 4u);
  EXPECT_TRUE(oracle::same_structure_close(res.c, plain, 1e-12));
  EXPECT_EQ(res.ledger.copy_bytes(), a.byte_size());
}

TEST(GpuChunk, SingletonPartitionsCopyEachOnce) {
  std::mt19937 rng(32);
  const auto in = random_instance(rng);
  const auto p_ac = single_range_partition(combine_row_bytes(in.a.row_byte_sizes(),
                                                             csr_row_byte_sizes(in.counts)));
  const auto p_b = single_range_partition(in.b.row_byte_sizes());
  const index_t total = in.a.byte_size() + in.b.byte_size() + csr_byte_size(in.counts);
  const auto r1 = gpu_chunk_multiply_1(in.a, in.b, in.counts, p_ac, p_b, unbounded());
  EXPECT_EQ(r1.ledger.copy_bytes(), total);
  EXPECT_EQ(r1.c, in.plain);
  const auto r2 = gpu_chunk_multiply_2(in.a, in.b, in.counts, p_ac, p_b, unbounded());
  EXPECT_EQ(r2.ledger.copy_bytes(), in.a.byte_size() + in.b.byte_size());
  EXPECT_EQ(r2.ledger.stream_bytes(), csr_byte_size(in.counts));
}

TEST(GpuChunk, LoopStructure) {
  std::mt19937 rng(33);
  const auto in = random_instance(rng);
  const auto ac = combine_row_bytes(in.a.row_byte_sizes(), csr_row_byte_sizes(in.counts));
  const auto p_ac = binary_search_partition(ac, (in.a.byte_size() + csr_byte_size(in.counts)) / 3 + 1);
  const auto p_b = binary_search_partition(in.b.row_byte_sizes(), in.b.byte_size() / 2 + 1);
  ASSERT_EQ(p_ac.size(), 3u);
  ASSERT_EQ(p_b.size(), 2u);

  const auto r1 = gpu_chunk_multiply_1(in.a, in.b, in.counts, p_ac, p_b, unbounded());
  index_t b_copies = 0;
  for (const auto& e : r1.ledger.events()) b_copies += e.label.rfind("B[", 0) == 0;
  EXPECT_EQ(b_copies, 2u * 3u);
  EXPECT_EQ(r1.ledger.copy_bytes(Space::slow, Space::fast),
            in.a.byte_size() + 3 * in.b.byte_size() + (in.a.num_rows() + 1) * 8);
  EXPECT_TRUE(oracle::same_structure_close(r1.c, in.plain, 1e-12));

  const auto r2 = gpu_chunk_multiply_2(in.a, in.b, in.counts, p_ac, p_b, unbounded());
  index_t a_copies = 0, c_in = 0, c_out = 0;
  for (const auto& e : r2.ledger.events()) {
    a_copies += e.label.rfind("A[", 0) == 0;
    c_in += e.label.rfind("C.partial", 0) == 0;
    c_out += e.kind == TransferKind::stream;
  }
  EXPECT_EQ(a_copies, 2u * 3u);
  EXPECT_EQ(c_in, 3u);
  EXPECT_EQ(c_out, 2u * 3u);
  EXPECT_EQ(r2.ledger.copy_bytes(),
            copy_cost_chunk2(in.a.byte_size(), in.b.byte_size(), csr_byte_size(in.counts), 2));
  EXPECT_TRUE(oracle::same_structure_close(r2.c, in.plain, 1e-12));
}

TEST(GpuChunk, CapacityIsEnforced) {
  std::mt19937 rng(34);
  const auto in = random_instance(rng);
  const auto p_ac = single_range_partition(combine_row_bytes(in.a.row_byte_sizes(),
                                                             csr_row_byte_sizes(in.counts)));
  const auto p_b = single_range_partition(in.b.row_byte_sizes());
  const auto tight = MemoryModel::desk_preset().with_fast_capacity(in.b.byte_size());
  EXPECT_THROW((void)gpu_chunk_multiply_1(in.a, in.b, in.counts, p_ac, p_b, tight),
               CapacityExceeded);
  EXPECT_THROW((void)gpu_chunk_multiply_2(in.a, in.b, in.counts, p_ac, p_b, tight),
               CapacityExceeded);
}

TEST(ExecutePlan, LedgerMatchesPredictionAndStaysInCapacity) {
  std::mt19937 rng(35);
  int executed = 0;
  for (int t = 0; t < 30; ++t) {
    const auto in = random_instance(rng);
    const index_t sa = in.a.byte_size(), sb = in.b.byte_size(), sc = csr_byte_size(in.counts);
    const index_t fast = (sa + sb + sc) / (2 + rng() % 3);
    ChunkPlan plan;
    try {
      plan = decide_chunking(sa, sb, sc, in.a.row_byte_sizes(), in.b.row_byte_sizes(),
                             csr_row_byte_sizes(in.counts), fast);
    } catch (const UnsplittableRow&) {
      continue;
    } catch (const CapacityExceeded&) {
      continue;
    }
    ++executed;
    const auto res = execute_plan(plan, in.a, in.b, in.counts, MemoryModel::desk_preset());
    EXPECT_EQ(res.ledger.copy_bytes(), plan.predicted_copy_bytes);
    EXPECT_LE(res.ledger.peak_resident(Space::fast), fast);
    EXPECT_EQ(res.ledger.resident(Space::fast), 0u);
    EXPECT_TRUE(oracle::same_structure_close(res.c, in.plain, 1e-12));
  }
  EXPECT_GE(executed, 20);
}
