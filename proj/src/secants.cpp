#include "sap/secants.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "sap/errors.hpp"
#include "sap/parallel.hpp"
#include "sap/rng.hpp"

namespace sap::secants {

namespace {

constexpr std::int64_t kPairBlock = 1 << 16;

// First linear pair rank of row i under lexicographic (i, j), i < j, order.
inline std::int64_t row_start(std::int64_t i, std::int64_t k) {
  return i * (2 * k - i - 1) / 2;
}

// Largest row whose first rank is <= r.
std::int64_t row_of_rank(std::int64_t r, std::int64_t k) {
  std::int64_t lo = 0, hi = k - 2;
  while (lo < hi) {
    const std::int64_t mid = (lo + hi + 1) / 2;
    if (row_start(mid, k) <= r) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

enum class PairClass { kKeep, kDegenerate, kShort };

struct BlockTally {
  std::int64_t kept = 0;
  std::int64_t degenerate = 0;
  std::int64_t dropped_short = 0;
};

}  // namespace

SecantSet compute_secants(const DataSet& data, const SecantOptions& options) {
  const std::int64_t k = data.count();
  const std::int64_t n = data.dim();
  if (k < 2) throw InvalidArgument("secant construction needs at least 2 points");
  if (k > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("secant construction supports at most 2^32-1 points");
  }
  if (!data.points.allFinite()) {
    throw InvalidArgument("dataset contains non-finite entries");
  }
  if (options.threshold && *options.threshold < 0.0) {
    throw InvalidArgument("secant length threshold must be >= 0");
  }
  if (options.dedup_epsilon < 0.0) throw InvalidArgument("dedup_epsilon must be >= 0");

  // Column-per-point copy so pair arithmetic runs on contiguous memory.
  const Matrix points_t = data.points.transpose();

  const auto classify = [&](std::int64_t i, std::int64_t j, double& len) {
    len = (points_t.col(i) - points_t.col(j)).norm();
    if (len <= options.dedup_epsilon) return PairClass::kDegenerate;
    if (options.threshold && len < *options.threshold) return PairClass::kShort;
    return PairClass::kKeep;
  };

  const auto for_pairs_in = [&](std::int64_t begin, std::int64_t end, auto&& body) {
    std::int64_t i = row_of_rank(begin, k);
    std::int64_t j = i + 1 + (begin - row_start(i, k));
    for (std::int64_t r = begin; r < end; ++r) {
      body(i, j);
      if (++j == k) {
        ++i;
        j = i + 1;
      }
    }
  };

  const std::int64_t total = secant_count(k);
  const std::int64_t nblocks = block_count(total, kPairBlock);

  // Pass 1: count survivors per block so every output column has a fixed slot.
  std::vector<BlockTally> tally(static_cast<std::size_t>(nblocks));
  parallel_blocks(total, kPairBlock, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    BlockTally& t = tally[static_cast<std::size_t>(b)];
    for_pairs_in(begin, end, [&](std::int64_t i, std::int64_t j) {
      double len;
      switch (classify(i, j, len)) {
        case PairClass::kKeep: ++t.kept; break;
        case PairClass::kDegenerate: ++t.degenerate; break;
        case PairClass::kShort: ++t.dropped_short; break;
      }
    });
  });

  std::vector<std::int64_t> offsets(static_cast<std::size_t>(nblocks) + 1, 0);
  SecantSet out;
  for (std::int64_t b = 0; b < nblocks; ++b) {
    const BlockTally& t = tally[static_cast<std::size_t>(b)];
    offsets[static_cast<std::size_t>(b) + 1] = offsets[static_cast<std::size_t>(b)] + t.kept;
    out.dropped_degenerate += t.degenerate;
    out.dropped_short += t.dropped_short;
  }
  const std::int64_t p = offsets.back();
  if (p == 0) {
    throw EmptySecantSet("all point pairs were dropped (duplicates or below threshold)");
  }

  const std::uint64_t bytes = std::uint64_t(p) * std::uint64_t(n) * sizeof(double);
  if (bytes > options.memory_budget_bytes) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "secant matrix needs %.2f GiB for %lld secants, over the %.2f GiB budget; "
                  "subsample the dataset or raise the budget",
                  bytes / 1073741824.0, static_cast<long long>(p),
                  options.memory_budget_bytes / 1073741824.0);
    throw MemoryBudgetExceeded(msg);
  }

  out.threshold = options.threshold;
  out.secants.resize(n, p);
  out.lengths.resize(static_cast<std::size_t>(p));
  out.pairs.resize(static_cast<std::size_t>(p));

  // Pass 2: recompute and write survivors into their slots.
  parallel_blocks(total, kPairBlock, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    std::int64_t pos = offsets[static_cast<std::size_t>(b)];
    for_pairs_in(begin, end, [&](std::int64_t i, std::int64_t j) {
      double len;
      if (classify(i, j, len) == PairClass::kKeep) {
        out.secants.col(pos) = (points_t.col(i) - points_t.col(j)) / len;
        out.lengths[static_cast<std::size_t>(pos)] = len;
        out.pairs[static_cast<std::size_t>(pos)] = {static_cast<std::uint32_t>(i),
                                                    static_cast<std::uint32_t>(j)};
        ++pos;
      }
    });
  });

  return out;
}

DataSet subsample(const DataSet& data, Index count, std::uint64_t seed) {
  const Index k = data.count();
  if (count < 2) throw InvalidArgument("subsample needs count >= 2");
  if (count > k) throw InvalidArgument("subsample count exceeds dataset size");

  // Partial Fisher-Yates, then ascending order for a stable layout.
  std::vector<Index> indices(static_cast<std::size_t>(k));
  std::iota(indices.begin(), indices.end(), Index{0});
  RandomStream rng(seed);
  for (Index t = 0; t < count; ++t) {
    const Index pick = t + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(k - t)));
    std::swap(indices[static_cast<std::size_t>(t)], indices[static_cast<std::size_t>(pick)]);
  }
  indices.resize(static_cast<std::size_t>(count));
  std::sort(indices.begin(), indices.end());

  DataSet out;
  out.meta = data.meta;
  out.points.resize(count, data.dim());
  for (Index r = 0; r < count; ++r) {
    out.points.row(r) = data.points.row(indices[static_cast<std::size_t>(r)]);
  }
  out.set_meta("parent_count", std::to_string(k));
  out.set_meta("subsample_count", std::to_string(count));
  out.set_meta("subsample_seed", std::to_string(seed));
  return out;
}

}  // namespace sap::secants
