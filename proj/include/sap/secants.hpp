#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sap/dataset.hpp"

namespace sap::secants {

struct IndexPair {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

// The normalized secant set of a dataset. Column c of `secants` is
// (x_i - x_j) / |x_i - x_j| for pairs[c] = (i, j) with i < j, columns in
// lexicographic pair order. Immutable after construction.
struct SecantSet {
  Matrix secants;               // n x p, unit columns
  std::vector<double> lengths;  // pre-normalization lengths, > 0
  std::vector<IndexPair> pairs;
  std::optional<double> threshold;
  std::int64_t dropped_degenerate = 0;  // |d| <= dedup_epsilon
  std::int64_t dropped_short = 0;       // below the length threshold

  Index dim() const { return secants.rows(); }
  Index count() const { return secants.cols(); }
};

struct SecantOptions {
  // Pairs shorter than this are discarded before normalization.
  std::optional<double> threshold;
  // Pairs at or below this length are treated as duplicate points.
  double dedup_epsilon = 1e-12;
  // Construction refuses if the secant matrix alone would exceed this.
  std::uint64_t memory_budget_bytes = std::uint64_t(8) << 30;
};

// Number of point pairs: k(k-1)/2.
constexpr std::int64_t secant_count(std::int64_t k) { return k < 2 ? 0 : k * (k - 1) / 2; }

// Builds the full normalized secant set. Pair enumeration is data-parallel
// over fixed blocks of the pair index space; output columns land at
// precomputed positions, so the result does not depend on worker count.
SecantSet compute_secants(const DataSet& data, const SecantOptions& options = {});

// Uniform sample of `count` points without replacement; selected indices are
// kept in ascending order. Deterministic per seed.
DataSet subsample(const DataSet& data, Index count, std::uint64_t seed);

}  // namespace sap::secants
