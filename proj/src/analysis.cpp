#include "sap/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sap/errors.hpp"
#include "sap/parallel.hpp"
#include "sap/rng.hpp"

namespace sap::analysis {

namespace {

constexpr Index kScanBlock = 8192;

double max_projected_secant(const ProjectionBasis& basis, const secants::SecantSet& secants) {
  const Index p = secants.count();
  const std::int64_t nblocks = block_count(p, kScanBlock);
  std::vector<double> locals(static_cast<std::size_t>(nblocks), 0.0);
  parallel_blocks(p, kScanBlock, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    const Index len = static_cast<Index>(end - begin);
    const Matrix proj =
        basis.columns.transpose() * secants.secants.middleCols(static_cast<Index>(begin), len);
    double local = 0.0;
    for (Index c = 0; c < len; ++c) local = std::max(local, proj.col(c).norm());
    locals[static_cast<std::size_t>(b)] = local;
  });
  double best = 0.0;
  for (double v : locals) best = std::max(best, v);
  return best;
}

void stamp_meta(DimensionCurve& curve, const DataSet& data, const SapConfig& config,
                const secants::SecantOptions& options) {
  curve.meta = data.meta;
  curve.set_meta("points", std::to_string(data.count()));
  curve.set_meta("iterations", std::to_string(config.iterations));
  curve.set_meta("alpha", std::to_string(config.alpha));
  if (options.threshold) curve.set_meta("threshold", std::to_string(*options.threshold));
}

}  // namespace

BiLipschitzBounds bilipschitz_constants(const ProjectionBasis& basis,
                                        const secants::SecantSet& secants) {
  BiLipschitzBounds out;
  out.m1 = min_projected_secant(basis, secants).second;  // validates the pair too
  out.m2 = max_projected_secant(basis, secants);
  out.inverse_m1 =
      out.m2 == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / out.m2;
  out.inverse_m2 =
      out.m1 == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / out.m1;
  return out;
}

ProjectionBasis naive_projection(Index n, Index m) {
  if (n < 1 || m < 1 || m > n) {
    throw InvalidArgument("naive_projection: need 1 <= m <= n, got m=" + std::to_string(m) +
                          " n=" + std::to_string(n));
  }
  ProjectionBasis basis;
  basis.columns = Matrix::Identity(n, m);
  return basis;
}

ProjectionComparison compare_projections(const DataSet& data, Index m, const SapConfig& config,
                                         const secants::SecantOptions& options) {
  const secants::SecantSet secants = secants::compute_secants(data, options);
  SapConfig run_config = config;
  run_config.m = m;

  ProjectionComparison out;
  out.naive_norm = min_projected_secant(naive_projection(data.dim(), m), secants).second;
  out.sap = run_sap(secants, run_config);
  out.pca_norm = out.sap.history.front().min_norm;
  out.sap_norm = min_projected_secant(out.sap.selected(config.return_best), secants).second;
  return out;
}

DimensionCurve sweep(const DataSet& data, const std::vector<Index>& dims, const SapConfig& config,
                     const secants::SecantOptions& options) {
  if (dims.empty()) throw InvalidArgument("sweep: no projection dimensions given");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || dims[i] > data.dim()) {
      throw InvalidArgument("sweep: dimension " + std::to_string(dims[i]) +
                            " outside 1.." + std::to_string(data.dim()));
    }
    if (i > 0 && dims[i] <= dims[i - 1]) {
      throw InvalidArgument("sweep: dimensions must be strictly increasing");
    }
  }
  const secants::SecantSet secants = secants::compute_secants(data, options);

  DimensionCurve curve;
  curve.dims = dims;
  stamp_meta(curve, data, config, options);
  for (Index m : dims) {
    SapConfig run_config = config;
    run_config.m = m;
    const SapResult result = run_sap(secants, run_config);
    double best = 0.0;
    for (const IterationRecord& rec : result.history) best = std::max(best, rec.min_norm);
    curve.min_norms.push_back(best);
    curve.init_norms.push_back(result.history.front().min_norm);
  }
  return curve;
}

RepeatedSweep repeated_sample_sweep(const DataSet& data, Index sample_size, std::int64_t runs,
                                    const std::vector<Index>& dims, const SapConfig& config,
                                    std::uint64_t seed, const secants::SecantOptions& options) {
  if (runs < 1) throw InvalidArgument("repeated_sample_sweep: runs must be >= 1");

  RepeatedSweep out;
  out.dims = dims;
  for (std::int64_t r = 0; r < runs; ++r) {
    const DataSet sample =
        secants::subsample(data, sample_size, derive_seed(seed, static_cast<std::uint64_t>(r)));
    DimensionCurve curve = sweep(sample, dims, config, options);
    curve.set_meta("run", std::to_string(r));
    out.curves.push_back(std::move(curve));
  }

  out.mean.assign(dims.size(), 0.0);
  out.spread.assign(dims.size(), 0.0);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    double sum = 0.0;
    for (const DimensionCurve& c : out.curves) sum += c.min_norms[d];
    const double mean = sum / static_cast<double>(runs);
    double var = 0.0;
    for (const DimensionCurve& c : out.curves) {
      const double diff = c.min_norms[d] - mean;
      var += diff * diff;
    }
    out.mean[d] = mean;
    out.spread[d] = std::sqrt(var / static_cast<double>(runs));
  }
  return out;
}

std::optional<DimensionEstimate> estimate_dimension(const DimensionCurve& curve,
                                                    double jump_ratio, double floor) {
  if (jump_ratio <= 1.0) throw InvalidArgument("estimate_dimension: jump_ratio must be > 1");
  if (floor < 0.0) throw InvalidArgument("estimate_dimension: floor must be >= 0");
  for (std::size_t i = 0; i < curve.dims.size(); ++i) {
    if (curve.min_norms[i] < floor) continue;
    if (i > 0 && curve.min_norms[i] < jump_ratio * curve.min_norms[i - 1]) continue;
    DimensionEstimate est;
    est.embedding_dim = curve.dims[i];
    est.manifold_dim = est.embedding_dim / 2;  // = ceil((m* - 1) / 2)
    return est;
  }
  return std::nullopt;
}

}  // namespace sap::analysis
