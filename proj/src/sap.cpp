#include "sap/sap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sap/errors.hpp"
#include "sap/linalg.hpp"
#include "sap/parallel.hpp"

namespace sap {

namespace {

constexpr Index kScanBlock = 8192;
constexpr double kDegenerateNorm = 1e-12;
constexpr std::int64_t kStopWindow = 20;

void check_pair(const ProjectionBasis& basis, const secants::SecantSet& secants,
                const char* op) {
  if (secants.count() == 0) throw InvalidArgument(std::string(op) + ": empty secant set");
  if (basis.ambient_dim() != secants.dim()) {
    throw InvalidArgument(std::string(op) + ": basis dimension " +
                          std::to_string(basis.ambient_dim()) + " does not match secants in R^" +
                          std::to_string(secants.dim()));
  }
  if (basis.target_dim() < 1 || basis.target_dim() > basis.ambient_dim()) {
    throw InvalidArgument(std::string(op) + ": need 1 <= m <= n");
  }
}

// Pivot selection: largest |<p_k, s>| with ties (and the all-zero case)
// resolving to the smallest k.
Index select_pivot(const Vector& coeffs) {
  Index pivot = 0;
  double best = -1.0;
  for (Index k = 0; k < coeffs.size(); ++k) {
    const double mag = std::abs(coeffs[k]);
    if (mag > best) {
      best = mag;
      pivot = k;
    }
  }
  return pivot;
}

// Steps (b)-(d) of one iteration for an already-chosen worst secant.
ProjectionBasis rotate_toward(const ProjectionBasis& basis, const Vector& secant, double alpha) {
  const Index n = basis.ambient_dim();
  const Index m = basis.target_dim();
  const Vector coeffs = basis.columns.transpose() * secant;
  const Vector projected = basis.columns * coeffs;  // P P^T s
  const double projected_norm = projected.norm();
  const Index pivot = select_pivot(coeffs);

  ProjectionBasis next;
  if (projected_norm < kDegenerateNorm) {
    // Continuous limit of the step as ||P P^T s|| -> 0: keep the old basis
    // with the pivot column first and blend the pivot with the secant's
    // orthogonal component directly.
    next.columns.resize(n, m);
    Index at = 1;
    for (Index k = 0; k < m; ++k) {
      if (k != pivot) next.columns.col(at++) = basis.columns.col(k);
    }
    const Vector blend =
        (1.0 - alpha) * basis.columns.col(pivot) + alpha * (secant - projected);
    next.columns.col(0) = blend / blend.norm();
    return next;
  }

  Matrix ordered(n, m);
  ordered.col(0) = projected / projected_norm;  // unit, so the 1e-10 floor cannot misfire
  Index at = 1;
  for (Index k = 0; k < m; ++k) {
    if (k != pivot) ordered.col(at++) = basis.columns.col(k);
  }
  next.columns = linalg::modified_gram_schmidt(ordered);

  const Vector blend = (1.0 - alpha) * projected + alpha * (secant - projected);
  const double blend_norm = blend.norm();
  if (blend_norm > 0.0) {
    // Orthogonal to the retained columns: they are perpendicular to both
    // P P^T s and its complement.
    next.columns.col(0) = blend / blend_norm;
  }
  // else (alpha = 1 with the secant inside the span): the step direction
  // vanishes; keep the Gram-Schmidt first vector, a fixed point.
  return next;
}

}  // namespace

ProjectionBasis init_pca(const secants::SecantSet& secants, Index m) {
  if (secants.count() == 0) throw InvalidArgument("init_pca: empty secant set");
  if (m < 1 || m > secants.dim()) {
    throw InvalidArgument("init_pca: need 1 <= m <= " + std::to_string(secants.dim()) +
                          ", got " + std::to_string(m));
  }
  ProjectionBasis basis;
  basis.columns = linalg::left_spectrum(secants.secants).u.leftCols(m);
  return basis;
}

std::pair<std::int64_t, double> min_projected_secant(const ProjectionBasis& basis,
                                                     const secants::SecantSet& secants) {
  check_pair(basis, secants, "min_projected_secant");
  const Index p = secants.count();
  const std::int64_t nblocks = block_count(p, kScanBlock);

  // Per-block minima computed independently, then combined in block order:
  // the outcome is a function of the inputs alone, not the worker count.
  std::vector<std::pair<double, std::int64_t>> locals(
      static_cast<std::size_t>(nblocks), {std::numeric_limits<double>::infinity(), -1});
  parallel_blocks(p, kScanBlock, [&](std::int64_t b, std::int64_t begin, std::int64_t end) {
    const Index len = static_cast<Index>(end - begin);
    const Matrix proj =
        basis.columns.transpose() * secants.secants.middleCols(static_cast<Index>(begin), len);
    auto& local = locals[static_cast<std::size_t>(b)];
    for (Index c = 0; c < len; ++c) {
      const double norm = proj.col(c).norm();
      if (norm < local.first) local = {norm, begin + c};
    }
  });

  std::pair<double, std::int64_t> best = locals[0];
  for (std::size_t b = 1; b < locals.size(); ++b) {
    if (locals[b].first < best.first) best = locals[b];
  }
  return {best.second, best.first};
}

std::pair<ProjectionBasis, IterationRecord> sap_step(const ProjectionBasis& basis,
                                                     const secants::SecantSet& secants,
                                                     double alpha) {
  check_pair(basis, secants, "sap_step");
  if (alpha < 0.0 || alpha > 1.0) throw InvalidArgument("sap_step: alpha must lie in [0, 1]");
  const auto [index, norm] = min_projected_secant(basis, secants);
  IterationRecord record;
  record.worst_secant = index;
  record.min_norm = norm;
  return {rotate_toward(basis, secants.secants.col(static_cast<Index>(index)), alpha),
          record};
}

SapResult run_sap(const secants::SecantSet& secants, const SapConfig& config) {
  if (config.iterations < 0) throw InvalidArgument("run_sap: iterations must be >= 0");
  if (config.alpha < 0.0 || config.alpha > 1.0) {
    throw InvalidArgument("run_sap: alpha must lie in [0, 1]");
  }
  if (config.stop_tolerance && *config.stop_tolerance < 0.0) {
    throw InvalidArgument("run_sap: stop_tolerance must be >= 0");
  }

  SapResult result;
  result.final_basis = init_pca(secants, config.m);

  auto record_at = [&](std::int64_t iteration) {
    const auto [index, norm] = min_projected_secant(result.final_basis, secants);
    result.history.push_back({iteration, index, norm});
    return norm;
  };

  double norm = record_at(0);
  result.best_basis = result.final_basis;
  double best_norm = norm;
  std::vector<double> best_by_iteration{best_norm};

  for (std::int64_t it = 1; it <= config.iterations; ++it) {
    const auto& last = result.history.back();
    result.final_basis = rotate_toward(
        result.final_basis, secants.secants.col(static_cast<Index>(last.worst_secant)),
        config.alpha);
    norm = record_at(it);
    if (norm > best_norm) {
      best_norm = norm;
      result.best_basis = result.final_basis;
    }
    best_by_iteration.push_back(best_norm);
    if (config.stop_tolerance && it >= kStopWindow) {
      const double gain =
          best_norm - best_by_iteration[static_cast<std::size_t>(it - kStopWindow)];
      if (gain <= *config.stop_tolerance) break;
    }
  }
  result.iterations_run = static_cast<std::int64_t>(result.history.size()) - 1;
  return result;
}

DataSet project(const ProjectionBasis& basis, const DataSet& data) {
  if (basis.ambient_dim() != data.dim()) {
    throw InvalidArgument("project: basis lives in R^" + std::to_string(basis.ambient_dim()) +
                          " but data has dimension " + std::to_string(data.dim()));
  }
  DataSet out;
  out.meta = data.meta;
  out.points = data.points * basis.columns;
  return out;
}

}  // namespace sap
