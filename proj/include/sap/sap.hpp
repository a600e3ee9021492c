#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sap/dataset.hpp"
#include "sap/secants.hpp"

namespace sap {

// Orthonormal columns spanning the projection subspace.
struct ProjectionBasis {
  Matrix columns;  // ambient_dim x target_dim

  Index ambient_dim() const { return columns.rows(); }
  Index target_dim() const { return columns.cols(); }
};

struct SapConfig {
  Index m = 2;                          // target dimension
  std::int64_t iterations = 100;        // maximum step count
  double alpha = 0.01;                  // shift parameter in [0, 1]
  std::optional<double> stop_tolerance; // plateau tolerance; unset = fixed budget
  bool return_best = false;             // selects best_basis for downstream use
};

struct IterationRecord {
  std::int64_t iteration = 0;    // 0 records the initialization
  std::int64_t worst_secant = 0; // argmin column index at this basis
  double min_norm = 0.0;         // the corresponding projected norm
};

struct SapResult {
  ProjectionBasis final_basis;
  ProjectionBasis best_basis;             // largest observed min-norm
  std::vector<IterationRecord> history;   // length = iterations_run + 1
  std::int64_t iterations_run = 0;

  const ProjectionBasis& selected(bool return_best) const {
    return return_best ? best_basis : final_basis;
  }
};

// PCA initialization: the first m left singular vectors of the secant matrix.
ProjectionBasis init_pca(const secants::SecantSet& secants, Index m);

// Index and norm of the secant with the smallest projected norm; ties break
// to the smallest index. Byte-identical result for any worker count.
std::pair<std::int64_t, double> min_projected_secant(const ProjectionBasis& basis,
                                                     const secants::SecantSet& secants);

// One iteration: locate the worst secant, pivot the basis, and blend the
// first vector toward the secant's orthogonal complement. The record holds
// the pre-step argmin (its iteration field is left at 0 for the caller).
std::pair<ProjectionBasis, IterationRecord> sap_step(const ProjectionBasis& basis,
                                                     const secants::SecantSet& secants,
                                                     double alpha);

// Full loop: PCA init, `iterations` steps (early plateau stop optional),
// tracking both the final and the best-seen basis.
SapResult run_sap(const secants::SecantSet& secants, const SapConfig& config);

// Rows of the result are P^T x for each data row x.
DataSet project(const ProjectionBasis& basis, const DataSet& data);

}  // namespace sap
