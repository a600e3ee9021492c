#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sap/dataset.hpp"
#include "sap/sap.hpp"
#include "sap/secants.hpp"

namespace sap::analysis {

// Distortion bounds m1*d(x,y) <= d(Px,Py) <= m2*d(x,y) over the secant set,
// plus the inverse constants of the reconstruction map.
struct BiLipschitzBounds {
  double m1 = 0.0;          // infimum ratio (injectivity parameter)
  double m2 = 0.0;          // supremum ratio (Lipschitz constant)
  double inverse_m1 = 0.0;  // = 1/m2
  double inverse_m2 = 0.0;  // = 1/m1; +infinity when m1 = 0
};

struct DimensionEstimate {
  Index embedding_dim = 0;  // smallest adequate projection dimension m*
  Index manifold_dim = 0;   // ceil((m* - 1) / 2)
};

// Minimum projected secant norm as a function of projection dimension.
struct DimensionCurve {
  std::vector<Index> dims;        // strictly increasing
  std::vector<double> min_norms;  // best-so-far SAP value per dimension
  std::vector<double> init_norms; // PCA-initialization value per dimension
  std::vector<std::pair<std::string, std::string>> meta;
  std::optional<DimensionEstimate> estimate;

  void set_meta(const std::string& key, const std::string& value) {
    for (auto& kv : meta) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    meta.emplace_back(key, value);
  }

  std::optional<std::string> meta_value(const std::string& key) const {
    for (const auto& kv : meta) {
      if (kv.first == key) return kv.second;
    }
    return std::nullopt;
  }
};

struct RepeatedSweep {
  std::vector<Index> dims;
  std::vector<DimensionCurve> curves;  // one per subsample run
  std::vector<double> mean;            // per-dimension mean of min_norms
  std::vector<double> spread;          // per-dimension population std deviation
};

struct ProjectionComparison {
  double naive_norm = 0.0;  // first-m-coordinates baseline
  double pca_norm = 0.0;    // PCA initialization (iteration 0)
  double sap_norm = 0.0;    // basis selected by config.return_best
  SapResult sap;
};

// m1 is computed by the same scan as min_projected_secant, so the two agree
// bit for bit on identical inputs.
BiLipschitzBounds bilipschitz_constants(const ProjectionBasis& basis,
                                        const secants::SecantSet& secants);

// First m coordinate directions of R^n.
ProjectionBasis naive_projection(Index n, Index m);

// Shared secant set; min projected norm under the naive, PCA, and SAP bases.
ProjectionComparison compare_projections(const DataSet& data, Index m, const SapConfig& config,
                                         const secants::SecantOptions& options = {});

// One run_sap per requested dimension over a shared secant set.
DimensionCurve sweep(const DataSet& data, const std::vector<Index>& dims, const SapConfig& config,
                     const secants::SecantOptions& options = {});

// `runs` independent subsamples (seeds derived from `seed`), one sweep each.
RepeatedSweep repeated_sample_sweep(const DataSet& data, Index sample_size, std::int64_t runs,
                                    const std::vector<Index>& dims, const SapConfig& config,
                                    std::uint64_t seed,
                                    const secants::SecantOptions& options = {});

// m* = smallest dim whose min-norm clears `floor` and rises by at least
// `jump_ratio` over the previous dim (first dim exempt from the ratio test);
// the manifold estimate inverts Whitney's 2d+1 embedding bound. Empty
// optional when no dimension qualifies.
std::optional<DimensionEstimate> estimate_dimension(const DimensionCurve& curve,
                                                    double jump_ratio = 2.0, double floor = 0.1);

}  // namespace sap::analysis
