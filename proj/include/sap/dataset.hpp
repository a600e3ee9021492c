#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sap {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// A point cloud in R^n: one row per point, plus free-form provenance
// (generator name, parameters, seeds, parent dataset).
struct DataSet {
  Matrix points;  // k x n
  std::vector<std::pair<std::string, std::string>> meta;

  Index count() const { return points.rows(); }
  Index dim() const { return points.cols(); }

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

}  // namespace sap
