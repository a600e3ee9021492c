#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "sap/analysis.hpp"
#include "sap/dataset.hpp"
#include "sap/sap.hpp"

namespace sap::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Experiment record: enough configuration to re-run byte-identically, plus
// the outputs and references to sidecar files (bases, projections, curves).
// Serialized as UTF-8 JSON with a fixed key order and 17-significant-digit
// floats, so write -> read -> write is byte-identical.
struct ResultsDocument {
  int schema_version = kSchemaVersion;
  std::string kind;  // "sap", "sweep", "compare", "estimate-dim"
  Json config = Json::object();
  Json outputs = Json::object();
  Json timing = Json::object();  // only written when non-empty
};

// Strict rectangular numeric CSV. Failures name the offending row/column.
DataSet load_csv(const std::string& path, bool has_header);
void save_csv(const Matrix& matrix, const std::string& path);

// "SEC1" magic, u64-LE rows, u64-LE cols, then row-major f64-LE payload.
// Round-trips are bit-exact.
void save_matrix_binary(const Matrix& matrix, const std::string& path);
Matrix load_matrix_binary(const std::string& path);

// Extension dispatch: ".csv" is text, anything else the binary format.
// Loading sniffs the magic instead of trusting the name.
void save_dataset(const DataSet& data, const std::string& path);
DataSet load_dataset(const std::string& path);

struct PcaReduction {
  DataSet reduced;  // k x target_dim
  Matrix basis;     // n x target_dim principal directions of centered data
  Vector mean;      // column means; reconstruction = reduced * basis^T + mean
};

// Data PCA (centered), distinct from the secant PCA used to seed the solver.
PcaReduction pca_preprocess(const DataSet& data, Index target_dim);

void write_results(const ResultsDocument& doc, const std::string& path);
ResultsDocument read_results(const std::string& path);

// Curve rows as "dim,min_norm,run_id" with a header line.
void save_curve_csv(const std::vector<analysis::DimensionCurve>& curves,
                    const std::string& path);

// Canonical JSON text used by write_results; exposed for tests.
std::string dump_json(const Json& value);

}  // namespace sap::io
