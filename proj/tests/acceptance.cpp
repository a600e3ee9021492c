// End-to-end acceptance gate. Each criterion prints one [PASS]/[FAIL] line;
// the process exits nonzero if any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "sap/analysis.hpp"
#include "sap/errors.hpp"
#include "sap/io.hpp"
#include "sap/linalg.hpp"
#include "sap/rng.hpp"
#include "sap/sap.hpp"
#include "sap/secants.hpp"
#include "sap/synth.hpp"

using namespace sap;

namespace {

namespace fs = std::filesystem;

int failures = 0;

void report(int number, const std::string& label, const std::string& detail) {
  if (detail.empty()) {
    std::printf("[PASS] criterion %d: %s\n", number, label.c_str());
  } else {
    std::printf("[FAIL] criterion %d: %s -- %s\n", number, label.c_str(), detail.c_str());
    ++failures;
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Matrix random_gaussian(RandomStream& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.gaussian();
  }
  return m;
}

Matrix random_unit_columns(RandomStream& rng, Index n, Index p) {
  Matrix m = random_gaussian(rng, n, p);
  for (Index c = 0; c < p; ++c) m.col(c) /= m.col(c).norm();
  return m;
}

secants::SecantSet wrap_secants(const Matrix& columns) {
  secants::SecantSet s;
  s.secants = columns;
  for (Index c = 0; c < columns.cols(); ++c) {
    s.lengths.push_back(1.0);
    s.pairs.push_back({0, static_cast<std::uint32_t>(c + 1)});
  }
  return s;
}

ProjectionBasis random_basis(RandomStream& rng, Index n, Index m) {
  ProjectionBasis basis;
  basis.columns = linalg::modified_gram_schmidt(random_unit_columns(rng, n, m));
  return basis;
}

double orthonormality_defect(const Matrix& p) {
  return (p.transpose() * p - Matrix::Identity(p.cols(), p.cols())).cwiseAbs().maxCoeff();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// ---- criterion 1: dimension sweep ordering --------------------------------

void criterion_sweep_ordering() {
  std::string detail;
  try {
    const std::vector<Index> dims = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    SapConfig config;
    config.iterations = 100;
    config.alpha = 0.01;
    const auto curve = analysis::sweep(synth::curve_3d(256, 101, 15), dims, config);
    const auto torus = analysis::sweep(synth::torus(256, 102, 2.0, 1.0, 15), dims, config);
    const auto sphere = analysis::sweep(synth::sphere3(256, 103, 15), dims, config);

    if (!(curve.min_norms[2] >= 0.1)) {
      detail += "curve min-norm at m=3 is " + fmt(curve.min_norms[2]) + " < 0.1; ";
    }
    const double slack = 0.02;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!(curve.min_norms[i] >= torus.min_norms[i] - slack)) {
        detail += "curve " + fmt(curve.min_norms[i]) + " < torus " + fmt(torus.min_norms[i]) +
                  " at m=" + std::to_string(dims[i]) + "; ";
      }
      if (!(torus.min_norms[i] >= sphere.min_norms[i] - slack)) {
        detail += "torus " + fmt(torus.min_norms[i]) + " < 3-sphere " +
                  fmt(sphere.min_norms[i]) + " at m=" + std::to_string(dims[i]) + "; ";
      }
    }
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(1, "sweep m=1..10 keeps the ordering curve >= torus >= 3-sphere", detail);
}

// ---- criterion 2: trig-moment comparison -----------------------------------

std::uint64_t available_ram_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key, unit;
  std::uint64_t kib = 0;
  while (in >> key >> kib >> unit) {
    if (key == "MemAvailable:") return kib * 1024;
  }
  return 0;
}

std::optional<analysis::ProjectionComparison> criterion_trig_comparison() {
  const Index full_count = 12800;
  // secant matrix + lengths + pairs for the full point set
  const auto need = static_cast<std::uint64_t>(secants::secant_count(full_count)) * (10 + 2) * 8;
  std::uint64_t budget = secants::SecantOptions{}.memory_budget_bytes;
  const std::uint64_t ram = available_ram_bytes();
  if (ram > 0) budget = std::min(budget, static_cast<std::uint64_t>(0.85 * ram));

  const bool full_scale = need <= budget;
  const Index count = full_scale ? full_count : 2000;
  const double sap_floor = full_scale ? 0.12 : 0.10;
  const double pca_ceiling = full_scale ? 0.08 : 0.10;
  const std::string label = "trig-moment at " + std::to_string(count) +
                            " points (m=3): solver > naive > PCA with margins";

  std::string detail;
  std::optional<analysis::ProjectionComparison> result;
  try {
    SapConfig config;
    config.iterations = 100;
    config.alpha = 0.01;
    const auto cmp =
        analysis::compare_projections(synth::trig_moment_curve(count, 42), 3, config);
    if (!(cmp.sap_norm > cmp.naive_norm && cmp.naive_norm > cmp.pca_norm)) {
      detail += "ordering violated: sap=" + fmt(cmp.sap_norm) + " naive=" +
                fmt(cmp.naive_norm) + " pca=" + fmt(cmp.pca_norm) + "; ";
    }
    if (!(cmp.sap_norm >= sap_floor)) {
      detail += "sap " + fmt(cmp.sap_norm) + " < " + fmt(sap_floor) + "; ";
    }
    if (!(cmp.pca_norm <= pca_ceiling)) {
      detail += "pca " + fmt(cmp.pca_norm) + " > " + fmt(pca_ceiling) + "; ";
    }
    result = cmp;
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(2, label, detail);
  return result;
}

// ---- criterion 3: noise thresholding ---------------------------------------

void criterion_thresholding() {
  std::string detail;
  try {
    const std::vector<Index> dims = {3, 4, 5, 6};
    SapConfig config;
    config.iterations = 100;
    config.alpha = 0.01;
    const DataSet clean = synth::trig_moment_curve(1024, 7);
    const DataSet noisy = synth::add_gaussian_noise(clean, 0.1, derive_seed(7, 2));

    secants::SecantOptions thresholded;
    thresholded.threshold = 2.0;
    const auto reference = analysis::sweep(clean, dims, config);
    const auto raw = analysis::sweep(noisy, dims, config);
    const auto cut = analysis::sweep(noisy, dims, config, thresholded);

    int wins = 0;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      const double target = reference.min_norms[i];
      if (std::abs(cut.min_norms[i] - target) < std::abs(raw.min_norms[i] - target)) ++wins;
    }
    if (wins < 3) {
      detail = "thresholded sweep closer to noiseless in only " + std::to_string(wins) +
               " of 4 dimensions";
    }
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(3, "length thresholding tracks the noiseless sweep in >= 3 of 4 dims", detail);
}

// ---- criterion 4: convergence trend ----------------------------------------

void criterion_convergence(const std::optional<analysis::ProjectionComparison>& cmp) {
  std::string detail;
  if (!cmp || cmp->sap.history.empty()) {
    detail = "no comparison run available";
  } else {
    const double init = cmp->sap.history.front().min_norm;
    double best = 0.0;
    for (const auto& rec : cmp->sap.history) best = std::max(best, rec.min_norm);
    if (!(best >= 1.2 * init)) {
      detail = "best " + fmt(best) + " is below 1.2x the initial " + fmt(init);
    }
  }
  report(4, "best-so-far min-norm beats the PCA start by >= 20%", detail);
}

// ---- criterion 5: property suite -------------------------------------------

std::string property_orthonormality() {
  RandomStream rng(501);
  for (int t = 0; t < 1000; ++t) {
    const Index n = 2 + static_cast<Index>(rng.uniform_index(7));
    const Index m = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const Index p = 3 + static_cast<Index>(rng.uniform_index(30));
    const secants::SecantSet s = wrap_secants(random_unit_columns(rng, n, p));
    const auto [next, record] = sap_step(random_basis(rng, n, m), s, 0.01);
    const double defect = orthonormality_defect(next.columns);
    if (!(defect <= 1e-10)) {
      return "orthonormality defect " + fmt(defect) + " at step " + std::to_string(t);
    }
  }
  return "";
}

std::string property_non_decrease() {
  RandomStream rng(502);
  for (const double alpha : {0.01, 0.1, 0.5, 2.0 / 3.0}) {
    for (int t = 0; t < 1000; ++t) {
      const double theta = rng.uniform(1e-3, 1.5697963267948966);
      const double a = std::cos(theta);
      Matrix cols(2, 1);
      cols << a, std::sin(theta);
      ProjectionBasis basis;
      basis.columns = Matrix::Identity(2, 1);
      const auto [next, record] = sap_step(basis, wrap_secants(cols), alpha);
      const double after = (next.columns.transpose() * cols.col(0)).norm();
      if (!(after >= a - 1e-12)) {
        return "norm fell from " + fmt(a) + " to " + fmt(after) + " at alpha=" + fmt(alpha);
      }
    }
  }
  return "";
}

std::string property_span_preservation() {
  RandomStream rng(503);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + static_cast<Index>(rng.uniform_index(9));
    const Index k = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    const Matrix a = random_gaussian(rng, n, k);
    const Matrix q = linalg::modified_gram_schmidt(a);
    if (orthonormality_defect(q) > 1e-10) return "output not orthonormal";
    for (Index c = 0; c < k; ++c) {
      const Vector residual = a.col(c) - q * (q.transpose() * a.col(c));
      if (!(residual.norm() <= 1e-10 * std::max(1.0, a.col(c).norm()))) {
        return "column " + std::to_string(c) + " left the span, residual " +
               fmt(residual.norm());
      }
    }
  }
  return "";
}

std::string property_full_dimension() {
  RandomStream rng(504);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + static_cast<Index>(rng.uniform_index(5));
    const Index p = 10 + static_cast<Index>(rng.uniform_index(21));
    const secants::SecantSet s = wrap_secants(random_unit_columns(rng, n, p));
    SapConfig config;
    config.m = n;
    config.iterations = 10;
    const SapResult result = run_sap(s, config);
    for (const auto& rec : result.history) {
      if (!(std::abs(rec.min_norm - 1.0) <= 1e-12)) {
        return "m=n min-norm drifted to " + fmt(rec.min_norm);
      }
    }
  }
  return "";
}

std::string property_min_oracle() {
  RandomStream rng(505);
  for (int t = 0; t < 200; ++t) {
    const Index k = 2 + static_cast<Index>(rng.uniform_index(7));   // 2..8 points
    const Index n = 2 + static_cast<Index>(rng.uniform_index(3));   // 2..4 dims
    const Index m = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    DataSet data;
    data.points = random_gaussian(rng, k, n);
    const secants::SecantSet s = secants::compute_secants(data);
    const ProjectionBasis basis = random_basis(rng, n, m);
    const auto fast = min_projected_secant(basis, s);

    std::int64_t slow_arg = 0;
    double slow_min = std::numeric_limits<double>::infinity();
    double runner_up = std::numeric_limits<double>::infinity();
    for (Index c = 0; c < s.count(); ++c) {
      const double norm = (basis.columns.transpose() * s.secants.col(c)).norm();
      if (norm < slow_min) {
        runner_up = slow_min;
        slow_min = norm;
        slow_arg = c;
      } else {
        runner_up = std::min(runner_up, norm);
      }
    }
    if (std::abs(fast.second - slow_min) > 1e-12) {
      return "min mismatch " + fmt(fast.second) + " vs " + fmt(slow_min) + " at trial " +
             std::to_string(t);
    }
    const double chosen = (basis.columns.transpose() * s.secants.col(fast.first)).norm();
    if (chosen > slow_min + 1e-12) {
      return "argmin " + std::to_string(fast.first) + " is not a minimizer at trial " +
             std::to_string(t);
    }
    if (runner_up > slow_min + 1e-9 && fast.first != slow_arg) {
      return "argmin mismatch without a tie at trial " + std::to_string(t);
    }
  }
  return "";
}

std::string property_secant_count() {
  RandomStream rng(506);
  for (const Index k : {2, 3, 8, 41}) {
    DataSet data;
    data.points = random_gaussian(rng, k, 5);
    const secants::SecantSet s = secants::compute_secants(data);
    if (s.count() != secants::secant_count(k) || s.dropped_degenerate != 0 ||
        s.dropped_short != 0) {
      return "count " + std::to_string(s.count()) + " for " + std::to_string(k) + " points";
    }
  }
  return "";
}

std::string property_format_round_trip(const fs::path& dir) {
  RandomStream rng(507);
  Matrix m(64, 9);
  for (Index c = 0; c < m.cols(); ++c) {
    for (Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-10.0, 10.0);
  }
  const std::string bin = (dir / "roundtrip.sec").string();
  io::save_matrix_binary(m, bin);
  const Matrix back = io::load_matrix_binary(bin);
  if (back.rows() != m.rows() || back.cols() != m.cols() ||
      std::memcmp(m.data(), back.data(), sizeof(double) * 64 * 9) != 0) {
    return "binary payload changed";
  }
  const std::string again = (dir / "roundtrip2.sec").string();
  io::save_matrix_binary(back, again);
  if (read_file(bin) != read_file(again)) return "binary files differ after resave";

  const std::string csv = (dir / "roundtrip.csv").string();
  io::save_csv(m, csv);
  if (io::load_csv(csv, false).points != m) return "csv values changed";
  return "";
}

std::string property_upper_bound() {
  RandomStream rng(508);
  for (int t = 0; t < 50; ++t) {
    const Index k = 5 + static_cast<Index>(rng.uniform_index(26));
    const Index n = 2 + static_cast<Index>(rng.uniform_index(7));
    const Index m = 1 + static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
    DataSet data;
    data.points = random_gaussian(rng, k, n);
    const secants::SecantSet s = secants::compute_secants(data);
    const auto bounds = analysis::bilipschitz_constants(random_basis(rng, n, m), s);
    if (!(bounds.m2 <= 1.0 + 1e-10)) return "m2 = " + fmt(bounds.m2);
  }
  return "";
}

void criterion_property_suite(const fs::path& dir) {
  std::string detail;
  try {
    const std::pair<const char*, std::string> checks[] = {
        {"step orthonormality", property_orthonormality()},
        {"targeted non-decrease", property_non_decrease()},
        {"span preservation", property_span_preservation()},
        {"full-dimension norm", property_full_dimension()},
        {"min oracle", property_min_oracle()},
        {"secant count", property_secant_count()},
        {"format round-trip", property_format_round_trip(dir)},
        {"upper bound", property_upper_bound()},
    };
    for (const auto& [name, error] : checks) {
      if (!error.empty()) detail += std::string(name) + ": " + error + "; ";
    }
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(5, "property suite passes with zero failures", detail);
}

// ---- criterion 6: determinism across worker counts --------------------------

void criterion_determinism(const fs::path& dir) {
  std::string detail;
  try {
    const std::string input = (dir / "curve.sec").string();
    io::save_dataset(synth::curve_3d(256, 101, 15), input);
    const std::string prefix = (dir / "sweep6").string();
    const std::string base = std::string("\"") + SAP_CLI_PATH + "\" sweep -i \"" + input +
                             "\" --dims 1:10 --iterations 100 -o \"" + prefix +
                             "\" --workers ";
    const auto run = [&](const char* workers) {
      const std::string cmd = base + workers + " > /dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    if (!run("1")) {
      detail = "workers=1 sweep failed";
    } else {
      const std::string first = read_file(prefix + ".json");
      if (!run("8")) {
        detail = "workers=8 sweep failed";
      } else if (first.empty()) {
        detail = "results JSON is empty";
      } else if (first != read_file(prefix + ".json")) {
        detail = "results JSON differs between 1 and 8 workers";
      }
    }
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(6, "sweep results JSON is byte-identical for 1 and 8 workers", detail);
}

// ---- criterion 7: dimension heuristic ---------------------------------------

void criterion_dimension_heuristic() {
  std::string detail;
  try {
    const auto check = [&](std::vector<double> norms, Index want_embedding,
                           Index want_manifold) {
      analysis::DimensionCurve curve;
      for (Index m = 1; m <= static_cast<Index>(norms.size()); ++m) curve.dims.push_back(m);
      curve.min_norms = std::move(norms);
      curve.init_norms.assign(curve.dims.size(), 0.0);
      const auto estimate = analysis::estimate_dimension(curve);
      if (!estimate) {
        detail += "no estimate for the knee at " + std::to_string(want_embedding) + "; ";
      } else if (estimate->embedding_dim != want_embedding ||
                 estimate->manifold_dim != want_manifold) {
        detail += "knee at " + std::to_string(want_embedding) + " read as (" +
                  std::to_string(estimate->embedding_dim) + ", " +
                  std::to_string(estimate->manifold_dim) + "); ";
      }
    };
    check({0.01, 0.02, 0.22, 0.26, 0.30, 0.34, 0.38, 0.42, 0.46, 0.50}, 3, 1);
    check({0.01, 0.02, 0.04, 0.22, 0.27, 0.32, 0.37, 0.42, 0.47, 0.52}, 4, 2);
  } catch (const std::exception& e) {
    detail = e.what();
  }
  report(7, "min-norm knees at 3 and 4 give manifold estimates 1 and 2", detail);
}

}  // namespace

int main() {
  const fs::path dir =
      fs::temp_directory_path() / ("sap_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);

  criterion_sweep_ordering();
  const auto comparison = criterion_trig_comparison();
  criterion_thresholding();
  criterion_convergence(comparison);
  criterion_property_suite(dir);
  criterion_determinism(dir);
  criterion_dimension_heuristic();

  fs::remove_all(dir);
  if (failures > 0) {
    std::printf("%d of 7 criteria failed\n", failures);
    return 1;
  }
  std::printf("all 7 criteria passed\n");
  return 0;
}
