#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sap/analysis.hpp"
#include "sap/errors.hpp"
#include "sap/io.hpp"
#include "sap/linalg.hpp"
#include "sap/parallel.hpp"
#include "sap/rng.hpp"
#include "sap/sap.hpp"
#include "sap/secants.hpp"
#include "sap/synth.hpp"

namespace {

using sap::Index;
using sap::io::Json;

constexpr std::uint64_t kNoiseStream = 2;  // default noise seed = derive_seed(seed, 2)

struct CommonFlags {
  int workers = 0;
  double memory_budget_gib = 0.0;  // <= 0: fall back to env, then 8 GiB
  bool timing = false;
};

class Stopwatch {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - mark_).count();
    mark_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point mark_ = std::chrono::steady_clock::now();
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--workers", flags.workers,
                  "Worker threads for data-parallel kernels; 0 = all hardware threads. "
                  "Affects wall time only, never results.")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--memory-budget-gib", flags.memory_budget_gib,
                  "Secant-matrix memory budget in GiB "
                  "(default: SAP_MEMORY_BUDGET_GIB env var, else 8)");
  cmd->add_flag("--timing", flags.timing,
                "Record wall-clock timings in the results JSON (off by default so "
                "repeated runs produce byte-identical files)");
}

std::uint64_t resolve_budget_bytes(double flag_gib) {
  double gib = flag_gib;
  if (gib <= 0.0) {
    if (const char* env = std::getenv("SAP_MEMORY_BUDGET_GIB")) gib = std::strtod(env, nullptr);
  }
  if (gib <= 0.0) gib = 8.0;
  return static_cast<std::uint64_t>(gib * 1073741824.0);
}

void apply_common(const CommonFlags& flags) { sap::set_worker_count(flags.workers); }

std::vector<Index> parse_dims(const std::string& text) {
  const auto parse_int = [&](const std::string& part) {
    try {
      std::size_t used = 0;
      const long long value = std::stoll(part, &used);
      if (used != part.size() || value < 1) throw std::invalid_argument(part);
      return static_cast<Index>(value);
    } catch (const std::exception&) {
      throw sap::InvalidArgument("invalid dims '" + text + "': expected M or LO:HI with "
                                 "positive integers");
    }
  };
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos) return {parse_int(text)};
  const Index lo = parse_int(text.substr(0, colon));
  const Index hi = parse_int(text.substr(colon + 1));
  if (hi < lo) {
    throw sap::InvalidArgument("invalid dims range '" + text + "': upper bound below lower");
  }
  std::vector<Index> dims;
  for (Index m = lo; m <= hi; ++m) dims.push_back(m);
  return dims;
}

Json history_json(const std::vector<sap::IterationRecord>& history) {
  Json rows = Json::array();
  for (const auto& rec : history) {
    rows.push_back(Json::array({rec.iteration, rec.worst_secant, rec.min_norm}));
  }
  return rows;
}

Json index_array(const std::vector<Index>& values) {
  Json out = Json::array();
  for (Index v : values) out.push_back(static_cast<std::int64_t>(v));
  return out;
}

Json double_array(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(v);
  return out;
}

// ---- synth ----------------------------------------------------------------

struct SynthFlags {
  std::string generator;
  std::string output;
  Index count = 256;
  std::uint64_t seed = 1;
  Index target_dim = 15;
  bool target_dim_set = false;
  double big_radius = 2.0;
  double small_radius = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  bool noise_seed_set = false;
};

int run_synth(const SynthFlags& flags) {
  sap::DataSet data;
  if (flags.generator == "trig-moment") {
    if (flags.target_dim_set) {
      throw sap::InvalidArgument("trig-moment lives in R^10; --target-dim does not apply");
    }
    data = sap::synth::trig_moment_curve(flags.count, flags.seed);
  } else if (flags.generator == "curve3d") {
    data = sap::synth::curve_3d(flags.count, flags.seed, flags.target_dim);
  } else if (flags.generator == "torus") {
    data = sap::synth::torus(flags.count, flags.seed, flags.big_radius, flags.small_radius,
                             flags.target_dim);
  } else if (flags.generator == "sphere3") {
    data = sap::synth::sphere3(flags.count, flags.seed, flags.target_dim);
  } else {
    throw sap::InvalidArgument("unknown generator '" + flags.generator +
                               "' (expected trig-moment, curve3d, torus, or sphere3)");
  }
  if (flags.noise_sigma > 0.0) {
    const std::uint64_t noise_seed =
        flags.noise_seed_set ? flags.noise_seed : sap::derive_seed(flags.seed, kNoiseStream);
    data = sap::synth::add_gaussian_noise(data, flags.noise_sigma, noise_seed);
  }
  sap::io::save_dataset(data, flags.output);
  std::printf("points=%lld dim=%lld seed=%llu -> %s\n", static_cast<long long>(data.count()),
              static_cast<long long>(data.dim()),
              static_cast<unsigned long long>(flags.seed), flags.output.c_str());
  return 0;
}

// ---- sap ------------------------------------------------------------------

struct SapFlags {
  CommonFlags common;
  std::string input;
  std::string output_prefix;
  Index m = 2;
  std::int64_t iterations = 100;
  double alpha = 0.01;
  double threshold = -1.0;
  bool threshold_set = false;
  double stop_tolerance = 0.0;
  bool stop_tolerance_set = false;
  bool return_best = false;
};

sap::secants::SecantOptions secant_options(double threshold, bool threshold_set,
                                           const CommonFlags& common) {
  sap::secants::SecantOptions options;
  if (threshold_set) options.threshold = threshold;
  options.memory_budget_bytes = resolve_budget_bytes(common.memory_budget_gib);
  return options;
}

int run_sap_command(const SapFlags& flags) {
  apply_common(flags.common);
  Stopwatch watch;
  const sap::DataSet data = sap::io::load_dataset(flags.input);
  const sap::secants::SecantSet secants =
      sap::secants::compute_secants(data, secant_options(flags.threshold, flags.threshold_set,
                                                         flags.common));
  const double secants_ms = watch.lap_ms();

  sap::SapConfig config;
  config.m = flags.m;
  config.iterations = flags.iterations;
  config.alpha = flags.alpha;
  if (flags.stop_tolerance_set) config.stop_tolerance = flags.stop_tolerance;
  config.return_best = flags.return_best;

  const sap::SapResult result = sap::run_sap(secants, config);
  const double solve_ms = watch.lap_ms();

  const sap::ProjectionBasis& basis = result.selected(config.return_best);
  const sap::DataSet projected = sap::project(basis, data);

  const std::string basis_file = flags.output_prefix + ".basis.sec";
  const std::string projected_file = flags.output_prefix + ".projected.sec";
  const std::string results_file = flags.output_prefix + ".json";
  sap::io::save_matrix_binary(basis.columns, basis_file);
  sap::io::save_dataset(projected, projected_file);

  double best_norm = 0.0;
  for (const auto& rec : result.history) best_norm = std::max(best_norm, rec.min_norm);

  sap::io::ResultsDocument doc;
  doc.kind = "sap";
  doc.config["input"] = flags.input;
  doc.config["m"] = static_cast<std::int64_t>(flags.m);
  doc.config["iterations"] = flags.iterations;
  doc.config["alpha"] = flags.alpha;
  if (flags.threshold_set) doc.config["threshold"] = flags.threshold;
  if (flags.stop_tolerance_set) doc.config["stop_tolerance"] = flags.stop_tolerance;
  doc.config["return_best"] = flags.return_best;
  doc.outputs["points"] = static_cast<std::int64_t>(data.count());
  doc.outputs["ambient_dim"] = static_cast<std::int64_t>(data.dim());
  doc.outputs["secant_count"] = static_cast<std::int64_t>(secants.count());
  doc.outputs["dropped_degenerate"] = secants.dropped_degenerate;
  doc.outputs["dropped_short"] = secants.dropped_short;
  doc.outputs["iterations_run"] = result.iterations_run;
  doc.outputs["final_min_norm"] = result.history.back().min_norm;
  doc.outputs["best_min_norm"] = best_norm;
  doc.outputs["history_columns"] = Json::array({"iteration", "worst_secant", "min_norm"});
  doc.outputs["history"] = history_json(result.history);
  doc.outputs["basis_file"] = basis_file;
  doc.outputs["projected_file"] = projected_file;
  if (flags.common.timing) {
    doc.timing["secants_ms"] = secants_ms;
    doc.timing["solve_ms"] = solve_ms;
  }
  sap::io::write_results(doc, results_file);

  std::printf("final_min_norm=%.17g best_min_norm=%.17g iterations=%lld -> %s\n",
              result.history.back().min_norm, best_norm,
              static_cast<long long>(result.iterations_run), results_file.c_str());
  return 0;
}

// ---- sweep ----------------------------------------------------------------

struct SweepFlags {
  CommonFlags common;
  std::string input;
  std::string output_prefix;
  std::string dims = "1:10";
  std::int64_t iterations = 100;
  double alpha = 0.01;
  double threshold = -1.0;
  bool threshold_set = false;
  Index sample_size = 0;  // 0: sweep the full dataset
  std::int64_t runs = 1;
  std::uint64_t seed = 1;
};

int run_sweep_command(const SweepFlags& flags) {
  apply_common(flags.common);
  Stopwatch watch;
  const sap::DataSet data = sap::io::load_dataset(flags.input);
  const std::vector<Index> dims = parse_dims(flags.dims);
  const auto options = secant_options(flags.threshold, flags.threshold_set, flags.common);

  sap::SapConfig config;
  config.iterations = flags.iterations;
  config.alpha = flags.alpha;

  const std::string curve_file = flags.output_prefix + ".curve.csv";
  const std::string results_file = flags.output_prefix + ".json";

  sap::io::ResultsDocument doc;
  doc.kind = "sweep";
  doc.config["input"] = flags.input;
  doc.config["dims"] = flags.dims;
  doc.config["iterations"] = flags.iterations;
  doc.config["alpha"] = flags.alpha;
  if (flags.threshold_set) doc.config["threshold"] = flags.threshold;

  if (flags.sample_size > 0) {
    doc.config["sample_size"] = static_cast<std::int64_t>(flags.sample_size);
    doc.config["runs"] = flags.runs;
    doc.config["seed"] = flags.seed;
    const sap::analysis::RepeatedSweep repeated = sap::analysis::repeated_sample_sweep(
        data, flags.sample_size, flags.runs, dims, config, flags.seed, options);
    sap::io::save_curve_csv(repeated.curves, curve_file);
    doc.outputs["dims"] = index_array(repeated.dims);
    Json norms = Json::array();
    Json inits = Json::array();
    for (const auto& curve : repeated.curves) {
      norms.push_back(double_array(curve.min_norms));
      inits.push_back(double_array(curve.init_norms));
    }
    doc.outputs["min_norms_per_run"] = norms;
    doc.outputs["init_norms_per_run"] = inits;
    doc.outputs["mean_min_norms"] = double_array(repeated.mean);
    doc.outputs["spread_min_norms"] = double_array(repeated.spread);
    doc.outputs["curve_file"] = curve_file;
    std::printf("runs=%lld dims=%zu -> %s\n", static_cast<long long>(flags.runs), dims.size(),
                results_file.c_str());
  } else {
    const sap::analysis::DimensionCurve curve = sap::analysis::sweep(data, dims, config, options);
    sap::io::save_curve_csv({curve}, curve_file);
    doc.outputs["dims"] = index_array(curve.dims);
    doc.outputs["min_norms"] = double_array(curve.min_norms);
    doc.outputs["init_norms"] = double_array(curve.init_norms);
    doc.outputs["curve_file"] = curve_file;
    std::printf("dims=%zu -> %s\n", dims.size(), results_file.c_str());
  }
  if (flags.common.timing) doc.timing["total_ms"] = watch.lap_ms();
  sap::io::write_results(doc, results_file);
  return 0;
}

// ---- compare --------------------------------------------------------------

struct CompareFlags {
  CommonFlags common;
  std::string input;
  std::string output_prefix;
  Index m = 2;
  std::int64_t iterations = 100;
  double alpha = 0.01;
  double threshold = -1.0;
  bool threshold_set = false;
  bool return_best = false;
};

int run_compare_command(const CompareFlags& flags) {
  apply_common(flags.common);
  Stopwatch watch;
  const sap::DataSet data = sap::io::load_dataset(flags.input);
  sap::SapConfig config;
  config.iterations = flags.iterations;
  config.alpha = flags.alpha;
  config.return_best = flags.return_best;
  const sap::analysis::ProjectionComparison cmp = sap::analysis::compare_projections(
      data, flags.m, config, secant_options(flags.threshold, flags.threshold_set, flags.common));

  std::printf("naive %.17g\n", cmp.naive_norm);
  std::printf("pca   %.17g\n", cmp.pca_norm);
  std::printf("sap   %.17g\n", cmp.sap_norm);

  if (!flags.output_prefix.empty()) {
    sap::io::ResultsDocument doc;
    doc.kind = "compare";
    doc.config["input"] = flags.input;
    doc.config["m"] = static_cast<std::int64_t>(flags.m);
    doc.config["iterations"] = flags.iterations;
    doc.config["alpha"] = flags.alpha;
    if (flags.threshold_set) doc.config["threshold"] = flags.threshold;
    doc.config["return_best"] = flags.return_best;
    doc.outputs["naive_min_norm"] = cmp.naive_norm;
    doc.outputs["pca_min_norm"] = cmp.pca_norm;
    doc.outputs["sap_min_norm"] = cmp.sap_norm;
    doc.outputs["iterations_run"] = cmp.sap.iterations_run;
    doc.outputs["history_columns"] = Json::array({"iteration", "worst_secant", "min_norm"});
    doc.outputs["history"] = history_json(cmp.sap.history);
    if (flags.common.timing) doc.timing["total_ms"] = watch.lap_ms();
    sap::io::write_results(doc, flags.output_prefix + ".json");
  }
  return 0;
}

// ---- estimate-dim ---------------------------------------------------------

struct EstimateFlags {
  CommonFlags common;
  std::string curve_file;
  std::string input;
  std::string output_prefix;
  std::string dims = "1:10";
  std::int64_t iterations = 100;
  double alpha = 0.01;
  double threshold = -1.0;
  bool threshold_set = false;
  double jump_ratio = 2.0;
  double floor = 0.1;
};

// Rebuilds a curve from "dim,min_norm,run_id" rows, averaging across runs.
sap::analysis::DimensionCurve curve_from_csv(const std::string& path) {
  const sap::DataSet table = sap::io::load_csv(path, true);
  if (table.dim() < 2) {
    throw sap::IoError(path + ": expected columns dim,min_norm[,run_id]");
  }
  std::map<Index, std::pair<double, std::int64_t>> sums;
  for (Index r = 0; r < table.count(); ++r) {
    const auto dim = static_cast<Index>(table.points(r, 0));
    auto& slot = sums[dim];
    slot.first += table.points(r, 1);
    slot.second += 1;
  }
  sap::analysis::DimensionCurve curve;
  for (const auto& [dim, slot] : sums) {
    curve.dims.push_back(dim);
    curve.min_norms.push_back(slot.first / static_cast<double>(slot.second));
    curve.init_norms.push_back(0.0);
  }
  curve.set_meta("source", path);
  return curve;
}

int run_estimate_command(const EstimateFlags& flags) {
  apply_common(flags.common);
  sap::analysis::DimensionCurve curve;
  if (!flags.curve_file.empty()) {
    curve = curve_from_csv(flags.curve_file);
  } else {
    const sap::DataSet data = sap::io::load_dataset(flags.input);
    sap::SapConfig config;
    config.iterations = flags.iterations;
    config.alpha = flags.alpha;
    curve = sap::analysis::sweep(data, parse_dims(flags.dims), config,
                                 secant_options(flags.threshold, flags.threshold_set,
                                                flags.common));
  }
  const auto estimate = sap::analysis::estimate_dimension(curve, flags.jump_ratio, flags.floor);

  if (!flags.output_prefix.empty()) {
    sap::io::ResultsDocument doc;
    doc.kind = "estimate-dim";
    if (!flags.curve_file.empty()) {
      doc.config["curve"] = flags.curve_file;
    } else {
      doc.config["input"] = flags.input;
      doc.config["dims"] = flags.dims;
      doc.config["iterations"] = flags.iterations;
      doc.config["alpha"] = flags.alpha;
      if (flags.threshold_set) doc.config["threshold"] = flags.threshold;
    }
    doc.config["jump_ratio"] = flags.jump_ratio;
    doc.config["floor"] = flags.floor;
    doc.outputs["dims"] = index_array(curve.dims);
    doc.outputs["min_norms"] = double_array(curve.min_norms);
    doc.outputs["found"] = estimate.has_value();
    if (estimate) {
      doc.outputs["embedding_dim"] = static_cast<std::int64_t>(estimate->embedding_dim);
      doc.outputs["manifold_dim"] = static_cast<std::int64_t>(estimate->manifold_dim);
    }
    sap::io::write_results(doc, flags.output_prefix + ".json");
  }

  if (!estimate) {
    std::printf("not found\n");
    return 5;
  }
  std::printf("embedding_dim=%lld manifold_dim=%lld\n",
              static_cast<long long>(estimate->embedding_dim),
              static_cast<long long>(estimate->manifold_dim));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secant-avoidance projection: synthetic data, solver, sweeps, and "
               "dimension estimation"};
  app.require_subcommand(1);

  SynthFlags synth;
  CLI::App* synth_cmd = app.add_subcommand(
      "synth", "Generate a synthetic dataset (trig-moment, curve3d, torus, sphere3)");
  synth_cmd->add_option("generator", synth.generator,
                        "Generator: trig-moment | curve3d | torus | sphere3")
      ->required();
  synth_cmd->add_option("-o,--output", synth.output, "Output dataset (.csv = text, else binary)")
      ->required();
  synth_cmd->add_option("--count", synth.count, "Number of points")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "Sampling seed (also derives embedding seed)");
  auto* td = synth_cmd->add_option("--target-dim", synth.target_dim,
                                   "Embedding dimension for curve3d/torus/sphere3");
  synth_cmd->add_option("--big-radius,--R", synth.big_radius, "Torus: large radius");
  synth_cmd->add_option("--small-radius,--r", synth.small_radius, "Torus: small radius");
  synth_cmd->add_option("--noise-sigma", synth.noise_sigma,
                        "Std deviation of additive Gaussian noise (0 = none)");
  auto* ns = synth_cmd->add_option("--noise-seed", synth.noise_seed,
                                   "Noise seed (default: derived from --seed)");

  SapFlags sapf;
  CLI::App* sap_cmd =
      app.add_subcommand("sap", "Run the projection solver and write basis + projection");
  sap_cmd->add_option("-i,--input", sapf.input, "Input dataset (CSV or binary)")->required();
  sap_cmd->add_option("-o,--output", sapf.output_prefix,
                      "Output prefix (writes PREFIX.json, PREFIX.basis.sec, "
                      "PREFIX.projected.sec)")
      ->required();
  sap_cmd->add_option("--m", sapf.m, "Target projection dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  sap_cmd->add_option("--iterations", sapf.iterations, "Iteration budget")
      ->check(CLI::NonNegativeNumber);
  sap_cmd->add_option("--alpha", sapf.alpha, "Shift parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  auto* sap_thr = sap_cmd->add_option("--threshold", sapf.threshold,
                                      "Drop secants shorter than this before normalizing");
  auto* sap_stop = sap_cmd->add_option("--stop-tolerance", sapf.stop_tolerance,
                                       "Stop early when the best min-norm plateaus");
  sap_cmd->add_flag("--return-best", sapf.return_best,
                    "Project with the best-seen basis instead of the final one");

  SweepFlags sweep;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Run the solver across a range of target dimensions");
  sweep_cmd->add_option("-i,--input", sweep.input, "Input dataset (CSV or binary)")->required();
  sweep_cmd->add_option("-o,--output", sweep.output_prefix,
                        "Output prefix (writes PREFIX.json and PREFIX.curve.csv)")
      ->required();
  sweep_cmd->add_option("--dims", sweep.dims, "Dimension range LO:HI (or a single M)");
  sweep_cmd->add_option("--iterations", sweep.iterations, "Iteration budget per dimension")
      ->check(CLI::NonNegativeNumber);
  sweep_cmd->add_option("--alpha", sweep.alpha, "Shift parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  auto* sweep_thr = sweep_cmd->add_option("--threshold", sweep.threshold,
                                          "Drop secants shorter than this before normalizing");
  sweep_cmd->add_option("--sample-size", sweep.sample_size,
                        "Subsample this many points per run instead of sweeping the full set")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--runs", sweep.runs, "Number of subsample runs")
      ->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--seed", sweep.seed, "Base seed for subsampling");

  CompareFlags compare;
  CLI::App* compare_cmd = app.add_subcommand(
      "compare", "Min projected secant norm under naive, PCA, and solver bases");
  compare_cmd->add_option("-i,--input", compare.input, "Input dataset (CSV or binary)")
      ->required();
  compare_cmd->add_option("-o,--output", compare.output_prefix,
                          "Optional output prefix (writes PREFIX.json)");
  compare_cmd->add_option("--m", compare.m, "Target projection dimension")
      ->required()
      ->check(CLI::PositiveNumber);
  compare_cmd->add_option("--iterations", compare.iterations, "Iteration budget")
      ->check(CLI::NonNegativeNumber);
  compare_cmd->add_option("--alpha", compare.alpha, "Shift parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  auto* cmp_thr = compare_cmd->add_option("--threshold", compare.threshold,
                                          "Drop secants shorter than this before normalizing");
  compare_cmd->add_flag("--return-best", compare.return_best,
                        "Report the best-seen basis instead of the final one");

  EstimateFlags estimate;
  CLI::App* estimate_cmd = app.add_subcommand(
      "estimate-dim", "Read the embedding dimension off a min-norm curve");
  auto* est_curve =
      estimate_cmd->add_option("--curve", estimate.curve_file,
                               "Curve CSV (dim,min_norm,run_id); runs are averaged");
  auto* est_input = estimate_cmd->add_option("-i,--input", estimate.input,
                                             "Dataset to sweep when no curve is given");
  estimate_cmd->add_option("-o,--output", estimate.output_prefix,
                           "Optional output prefix (writes PREFIX.json)");
  estimate_cmd->add_option("--dims", estimate.dims, "Dimension range LO:HI for the sweep");
  estimate_cmd->add_option("--iterations", estimate.iterations, "Iteration budget per dimension")
      ->check(CLI::NonNegativeNumber);
  estimate_cmd->add_option("--alpha", estimate.alpha, "Shift parameter in [0,1]")
      ->check(CLI::Range(0.0, 1.0));
  auto* est_thr = estimate_cmd->add_option("--threshold", estimate.threshold,
                                           "Drop secants shorter than this before normalizing");
  estimate_cmd->add_option("--jump-ratio", estimate.jump_ratio,
                           "Required rise over the previous dimension's min-norm");
  estimate_cmd->add_option("--floor", estimate.floor, "Minimum acceptable min-norm");
  est_curve->excludes(est_input);

  add_common_flags(sap_cmd, sapf.common);
  add_common_flags(sweep_cmd, sweep.common);
  add_common_flags(compare_cmd, compare.common);
  add_common_flags(estimate_cmd, estimate.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  synth.target_dim_set = td->count() > 0;
  synth.noise_seed_set = ns->count() > 0;
  sapf.threshold_set = sap_thr->count() > 0;
  sapf.stop_tolerance_set = sap_stop->count() > 0;
  sweep.threshold_set = sweep_thr->count() > 0;
  compare.threshold_set = cmp_thr->count() > 0;
  estimate.threshold_set = est_thr->count() > 0;

  try {
    if (app.got_subcommand(synth_cmd)) return run_synth(synth);
    if (app.got_subcommand(sap_cmd)) return run_sap_command(sapf);
    if (app.got_subcommand(sweep_cmd)) return run_sweep_command(sweep);
    if (app.got_subcommand(compare_cmd)) return run_compare_command(compare);
    if (app.got_subcommand(estimate_cmd)) {
      if (estimate.curve_file.empty() && estimate.input.empty()) {
        throw sap::InvalidArgument("estimate-dim needs either --curve or --input");
      }
      return run_estimate_command(estimate);
    }
  } catch (const sap::InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const sap::IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const sap::NumericalFailure& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
