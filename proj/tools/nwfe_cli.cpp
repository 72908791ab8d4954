// Command-line front end: data generation, fitting, evaluation, benchmarking
// and the streaming-versus-batch check.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 verification failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "nwfe/dataset.hpp"
#include "nwfe/error.hpp"
#include "nwfe/evaluation.hpp"
#include "nwfe/fit.hpp"
#include "nwfe/incremental.hpp"
#include "nwfe/log.hpp"
#include "nwfe/random.hpp"
#include "nwfe/report.hpp"
#include "nwfe/subspace.hpp"
#include "nwfe/synth.hpp"

using namespace nwfe;

namespace {

SynthSpec seeded_spec(const std::string& path, std::uint64_t seed) {
  auto spec = load_synth_spec(path);
  set_seed(spec, seed);
  return spec;
}

constexpr int kUsage = 1;
constexpr int kData = 2;
constexpr int kVerifyFailed = 3;

/// A flag combination or value that cannot work, detected before any data
/// processing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string input;
  std::string label_col;
  bool zscore = false;
};

void add_data_options(CLI::App* cmd, DataOptions& o, bool with_zscore = true) {
  cmd->add_option("-i,--input", o.input, "Dataset CSV with a header row")->required();
  cmd->add_option("--label-col", o.label_col, "Label column, by name or 0-based index (default: last column)");
  if (with_zscore) cmd->add_flag("--zscore", o.zscore, "Standardize every feature before use");
}

LabeledDataset load(const DataOptions& o) {
  LabelColumn col;
  if (!o.label_col.empty()) col = o.label_col;
  auto ds = load_csv(o.input, col);
  logger().info("loaded {}: {} samples, {} features, {} classes", o.input, ds.size(), ds.dim(), ds.num_classes());
  return o.zscore ? standardize(ds) : ds;
}

void check_dim(std::size_t dim, const LabeledDataset& ds) {
  if (dim < 1 || dim > ds.dim()) {
    throw UsageError(fmt::format("--dim {} is outside 1..{} for this dataset", dim, ds.dim()));
  }
}

void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw UsageError(fmt::format("--init-fraction {} must lie in (0, 1)", f));
}

void emit_json(const nlohmann::json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + out);
  f << j.dump(2) << '\n';
}

template <typename Report>
void emit_csv(const Report& r, const std::string& path) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
  write_csv(r, f);
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
  }
}

// gen ----------------------------------------------------------------------

struct GenOptions {
  std::string spec;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t classes = 0;
  std::size_t dim = 0;
  std::size_t per_class = 0;
};

int run_gen(const GenOptions& o) {
  SynthSpec spec;
  if (!o.spec.empty()) {
    spec = seeded_spec(o.spec, o.seed);
  } else {
    if (o.classes < 1 || o.dim < 1 || o.per_class < 1) {
      throw UsageError("without --spec, give --classes, --dim and --samples-per-class");
    }
    spec = random_gaussian_spec(o.classes, o.dim, o.per_class, o.seed);
  }
  const auto ds = generate(spec);
  if (o.out.empty()) {
    write_csv(ds, std::cout);
  } else {
    save_csv(ds, o.out);
    logger().info("wrote {} samples to {}", ds.size(), o.out);
  }
  return 0;
}

// fit ----------------------------------------------------------------------

struct FitOptions {
  DataOptions data;
  std::size_t dim = 0;
  std::string mode = "batch";
  std::optional<std::uint64_t> seed;
  double init_fraction = 0.2;
  std::string out;
  std::string snapshot;
  std::string resume;
};

/// Streams every row of `ds` into a restored state, matching classes by name.
void stream_into(IncrementalState& state, const LabeledDataset& ds) {
  int next = 0;
  for (std::size_t c = 0; c < state.num_classes(); ++c) next = std::max(next, state.class_label(int(c)) + 1);
  std::vector<int> label_of(ds.num_classes(), -1);
  for (std::size_t c = 0; c < ds.num_classes(); ++c) {
    const auto& names = state.class_names();
    const auto it = std::find(names.begin(), names.end(), ds.label_names()[c]);
    label_of[c] = it != names.end() ? state.class_label(int(it - names.begin())) : next++;
  }
  for (std::size_t a = 0; a < ds.size(); ++a) {
    const int c = ds.label(a);
    state.add_sample(ds.sample(a), label_of[static_cast<std::size_t>(c)], ds.label_names()[static_cast<std::size_t>(c)]);
  }
}

int run_fit(const FitOptions& o) {
  const Mode mode = parse_mode(o.mode);
  check_fraction(o.init_fraction);
  const auto ds = load(o.data);
  check_dim(o.dim, ds);

  Extractor ex;
  if (mode == Mode::Batch) {
    if (!o.snapshot.empty() || !o.resume.empty()) throw UsageError("--snapshot and --resume need --mode incremental");
    ex = fit_batch(ds, o.dim).extractor;
  } else {
    std::optional<IncrementalState> state;
    if (!o.resume.empty()) {
      state.emplace(IncrementalState::restore(read_json(o.resume)));
      if (state->dim() != ds.dim()) {
        throw Error(ErrorKind::DimensionMismatch, fmt::format("snapshot has {} features, input has {}",
                                                              state->dim(), ds.dim()));
      }
      stream_into(*state, ds);
    } else {
      if (!o.seed) throw UsageError("--mode incremental needs --seed for the arrival order");
      const auto plan = plan_stream(ds, o.init_fraction, mix_seed(*o.seed, 1));
      state.emplace(run_stream(ds, plan));
    }
    ex = extract(state->materialize(), o.dim, state->class_names());
    if (!o.snapshot.empty()) emit_json(state->snapshot(), o.snapshot);
  }
  emit_json(to_json(ex), o.out);
  return 0;
}

// cv / sweep ---------------------------------------------------------------

struct CvCliOptions {
  DataOptions data;
  std::size_t dim = 0;
  std::string mode = "batch";
  std::uint64_t seed = 0;
  double init_fraction = 0.2;
  unsigned jobs = 1;
  bool check = false;
  std::string out;
  std::string csv;
};

CvOptions to_cv_options(const CvCliOptions& o) {
  check_fraction(o.init_fraction);
  if (o.jobs < 1) throw UsageError("--jobs must be at least 1");
  CvOptions opts;
  opts.dim = o.dim;
  opts.mode = parse_mode(o.mode);
  opts.seed = o.seed;
  opts.init_fraction = o.init_fraction;
  opts.jobs = o.jobs;
  opts.check_convergence = o.check;
  return opts;
}

int run_cv(const CvCliOptions& o) {
  const auto opts = to_cv_options(o);
  const auto ds = load(o.data);
  check_dim(o.dim, ds);
  const auto r = tenfold_cv(ds, opts);
  emit_json(to_json(r), o.out);
  emit_csv(r, o.csv);
  return 0;
}

int run_sweep(const CvCliOptions& o) {
  const auto opts = to_cv_options(o);
  const auto ds = load(o.data);
  const auto r = dimension_sweep(ds, opts);
  emit_json(to_json(r), o.out);
  emit_csv(r, o.csv);
  return 0;
}

// curve --------------------------------------------------------------------

struct CurveOptions {
  DataOptions data;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::size_t stride = 10;
  double init_fraction = 0.2;
  std::string out;
  std::string csv;
};

int run_curve(const CurveOptions& o) {
  check_fraction(o.init_fraction);
  if (o.stride < 1) throw UsageError("--stride must be at least 1");
  const auto ds = load(o.data);
  check_dim(o.dim, ds);
  const auto c = learning_curve(ds, o.dim, o.seed, o.stride, o.init_fraction);
  emit_json(to_json(c), o.out);
  emit_csv(c, o.csv);
  return 0;
}

// bench --------------------------------------------------------------------

struct BenchOptions {
  std::string input;
  std::string label_col;
  std::string spec;
  std::uint64_t seed = 0;
  std::size_t chunk = 100;
  std::string out;
  std::string csv;
};

int run_bench(const BenchOptions& o) {
  if (o.input.empty() == o.spec.empty()) throw UsageError("give exactly one of --input and --spec");
  if (o.chunk < 1) throw UsageError("--chunk must be at least 1");
  const auto ds = o.input.empty() ? generate(seeded_spec(o.spec, o.seed))
                                  : load(DataOptions{o.input, o.label_col, false});
  if (ds.size() < 2 * o.chunk) {
    throw UsageError(fmt::format("{} samples is fewer than two chunks of {}", ds.size(), o.chunk));
  }
  const auto t = timing_benchmark(ds, o.chunk, o.seed);
  emit_json(to_json(t), o.out);
  emit_csv(t, o.csv);
  return 0;
}

// project ------------------------------------------------------------------

struct ProjectOptions {
  DataOptions data;
  std::string extractor;
  std::string out;
};

int run_project(const ProjectOptions& o) {
  const auto ex = extractor_from_json(read_json(o.extractor));
  const auto ds = load(o.data);
  const Matrix z = project(ex, ds.matrix());
  std::vector<Vector> rows;
  rows.reserve(ds.size());
  for (Eigen::Index r = 0; r < z.rows(); ++r) rows.emplace_back(z.row(r).transpose());
  const LabeledDataset projected(std::move(rows), {ds.labels().begin(), ds.labels().end()}, ds.label_names());
  if (o.out.empty()) {
    write_csv(projected, std::cout);
  } else {
    save_csv(projected, o.out);
  }
  return 0;
}

// verify -------------------------------------------------------------------

struct VerifyOptions {
  std::string input;
  std::string label_col;
  std::size_t classes = 3;
  std::size_t samples = 120;
  std::size_t dim = 5;
  std::uint64_t seed = 0;
  std::size_t check_every = 10;
  double tolerance = 1e-9;
};

int run_verify(const VerifyOptions& o) {
  LabeledDataset ds = [&] {
    if (!o.input.empty()) return load(DataOptions{o.input, o.label_col, false});
    if (o.classes < 2 || o.dim < 1 || o.samples < 2 * o.classes) {
      throw UsageError("need --classes >= 2, --dim >= 1 and --samples >= 2 * classes");
    }
    return random_labeled_dataset(o.samples, o.classes, o.dim, o.seed);
  }();
  const auto r = verify_against_batch(ds, o.seed, o.check_every);
  const double gap = std::max(r.max_between_gap, r.max_within_gap);
  auto j = to_json(r);
  j["max_gap"] = gap;
  j["tolerance"] = o.tolerance;
  j["pass"] = gap <= o.tolerance;
  std::cout << j.dump(2) << '\n';
  std::fprintf(stderr, "max relative Frobenius gap %.3e over %zu checks: %s\n", gap, r.checks,
               gap <= o.tolerance ? "ok" : "FAILED");
  return gap <= o.tolerance ? 0 : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric weighted feature extraction, batch and incremental"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset as CSV");
  gen_cmd->add_option("--spec", gen.spec, "Synthetic spec JSON (gaussian or mixture)");
  gen_cmd->add_option("--seed", gen.seed, "Random seed (overrides the spec's seed)")->required();
  gen_cmd->add_option("--classes", gen.classes, "Without --spec: number of classes");
  gen_cmd->add_option("--dim", gen.dim, "Without --spec: number of features");
  gen_cmd->add_option("--samples-per-class", gen.per_class, "Without --spec: samples per class");
  gen_cmd->add_option("-o,--out", gen.out, "Output CSV (default: stdout)");

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an extractor and write it as JSON");
  add_data_options(fit_cmd, fit.data, false);
  fit_cmd->add_option("-d,--dim", fit.dim, "Number of extracted features")->required();
  fit_cmd->add_option("--mode", fit.mode, "batch or incremental")->check(CLI::IsMember({"batch", "incremental"}));
  fit_cmd->add_option("--seed", fit.seed, "Arrival-order seed (incremental mode)");
  fit_cmd->add_option("--init-fraction", fit.init_fraction, "Share of each class used to initialize streaming");
  fit_cmd->add_option("--snapshot", fit.snapshot, "Incremental mode: save the final state as JSON");
  fit_cmd->add_option("--resume", fit.resume, "Incremental mode: restore a state and stream the input into it");
  fit_cmd->add_option("-o,--out", fit.out, "Extractor JSON (default: stdout)");

  CvCliOptions cv;
  auto* cv_cmd = app.add_subcommand("cv", "Tenfold cross-validation with 1-NN");
  CvCliOptions sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Cross-validate every dimension from 1 to min(p, 15)");
  for (auto [cmd, o] : {std::pair{cv_cmd, &cv}, std::pair{sweep_cmd, &sweep}}) {
    add_data_options(cmd, o->data);
    cmd->add_option("--mode", o->mode, "batch or incremental")->check(CLI::IsMember({"batch", "incremental"}));
    cmd->add_option("--seed", o->seed, "Seed for folds and arrival order")->required();
    cmd->add_option("--init-fraction", o->init_fraction, "Share of each class used to initialize streaming");
    cmd->add_option("--jobs", o->jobs, "Folds evaluated in parallel");
    cmd->add_flag("--check", o->check, "Incremental mode: also compare each fold with batch NWFE");
    cmd->add_option("-o,--out", o->out, "JSON report (default: stdout)");
    cmd->add_option("--csv", o->csv, "Also write a flat CSV report");
  }
  cv_cmd->add_option("-d,--dim", cv.dim, "Number of extracted features")->required();

  CurveOptions curve;
  auto* curve_cmd = app.add_subcommand("curve", "Accuracy on a held-out fold as samples stream in");
  add_data_options(curve_cmd, curve.data);
  curve_cmd->add_option("-d,--dim", curve.dim, "Number of extracted features")->required();
  curve_cmd->add_option("--seed", curve.seed, "Seed for the split and arrival order")->required();
  curve_cmd->add_option("--stride", curve.stride, "Arrivals between checkpoints (1: re-solve after every sample)");
  curve_cmd->add_option("--init-fraction", curve.init_fraction, "Share of each class used to initialize streaming");
  curve_cmd->add_option("-o,--out", curve.out, "JSON report (default: stdout)");
  curve_cmd->add_option("--csv", curve.csv, "Also write a flat CSV report");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time incremental updates against batch recomputation of S_b");
  bench_cmd->add_option("-i,--input", bench.input, "Dataset CSV");
  bench_cmd->add_option("--label-col", bench.label_col, "Label column, by name or 0-based index");
  bench_cmd->add_option("--spec", bench.spec, "Synthetic spec JSON instead of --input");
  bench_cmd->add_option("--seed", bench.seed, "Seed for the arrival order (and the synthetic draw)")->required();
  bench_cmd->add_option("--chunk", bench.chunk, "Samples per reported chunk");
  bench_cmd->add_option("-o,--out", bench.out, "JSON report (default: stdout)");
  bench_cmd->add_option("--csv", bench.csv, "Also write a flat CSV report");

  ProjectOptions proj;
  auto* project_cmd = app.add_subcommand("project", "Apply a saved extractor to a dataset");
  add_data_options(project_cmd, proj.data, false);
  project_cmd->add_option("--extractor", proj.extractor, "Extractor JSON written by fit")
      ->required();
  project_cmd->add_option("-o,--out", proj.out, "Projected CSV (default: stdout)");

  VerifyOptions verify;
  auto* verify_cmd = app.add_subcommand("verify", "Stream a dataset and compare with batch NWFE along the way");
  verify_cmd->add_option("-i,--input", verify.input, "Dataset CSV (default: a seeded random dataset)");
  verify_cmd->add_option("--label-col", verify.label_col, "Label column, by name or 0-based index");
  verify_cmd->add_option("--classes", verify.classes, "Random dataset: number of classes");
  verify_cmd->add_option("--samples", verify.samples, "Random dataset: number of samples");
  verify_cmd->add_option("-d,--dim", verify.dim, "Random dataset: number of features");
  verify_cmd->add_option("--seed", verify.seed, "Seed for the data and the arrival order")->required();
  verify_cmd->add_option("--check-every", verify.check_every, "Arrivals between comparisons (0: end only)");
  verify_cmd->add_option("--tolerance", verify.tolerance, "Largest accepted relative Frobenius gap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen_cmd) return run_gen(gen);
    if (*fit_cmd) return run_fit(fit);
    if (*cv_cmd) return run_cv(cv);
    if (*sweep_cmd) return run_sweep(sweep);
    if (*curve_cmd) return run_curve(curve);
    if (*bench_cmd) return run_bench(bench);
    if (*project_cmd) return run_project(proj);
    if (*verify_cmd) return run_verify(verify);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\nRun with --help for usage.\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
  return kUsage;
}
