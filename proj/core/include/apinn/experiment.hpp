#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "apinn/fdm.hpp"
#include "apinn/loss.hpp"
#include "apinn/metrics.hpp"
#include "apinn/network.hpp"
#include "apinn/optim.hpp"
#include "apinn/sampler.hpp"

namespace apinn {

inline constexpr const char* kLibraryVersion = "0.1.0";

// One experiment cell: problem x model plus every knob the pipelines read.
// Defaults reproduce the per-problem training point counts and the published
// hyperparameters (4 x 55 tanh network; 20k epochs on p1, 10k on p2/p3).
struct ExperimentConfig {
  std::string problem = "p1";
  std::string model = "apinn";  // pinn | apinn | fdm | sann

  MlpConfig network;        // outputs are derived from the model at run time
  TrainSchedule schedule;
  CollocationCounts counts;
  std::uint64_t sampling_seed = 0;
  std::string strategy = "uniform-random";
  LossWeights weights;
  std::string weight_mode = "adaptive";  // adaptive | fixed

  int eval_nx = 101;
  int eval_nt = 101;
  int fdm_nx = 11;
  double fdm_dt_factor = 0.25;

  std::uint64_t seed = 0;
  std::string out_dir = "out";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&);
};

ExperimentConfig default_config(const std::string& problem, const std::string& model);

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);

struct RunManifest {
  std::string config_json;
  std::string content_hash;  // content-addressed digest of config + version
  std::vector<std::uint64_t> seeds;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> artifacts;
  std::string library_version = kLibraryVersion;
};

std::string manifest_to_json(const RunManifest& manifest);
std::string content_hash(const std::string& payload);

// out/runs/<problem>/<model>[/seed<k>] — fdm runs carry no seed directory.
std::filesystem::path run_dir(const ExperimentConfig& config);

struct TrainOutcome {
  std::filesystem::path dir;
  Params params;
  TrainReport report;
};

// Trains pinn|apinn|sann and persists params.json, train_log.csv,
// report.json and manifest.json. Rejects non-trainable models (fdm).
TrainOutcome cmd_train(const ExperimentConfig& config);

// Builds a displacement sampler for a model: trained networks are loaded
// from their run directory, fdm solves its default grid on demand, and
// "gt" yields the exact solution.
FieldSampler model_sampler(const ExperimentConfig& config, const std::string& model);

// Evaluates one model on the eval grid; writes summary.csv (model, E2, E3,
// E4) and the dense e1_field.csv next to the run artifacts.
ErrorReport cmd_evaluate(const ExperimentConfig& config);

// Solution slice table at time t for the given models (plus the GT column),
// written to out/tables/. Values use fixed 6-decimal formatting, pointwise
// errors 3-significant scientific.
std::filesystem::path cmd_table(const ExperimentConfig& config, double t,
                                const std::vector<std::string>& models);

// Dense field export: prediction, ground truth and |error| grids as CSV
// (header row of x values, one row per time level).
std::vector<std::filesystem::path> cmd_export_field(const ExperimentConfig& config, int nx, int nt);

struct ReproduceOptions {
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  bool strict = false;
  bool fixed_weights = false;
  bool paper_lr = false;
  std::string out_dir = "out";
  // 0 keeps the per-problem default budgets; anything else rescales every
  // trainable cell (smoke runs of the full pipeline).
  int epochs_override = 0;
};

struct ReproduceResult {
  std::filesystem::path dir;
  int checks_failed = 0;
  int checks_total = 0;
};

// Full benchmark matrix {p1,p2,p3} x {pinn, apinn, fdm, sann}: trains every
// trainable cell per seed, evaluates on the shared grid, emits the slice
// tables, the global metric/loss summaries, and a PASS/FAIL sheet against
// the published accuracy bands.
ReproduceResult cmd_reproduce(const ReproduceOptions& options);

// CSV helpers shared by the commands (locale-independent formatting).
void write_train_log_csv(const std::filesystem::path& path,
                         const std::vector<LossBreakdown>& history);
void write_field_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                     const std::vector<double>& ts, const FieldSampler& field);

}  // namespace apinn
