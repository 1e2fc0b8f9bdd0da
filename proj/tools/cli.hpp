#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "odml/data.hpp"
#include "odml/eval.hpp"
#include "odml/optimizer.hpp"

namespace odml::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericalFailure = 3,
  kCheckFailure = 4,
};

struct PreprocessConfig {
  bool minmax = false;
  /// 0 keeps the original dimension.
  int pca_dim = 0;
  /// Oversample the training split.
  bool oversample = false;
};

struct SplitConfig {
  /// 0 trains and evaluates on the whole dataset.
  double test_fraction = 0.0;
  std::uint64_t seed = 0;
};

struct SweepConfig {
  std::vector<double> gamma_grid;
  std::vector<int> npv_grid;
};

struct ProxTestConfig {
  int trials = 1000;
  bool gamma_zero_only = false;
  std::uint64_t seed = 20170611;
};

struct TheoryConfig {
  double epsilon = 1e-5;
  int trace_trials = 500;
  int cond_trials = 1000;
  std::uint64_t seed = 7;
  /// Optional generalization-bound inputs; evaluated when present.
  nlohmann::json gen;
};

struct RunConfig {
  std::string command;
  std::string dataset_path;
  bool has_header = false;
  std::string output_dir = ".";
  std::string model_path;
  PreprocessConfig preprocess;
  SplitConfig split;
  TrainConfig train;
  EvalOptions eval;
  SynthSpec synth;
  SweepConfig sweep;
  ProxTestConfig prox_test;
  TheoryConfig theory;
};

/// Raised for malformed configuration or command lines (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunConfig parse_run_config(const nlohmann::json& j);
TrainConfig parse_train_config(const nlohmann::json& j);

/// Dataset loading, preprocessing and the deterministic train/test split
/// shared by train, eval and sweep.
std::pair<Dataset, Dataset> prepare_data(const RunConfig& config);

int cmd_synth(const RunConfig& config, std::ostream& out);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_eval(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_prox_test(const RunConfig& config, std::ostream& out);
int cmd_theory(const RunConfig& config, std::ostream& out);

/// Full command-line entry point: `odml <command> [--config f] [--seed n]
/// [--out dir] [--model f]`. Errors go to `err` as one JSON object.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace odml::cli
