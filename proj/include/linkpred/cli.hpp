#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "linkpred/net.hpp"

namespace linkpred::cli {

/// Everything a subcommand needs; filled from flags (and optionally a
/// manifest of an earlier run).
struct RunConfig {
  std::string subcommand;

  std::string input;
  Index n = 0;  // 0: infer from the edge list
  bool directed = false;
  std::string covariates;
  bool covariates_header = false;
  std::string mask;
  std::string truth;
  std::string scores;

  /// covariates | jaccard | fraction-match | file | oracle
  std::string similarity = "covariates";
  std::string similarity_file;
  std::string sigma = "auto";
  double truncate = 0.1;
  int q = 10;

  double lambda = 0.0;
  bool cv = false;
  std::string lambda_grid;  // comma separated; empty selects the default
  int cv_folds = 5;
  std::string cv_score = "sse";

  std::string method = "direct";
  double tol = 1e-6;
  int max_sweeps = 500;

  std::string model;
  double alpha = 0.5;
  double beta = 1.0;
  int reps = 1;
  int sbm_blocks = 2;
  double sbm_within = 0.5;
  double sbm_between = 0.1;
  bool save_instances = false;

  std::uint64_t seed = 0;
  std::string out = ".";
};

/// Failure inside a named processing stage ("input", "solve", ...).
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(stage) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Flat key=value record of a run, written sorted by key.
using Manifest = std::map<std::string, std::string>;

void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

/// Each returns 0 on success and throws StageError naming the failing stage.
int cmd_predict(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_evaluate(const RunConfig& config, std::ostream& log);
int cmd_tune(const RunConfig& config, std::ostream& log);

/// Parses arguments (args[0] is the subcommand), dispatches and converts
/// failures into a nonzero exit status with a message on `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace linkpred::cli
