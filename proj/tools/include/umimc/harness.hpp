// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "umimc/elliptic_model.hpp"
#include "umimc/estimators.hpp"
#include "umimc/mimc.hpp"
#include "umimc/model.hpp"
#include "umimc/spde_model.hpp"

namespace umimc::harness {

inline constexpr int kSchemaVersion = 1;

enum class ModelType { Synthetic, Elliptic, Spde };

struct SyntheticSettings {
  std::vector<double> rates{2.0};
  double noise = 0.0;
  double scale_noise = 0.0;
};

struct EstimatorSettings {
  EstimatorKind kind = EstimatorKind::DiagonalIndependent;
  int cap = 3;
  /// Ratio of the diagonal geometric law used until the first refresh.
  double initial_ratio = 0.35355339059327373;  // 2^{-3/2}
  bool adapt = true;
  std::uint64_t min_shell_hits = 50;
  std::uint64_t refresh_divisor = 20;
};

struct ReferenceSettings {
  /// "exact", "quadrature", "monte_carlo" or "importance_sampling"; empty picks
  /// the model default.
  std::string method;
  std::uint64_t samples = 100000;
  int order = 6;
  /// Resolution of the reference; empty means the model default.
  std::optional<MultiIndex> alpha;
};

struct ExperimentConfig {
  ModelType model = ModelType::Synthetic;
  SyntheticSettings synthetic;
  EllipticConfig elliptic;
  SpdeConfig spde;
  /// Seed of the synthetic SPDE data set.
  std::uint64_t data_seed = 2024;
  /// Optional observation file produced by generate-data.
  std::string data_file;

  EstimatorSettings estimator;
  MimcConfig mimc;
  std::vector<std::string> methods{"umimc"};
  double budget = 1e4;
  int reps = 1;
  std::uint64_t seed = 1;
  std::size_t calibration_pilot = 50;
  ReferenceSettings reference;
  std::string reference_file;
  int grid_points = 20;
  bool wall_clock = false;
  std::string out_dir = ".";

  void validate() const;
};

/// Parses a configuration document; unknown keys and schema mismatches throw.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON echo of a configuration (every field, defaults included).
nlohmann::json to_json(const ExperimentConfig& config);

std::unique_ptr<Model> make_model(const ExperimentConfig& config);
/// Observations for the SPDE model: the data file if configured, otherwise
/// generated from data_seed.
SpdeObservations load_or_generate_observations(const ExperimentConfig& config);

/// Scalar summary of a model output vector (the smoothing ratio for SPDE).
double scalar_output(const ExperimentConfig& config, const std::vector<double>& value);

struct ReferenceValue {
  double value = 0.0;
  double std_error = 0.0;
  std::string method;
  std::uint64_t samples = 0;
};
ReferenceValue compute_reference(const ExperimentConfig& config);
ReferenceValue read_reference(const std::filesystem::path& path);

struct TrajectoryRecord {
  std::string method;
  int rep = 0;
  std::uint64_t step = 0;
  double cost = 0.0;
  double estimate = 0.0;
  double wall_seconds = 0.0;
};

/// All repetitions of one method, in repetition order. Repetition r draws from
/// RandomStream(seed).split(r); repetitions run on a thread pool.
std::vector<TrajectoryRecord> run_method(const ExperimentConfig& config, const std::string& method);

struct CurvePoint {
  std::string method;
  double cost = 0.0;
  double rmse = 0.0;
  double std_error = 0.0;
};

/// Root-mean-square error over repetitions on a geometric cost grid, each
/// repetition contributing its last estimate at or below the grid cost.
std::vector<CurvePoint> rmse_curves(const std::vector<TrajectoryRecord>& records, double reference,
                                    int grid_points);

/// Last estimate of repetition `rep` at or below `cost`, if any.
std::optional<double> estimate_at(const std::vector<TrajectoryRecord>& records, int rep,
                                  double cost);

std::vector<TrajectoryRecord> read_trajectories(const std::filesystem::path& path);

// Subcommands. Each writes its files into `out` and returns the paths written.
std::vector<std::filesystem::path> cmd_generate_data(const ExperimentConfig& config,
                                                     const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_calibrate(const ExperimentConfig& config,
                                                 const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_reference(const ExperimentConfig& config,
                                                 const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_run(const ExperimentConfig& config,
                                           const std::filesystem::path& out);
std::vector<std::filesystem::path> cmd_compare(const ExperimentConfig& config,
                                               const std::filesystem::path& out);

// Output formatting shared by the subcommands.
std::string format_number(double x);
/// JSON text with every floating-point value printed to 17 significant digits.
std::string dump_json(const nlohmann::json& doc, int indent = 2);
/// Writes through a temporary file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& content);

}  // namespace umimc::harness
