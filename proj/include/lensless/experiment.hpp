#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "lensless/admm.hpp"
#include "lensless/forward_model.hpp"
#include "lensless/grid.hpp"

namespace lensless {

enum class Illumination { kFocused, kSpeckle };

/// One acquisition mode: raster scan with the focused PSF (P = 1), or
/// random illumination with P speckle patterns.
struct ModeSpec {
  Illumination illumination = Illumination::kFocused;
  std::size_t patterns = 1;

  /// "focused" or "speckle".
  std::string name() const;
  /// "focused" or "speckle:P"; accepted back by parse().
  std::string label() const;
  static ModeSpec parse(const std::string& text);

  friend bool operator==(const ModeSpec&, const ModeSpec&) = default;
};

bool operator<(const ModeSpec& a, const ModeSpec& b);

struct ExperimentConfig {
  std::string image_path;  // empty: synthetic phantom
  std::uint64_t phantom_seed = 1;
  std::size_t width = 128;
  std::size_t height = 128;
  std::vector<double> ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<ModeSpec> modes = {{Illumination::kFocused, 1},
                                 {Illumination::kSpeckle, 1},
                                 {Illumination::kSpeckle, 2},
                                 {Illumination::kSpeckle, 4}};
  double bsnr_db = 40.0;
  int trials = 20;
  std::uint64_t base_seed = 2019;
  double pupil_radius = 0.15;
  /// Draw new speckle patterns for every trial (otherwise fixed per P).
  bool redraw_speckles = true;
  /// Worker threads for the sweep; 0 = hardware concurrency.
  unsigned threads = 0;
  SolverConfig solver;
  std::string output_dir = "out";
  /// Also write ground truth / observation / estimate images for trial 0.
  bool write_images = false;

  ImageGrid grid() const { return ImageGrid(width, height); }
  void validate() const;
};

struct ResultRow {
  std::string mode;
  std::size_t patterns = 1;
  double requested_ratio = 0.0;
  double achieved_ratio = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double snr_full_db = 0.0;
  double snr_window_db = 0.0;
  double bsnr_db = 0.0;
  double wall_time_s = 0.0;
  int iterations = 0;
};

struct CellFailure {
  std::string mode;
  std::size_t patterns = 1;
  double requested_ratio = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct AggregateRow {
  std::string mode;
  std::size_t patterns = 1;
  double requested_ratio = 0.0;
  double achieved_ratio = 0.0;
  std::size_t count = 0;
  double mean_snr_db = 0.0;
  double std_snr_db = 0.0;  // sample standard deviation (n - 1); 0 for n = 1
  double mean_window_snr_db = 0.0;
  double mean_bsnr_db = 0.0;
};

struct CellOutcome {
  ResultRow row;
  AcquisitionRecord record;
  RasterImage estimate;
};

/// Trial-0 observation and estimate of one cell, kept for figure output.
struct CellSnapshot {
  ModeSpec mode;
  double requested_ratio = 0.0;
  RasterImage observation;
  RasterImage estimate;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<CellSnapshot> snapshots;  // filled when config.write_images
  std::vector<CellFailure> failures;
  std::vector<AggregateRow> aggregates;
  double wall_time_s = 0.0;
};

/// base XOR splitmix64(fnv1a64("<mode label>|<ratio %.6f>|<trial>"))
std::uint64_t trial_seed(std::uint64_t base, const ModeSpec& mode, double ratio, int trial);

/// Ground truth per config: the phantom, or the image file rescaled to [0, 1].
RasterImage load_ground_truth(const ExperimentConfig& config);

/// Kernels, partition and window for one trial.
AcquisitionModel build_model(const ExperimentConfig& config, const ModeSpec& mode, double ratio,
                             std::uint64_t seed);

CellOutcome run_cell(const RasterImage& truth, const ExperimentConfig& config, const ModeSpec& mode,
                     double ratio, int trial);

using RowCallback = std::function<void(const ResultRow&)>;

/// Runs every (mode, ratio, trial) cell. Failed cells are recorded and skipped.
/// Rows come back sorted by (mode, ratio, trial) regardless of execution order.
SweepResult run_sweep(const ExperimentConfig& config, const RowCallback& on_row = {});

std::vector<AggregateRow> aggregate(const std::vector<ResultRow>& rows);
void sort_rows(std::vector<ResultRow>& rows);

/// Tab-separated tables. The results table has every ResultRow column except
/// wall_time_s so that it is byte-reproducible; timings go to a sidecar.
void write_results_table(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_timings_table(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_table(const std::filesystem::path& path);
void write_failures_table(const std::filesystem::path& path, const std::vector<CellFailure>& failures);
void write_aggregate_table(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);
/// Wide, plot-ready table: one line per ratio; mean and std per mode.
void write_curves_table(const std::filesystem::path& path, const std::vector<AggregateRow>& rows);

/// Writes results/timings/failures/aggregate/curves tables into config.output_dir.
void write_sweep_outputs(const ExperimentConfig& config, const SweepResult& result);

/// Observation vector placed back on the full grid (zero outside the window).
RasterImage observation_image(const AcquisitionRecord& record);

/// Two-row panel: observations on top, estimates below, one column per entry.
/// Every tile is rescaled to [0, 1] independently.
RasterImage compose_panel(const std::vector<RasterImage>& top, const std::vector<RasterImage>& bottom);

}  // namespace lensless
