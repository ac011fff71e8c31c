// Command-line front end: phantom, acquire, reconstruct, sweep, report.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "lensless/admm.hpp"
#include "lensless/config.hpp"
#include "lensless/experiment.hpp"
#include "lensless/image_io.hpp"
#include "lensless/metrics.hpp"
#include "lensless/phantom.hpp"
#include "lensless/record_io.hpp"

namespace fs = std::filesystem;
using namespace lensless;

namespace {

// Shared overrides. Every flag wins over the matching config key.
struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<double> ratios;
  std::optional<std::string> bsnr;
  std::vector<std::string> modes;
  std::optional<std::string> out;
  std::optional<unsigned> threads;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Base seed");
    app->add_option("--trials", trials, "Trials per cell");
    app->add_option("--ratios", ratios, "M/N ratios, e.g. --ratios 0.1 0.5 1")->delimiter(',');
    app->add_option("--bsnr", bsnr, "Target BSNR in dB, or 'inf' for noiseless");
    app->add_option("--modes", modes, "Modes: focused, speckle:P")->delimiter(',');
    app->add_option("--out", out, "Output path");
    app->add_option("--threads", threads, "Worker threads (0 = all cores)");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!config_path.empty()) c = load_experiment_config(config_path);
    if (seed) c.base_seed = *seed;
    if (trials) c.trials = *trials;
    if (!ratios.empty()) c.ratios = ratios;
    if (bsnr) c.bsnr_db = *bsnr == "inf" ? kNoiselessBsnr : std::stod(*bsnr);
    if (!modes.empty()) {
      c.modes.clear();
      for (const auto& m : modes) c.modes.push_back(ModeSpec::parse(m));
    }
    if (out) c.output_dir = *out;
    if (threads) c.threads = *threads;
    c.validate();
    return c;
  }
};

int cmd_phantom(const CommonOptions& o) {
  const auto c = o.resolve();
  const fs::path path = o.out ? *o.out : "phantom.pgm";
  write_pgm(path, load_ground_truth(c));
  std::cout << "wrote " << path.string() << " (" << c.width << "x" << c.height << ")\n";
  return 0;
}

int cmd_acquire(const CommonOptions& o, const std::string& mode_text, double ratio, int trial,
                const std::string& kernel_dir) {
  auto c = o.resolve();
  const auto mode = ModeSpec::parse(mode_text);
  const auto seed = trial_seed(c.base_seed, mode, ratio, trial);
  const auto truth = load_ground_truth(c);
  const auto model = build_model(c, mode, ratio, seed);
  const auto record = acquire(truth, model, c.bsnr_db, RandomStream(seed).derive(200));
  const fs::path path = o.out ? *o.out : "record.llr";
  nlohmann::json provenance = {{"mode", mode.label()}, {"trial", trial}, {"trial_seed", seed},
                               {"config", to_json(c)}};
  save_record(path, record, provenance);
  if (!kernel_dir.empty()) {
    fs::create_directories(kernel_dir);
    for (std::size_t i = 0; i < record.model.kernels.size(); ++i) {
      write_kernel_raw(fs::path(kernel_dir) / ("kernel_" + std::to_string(i) + ".raw"), record.model.kernels[i]);
    }
  }
  std::cout << "wrote " << path.string() << ": M = " << record.y.size() << ", realized BSNR "
            << realized_bsnr(record) << " dB\n";
  return 0;
}

int cmd_reconstruct(const CommonOptions& o, const std::string& record_path, std::optional<double> rho,
                    const std::string& truth_path) {
  auto c = o.resolve();
  const auto loaded = load_record(record_path);
  const auto& record = loaded.record;
  RasterImage estimate;
  double chosen = 0.0;
  if (rho) {
    estimate = admm_reconstruct(record, *rho, c.solver).estimate;
    chosen = *rho;
  } else {
    const auto sel = select_rho(record, c.solver);
    estimate = sel.estimate;
    chosen = sel.rho;
  }
  const fs::path path = o.out ? *o.out : "estimate.pgm";
  write_pgm(path, estimate);
  std::cout << "rho " << chosen << ", wrote " << path.string() << "\n";
  if (!truth_path.empty()) {
    auto truth = rescale_unit(read_pgm(truth_path));
    std::cout << "SNR " << snr(estimate, truth) << " dB (window " << window_snr(estimate, truth, record.model.window)
              << " dB)\n";
  }
  return 0;
}

int cmd_sweep(const CommonOptions& o, bool images) {
  auto c = o.resolve();
  if (images) c.write_images = true;
  std::size_t done = 0;
  const std::size_t total = c.ratios.size() * c.modes.size() * static_cast<std::size_t>(c.trials);
  const auto result = run_sweep(c, [&](const ResultRow& r) {
    ++done;
    std::fprintf(stderr, "[%zu/%zu] %s P=%zu ratio=%.2f trial=%d  SNR %.2f dB  (%.1fs)\n", done, total,
                 r.mode.c_str(), r.patterns, r.requested_ratio, r.trial, r.snr_full_db, r.wall_time_s);
  });
  write_sweep_outputs(c, result);
  std::cout << "sweep: " << result.rows.size() << " rows, " << result.failures.size() << " failures, "
            << result.wall_time_s << " s; tables in " << c.output_dir << "\n";
  return result.failures.empty() ? 0 : 2;
}

int cmd_report(const std::string& results_path, const std::optional<std::string>& out) {
  const auto rows = read_results_table(results_path);
  const auto agg = aggregate(rows);
  const fs::path dir = out ? fs::path(*out) : fs::path(results_path).parent_path();
  if (!dir.empty()) fs::create_directories(dir);
  write_aggregate_table(dir / "aggregate.tsv", agg);
  write_curves_table(dir / "curves.tsv", agg);
  std::printf("%-12s %-6s %-8s %-6s %-10s %-10s\n", "mode", "P", "ratio", "n", "mean_snr", "std_snr");
  for (const auto& a : agg) {
    std::printf("%-12s %-6zu %-8.3f %-6zu %-10.3f %-10.3f\n", a.mode.c_str(), a.patterns, a.requested_ratio, a.count,
                a.mean_snr_db, a.std_snr_db);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lensless endoscope raster-scan vs compressive-sensing simulator"};
  app.require_subcommand(1);

  CommonOptions phantom_opts, acquire_opts, recon_opts, sweep_opts;

  auto* phantom = app.add_subcommand("phantom", "Write the ground-truth image as PGM");
  phantom_opts.attach(phantom);

  auto* acq = app.add_subcommand("acquire", "Simulate one acquisition and save the record");
  acquire_opts.attach(acq);
  std::string mode = "speckle:1";
  double ratio = 1.0;
  int trial = 0;
  std::string kernel_dir;
  acq->add_option("--mode", mode, "focused or speckle:P");
  acq->add_option("--ratio", ratio, "M/N ratio")->check(CLI::Range(0.0, 1.0));
  acq->add_option("--trial", trial, "Trial index (selects the derived seed)");
  acq->add_option("--kernels", kernel_dir, "Also write the kernels as raw files into this directory");

  auto* recon = app.add_subcommand("reconstruct", "Reconstruct an image from a saved record");
  recon_opts.attach(recon);
  std::string record_path, truth_path;
  std::optional<double> rho;
  recon->add_option("record", record_path, "Record file")->required()->check(CLI::ExistingFile);
  recon->add_option("--rho", rho, "Fixed rho (default: whiteness-based selection)");
  recon->add_option("--truth", truth_path, "Ground-truth PGM for SNR reporting")->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Run the full ratio x mode x trial experiment");
  sweep_opts.attach(sweep);
  bool images = false;
  sweep->add_flag("--images", images, "Write observation/estimate images for trial 0");

  auto* report = app.add_subcommand("report", "Aggregate a results table");
  std::string results_path;
  std::optional<std::string> report_out;
  report->add_option("results", results_path, "results.tsv from a sweep")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Directory for aggregate.tsv and curves.tsv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*phantom) return cmd_phantom(phantom_opts);
    if (*acq) return cmd_acquire(acquire_opts, mode, ratio, trial, kernel_dir);
    if (*recon) return cmd_reconstruct(recon_opts, record_path, rho, truth_path);
    if (*sweep) return cmd_sweep(sweep_opts, images);
    if (*report) return cmd_report(results_path, report_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
