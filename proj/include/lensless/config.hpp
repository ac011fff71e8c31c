#pragma once

#include <filesystem>

#include <json.hpp>

#include "lensless/experiment.hpp"

namespace lensless {

/// Config files are JSON objects. Recognized keys (all optional):
///
///   image, phantom_seed, width, height, ratios, modes, bsnr ("inf" allowed),
///   trials, seed, pupil_radius, redraw_speckles, threads, out, write_images,
///   solver: { rho_grid, rho_points, rho_min_factor, rho_max_factor, mu, mu_rho_ref,
///             max_outer_iters, cg_tol, cg_max_iters, convergence_tol,
///             warm_start, precondition, diagnostics }
///
/// Unknown keys are rejected so typos surface immediately.
void apply_config(const nlohmann::json& j, ExperimentConfig& config);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace lensless
