#include "lensless/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "lensless/forward_model.hpp"

namespace lensless {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
  }
}

double read_db(const nlohmann::json& j) {
  if (j.is_string() && j.get<std::string>() == "inf") return kNoiselessBsnr;
  return j.get<double>();
}

void apply_solver(const nlohmann::json& j, SolverConfig& s) {
  reject_unknown(j,
                 {"rho_grid", "rho_points", "rho_min_factor", "rho_max_factor", "mu", "mu_rho_ref", "max_outer_iters",
                  "cg_tol", "cg_max_iters", "convergence_tol", "warm_start", "precondition", "diagnostics"},
                 "solver");
  if (j.contains("rho_grid")) s.rho_grid = j["rho_grid"].get<std::vector<double>>();
  if (j.contains("rho_points")) s.rho_points = j["rho_points"].get<int>();
  if (j.contains("rho_min_factor")) s.rho_min_factor = j["rho_min_factor"].get<double>();
  if (j.contains("rho_max_factor")) s.rho_max_factor = j["rho_max_factor"].get<double>();
  if (j.contains("mu")) s.admm_penalty = j["mu"].get<double>();
  if (j.contains("mu_rho_ref")) s.penalty_rho_ref = j["mu_rho_ref"].get<double>();
  if (j.contains("max_outer_iters")) s.max_outer_iters = j["max_outer_iters"].get<int>();
  if (j.contains("cg_tol")) s.cg_tol = j["cg_tol"].get<double>();
  if (j.contains("cg_max_iters")) s.cg_max_iters = j["cg_max_iters"].get<int>();
  if (j.contains("convergence_tol")) s.convergence_tol = j["convergence_tol"].get<double>();
  if (j.contains("warm_start")) s.warm_start = j["warm_start"].get<bool>();
  if (j.contains("precondition")) s.precondition = j["precondition"].get<bool>();
  if (j.contains("diagnostics")) s.diagnostics_path = j["diagnostics"].get<std::string>();
}

}  // namespace

void apply_config(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j,
                 {"image", "phantom_seed", "width", "height", "ratios", "modes", "bsnr", "trials", "seed",
                  "pupil_radius", "redraw_speckles", "threads", "out", "write_images", "solver"},
                 "top level");
  if (j.contains("image")) c.image_path = j["image"].get<std::string>();
  if (j.contains("phantom_seed")) c.phantom_seed = j["phantom_seed"].get<std::uint64_t>();
  if (j.contains("width")) c.width = j["width"].get<std::size_t>();
  if (j.contains("height")) c.height = j["height"].get<std::size_t>();
  if (j.contains("ratios")) c.ratios = j["ratios"].get<std::vector<double>>();
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j["modes"]) c.modes.push_back(ModeSpec::parse(m.get<std::string>()));
  }
  if (j.contains("bsnr")) c.bsnr_db = read_db(j["bsnr"]);
  if (j.contains("trials")) c.trials = j["trials"].get<int>();
  if (j.contains("seed")) c.base_seed = j["seed"].get<std::uint64_t>();
  if (j.contains("pupil_radius")) c.pupil_radius = j["pupil_radius"].get<double>();
  if (j.contains("redraw_speckles")) c.redraw_speckles = j["redraw_speckles"].get<bool>();
  if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
  if (j.contains("out")) c.output_dir = j["out"].get<std::string>();
  if (j.contains("write_images")) c.write_images = j["write_images"].get<bool>();
  if (j.contains("solver")) apply_solver(j["solver"], c.solver);
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  ExperimentConfig config;
  apply_config(nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true), config);
  return config;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json modes = nlohmann::json::array();
  for (const auto& m : c.modes) modes.push_back(m.label());
  nlohmann::json solver = {{"rho_points", c.solver.rho_points},
                           {"rho_min_factor", c.solver.rho_min_factor},
                           {"rho_max_factor", c.solver.rho_max_factor},
                           {"mu", c.solver.admm_penalty},
                           {"mu_rho_ref", c.solver.penalty_rho_ref},
                           {"max_outer_iters", c.solver.max_outer_iters},
                           {"cg_tol", c.solver.cg_tol},
                           {"cg_max_iters", c.solver.cg_max_iters},
                           {"convergence_tol", c.solver.convergence_tol},
                           {"warm_start", c.solver.warm_start},
                           {"precondition", c.solver.precondition}};
  if (!c.solver.rho_grid.empty()) solver["rho_grid"] = c.solver.rho_grid;
  nlohmann::json j = {{"image", c.image_path},
                      {"phantom_seed", c.phantom_seed},
                      {"width", c.width},
                      {"height", c.height},
                      {"ratios", c.ratios},
                      {"modes", modes},
                      {"trials", c.trials},
                      {"seed", c.base_seed},
                      {"pupil_radius", c.pupil_radius},
                      {"redraw_speckles", c.redraw_speckles},
                      {"out", c.output_dir},
                      {"write_images", c.write_images},
                      {"solver", solver}};
  if (std::isinf(c.bsnr_db)) j["bsnr"] = "inf";
  else j["bsnr"] = c.bsnr_db;
  return j;
}

}  // namespace lensless
