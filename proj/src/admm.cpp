#include "lensless/admm.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "lensless/cg.hpp"
#include "lensless/errors.hpp"

namespace lensless {

void SolverConfig::validate() const {
  if (!(admm_penalty > 0.0)) throw std::invalid_argument("SolverConfig: admm_penalty must be > 0");
  if (!(cg_tol > 0.0)) throw std::invalid_argument("SolverConfig: cg_tol must be > 0");
  if (!(penalty_rho_ref >= 0.0)) throw std::invalid_argument("SolverConfig: penalty_rho_ref must be >= 0");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("SolverConfig: convergence_tol must be > 0");
  if (max_outer_iters < 1) throw std::invalid_argument("SolverConfig: max_outer_iters must be >= 1");
  if (cg_max_iters < 1) throw std::invalid_argument("SolverConfig: cg_max_iters must be >= 1");
  if (rho_grid.empty()) {
    if (rho_points < 1) throw std::invalid_argument("SolverConfig: rho_points must be >= 1");
    if (!(rho_min_factor > 0.0) || !(rho_max_factor >= rho_min_factor) ||
        (rho_points > 1 && !(rho_max_factor > rho_min_factor))) {
      throw std::invalid_argument("SolverConfig: rho factors must satisfy 0 < min < max");
    }
  } else {
    for (std::size_t i = 0; i < rho_grid.size(); ++i) {
      if (!(rho_grid[i] > 0.0)) throw std::invalid_argument("SolverConfig: rho values must be > 0");
      if (i > 0 && !(rho_grid[i] > rho_grid[i - 1])) {
        throw std::invalid_argument("SolverConfig: rho_grid must be strictly increasing");
      }
    }
  }
}

double objective(AcquisitionOperator& op, std::span<const double> y, const RasterImage& x, double rho) {
  const auto ax = op.forward(x);
  double fit = 0.0;
  for (std::size_t k = 0; k < ax.size(); ++k) {
    const double e = ax[k] - y[k];
    fit += e * e;
  }
  return fit + rho * tv_norm(x);
}

double effective_penalty(const AcquisitionOperator& op, double aty_max, double rho, const SolverConfig& config) {
  double mu = config.admm_penalty * op.operator_gain();
  if (config.penalty_rho_ref > 0.0 && aty_max > 0.0) {
    mu *= std::max(1.0, rho / (config.penalty_rho_ref * aty_max));
  }
  return mu;
}

namespace {

// Inverse of  w * mean|h|^2 + mu * |periodic Laplacian|, with w = M / N.
class FourierPreconditioner {
 public:
  FourierPreconditioner(AcquisitionOperator& op, double mu) : op_(op), inv_(op.fft().spectrum_size()) {
    const auto& grid = op.grid();
    const auto h = grid.height();
    const auto half = grid.width() / 2 + 1;
    const double w = static_cast<double>(op.observed_count()) / static_cast<double>(grid.size());
    const auto& power = op.mean_power_transfer();
    for (std::size_t r = 0; r < h; ++r) {
      const double sy = std::sin(std::numbers::pi * static_cast<double>(r) / static_cast<double>(h));
      for (std::size_t c = 0; c < half; ++c) {
        const double sx = std::sin(std::numbers::pi * static_cast<double>(c) / static_cast<double>(grid.width()));
        const auto i = r * half + c;
        const double diag = w * power[i] + mu * 4.0 * (sx * sx + sy * sy);
        inv_[i] = diag > 0.0 ? 1.0 / diag : 0.0;
      }
    }
    spec_.resize(inv_.size());
  }

  RasterImage operator()(const RasterImage& r) {
    op_.fft().forward(r.values(), spec_);
    for (std::size_t i = 0; i < spec_.size(); ++i) spec_[i] *= inv_[i];
    RasterImage out(r.grid());
    op_.fft().inverse(spec_, out.values());
    return out;
  }

 private:
  AcquisitionOperator& op_;
  std::vector<double> inv_;
  std::vector<std::complex<double>> spec_;
};

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void write_diagnostics(const std::string& path, double rho, const SolverHistory& h) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open diagnostics file " + path);
  out.precision(17);
  if (fresh) out << "rho\titeration\tobjective\tprimal_residual\tdual_residual\n";
  for (std::size_t k = 0; k < h.objective.size(); ++k) {
    out << rho << '\t' << k + 1 << '\t' << h.objective[k] << '\t' << h.primal_residual[k] << '\t'
        << h.dual_residual[k] << '\n';
  }
}

}  // namespace

AdmmResult admm_reconstruct(AcquisitionOperator& op, std::span<const double> y, double rho,
                            const SolverConfig& config, const SolverState* warm_start) {
  config.validate();
  if (!(rho > 0.0)) throw std::invalid_argument("admm_reconstruct: rho must be > 0");
  if (y.size() != op.observed_count()) throw std::invalid_argument("admm_reconstruct: y length mismatch");
  if (!all_finite(y)) throw std::invalid_argument("admm_reconstruct: observations contain non-finite values");

  const auto& grid = op.grid();
  const auto aty = op.adjoint(y);
  double aty_max = 0.0;
  for (double v : aty.values()) aty_max = std::max(aty_max, std::abs(v));
  const double mu = effective_penalty(op, aty_max, rho, config);
  const double tau = rho / (2.0 * mu);
  const double tol = config.convergence_tol * std::sqrt(static_cast<double>(grid.size()));

  AdmmResult result;
  auto& state = result.state;
  if (warm_start != nullptr) {
    state.xbar = warm_start->xbar;
    state.z = warm_start->z;
    state.d = warm_start->d;
    // d carries units of rho / mu.
    if (warm_start->rho > 0.0 && warm_start->mu > 0.0) {
      const double s = (rho / warm_start->rho) * (warm_start->mu / mu);
      for (auto& v : state.d.gx) v *= s;
      for (auto& v : state.d.gy) v *= s;
    }
  } else {
    state.xbar = RasterImage(grid);
    state.z = GradientField(grid);
    state.d = GradientField(grid);
  }
  state.rho = rho;
  state.mu = mu;

  const ImageOperator system = [&](const RasterImage& x) {
    auto out = op.normal(x);
    const auto lap = divergence(gradient(x));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= mu * lap[i];
    return out;
  };
  ImageOperator precond;
  std::optional<FourierPreconditioner> fourier;
  if (config.precondition) {
    fourier.emplace(op, mu);
    precond = [&](const RasterImage& r) { return (*fourier)(r); };
  }
  CgOptions cg_options;
  cg_options.tol = config.cg_tol;
  cg_options.max_iters = config.cg_max_iters;

  GradientField shifted(grid);
  for (int k = 0; k < config.max_outer_iters; ++k) {
    // x-update: (A^T A + mu D^T D) x = A^T y + mu D^T (z - d)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      shifted.gx[i] = state.z.gx[i] - state.d.gx[i];
      shifted.gy[i] = state.z.gy[i] - state.d.gy[i];
    }
    auto rhs = divergence(shifted);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = aty[i] - mu * rhs[i];
    auto cg = cg_solve(system, rhs, cg_options, state.xbar, precond);
    state.xbar = std::move(cg.x);
    if (!all_finite(state.xbar.values())) throw NumericalFailure("admm: non-finite estimate", k);

    // z-update: group shrinkage of gradient(x) + d
    const auto gx = gradient(state.xbar);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      shifted.gx[i] = gx.gx[i] + state.d.gx[i];
      shifted.gy[i] = gx.gy[i] + state.d.gy[i];
    }
    auto z_next = group_soft_threshold(shifted, tau);

    // dual update and residuals
    double primal_sq = 0.0;
    GradientField dz(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double rx = gx.gx[i] - z_next.gx[i];
      const double ry = gx.gy[i] - z_next.gy[i];
      state.d.gx[i] += rx;
      state.d.gy[i] += ry;
      primal_sq += rx * rx + ry * ry;
      dz.gx[i] = z_next.gx[i] - state.z.gx[i];
      dz.gy[i] = z_next.gy[i] - state.z.gy[i];
    }
    state.z = std::move(z_next);
    const double primal = std::sqrt(primal_sq);
    const double dual = 2.0 * mu * norm2(divergence(dz).values());
    const double obj = objective(op, y, state.xbar, rho);
    if (!std::isfinite(primal) || !std::isfinite(dual) || !std::isfinite(obj)) {
      throw NumericalFailure("admm: non-finite residual", k);
    }
    state.history.objective.push_back(obj);
    state.history.primal_residual.push_back(primal);
    state.history.dual_residual.push_back(dual);
    state.history.cg_iterations.push_back(cg.iterations);
    result.iterations = k + 1;
    if (primal < tol && dual < tol) {
      result.converged = true;
      break;
    }
  }

  result.estimate = state.xbar;
  for (double& v : result.estimate.values()) v = std::max(v, 0.0);
  if (!config.diagnostics_path.empty()) write_diagnostics(config.diagnostics_path, rho, state.history);
  return result;
}

AdmmResult admm_reconstruct(const AcquisitionRecord& record, double rho, const SolverConfig& config) {
  AcquisitionOperator op(record.model);
  return admm_reconstruct(op, record.y, rho, config);
}

}  // namespace lensless
