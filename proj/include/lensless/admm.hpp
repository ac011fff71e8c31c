#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lensless/forward_model.hpp"
#include "lensless/grid.hpp"
#include "lensless/tv.hpp"

namespace lensless {

struct SolverConfig {
  /// Explicit candidate rho values (strictly increasing). When empty, a
  /// geometric grid of `rho_points` values between rho_min_factor and
  /// rho_max_factor times ||A^T y||_inf is used.
  std::vector<double> rho_grid;
  int rho_points = 12;
  double rho_min_factor = 1e-4;
  double rho_max_factor = 1.0;

  /// mu, in units of AcquisitionOperator::operator_gain(). Above
  /// rho = penalty_rho_ref * ||A^T y||_inf the penalty grows in proportion
  /// to rho; penalty_rho_ref = 0 keeps it fixed.
  double admm_penalty = 1.0;
  double penalty_rho_ref = 1e-2;
  int max_outer_iters = 300;
  double cg_tol = 1e-6;
  int cg_max_iters = 100;
  double convergence_tol = 1e-4;

  /// Warm-start each rho from the previous solution during the sweep.
  bool warm_start = true;
  /// Fourier-diagonal preconditioner for the inner CG (same fixed point).
  bool precondition = true;
  /// When non-empty, per-iteration diagnostics are written here as TSV.
  std::string diagnostics_path;

  void validate() const;
};

struct SolverHistory {
  std::vector<double> objective;
  std::vector<double> primal_residual;
  std::vector<double> dual_residual;
  std::vector<int> cg_iterations;
};

struct SolverState {
  RasterImage xbar;
  GradientField z;  // split variable for gradient(xbar)
  GradientField d;  // scaled dual
  SolverHistory history;
  double rho = 0.0;  // rho and effective mu the state was produced with
  double mu = 0.0;
};

struct AdmmResult {
  RasterImage estimate;  // xbar clamped to >= 0
  SolverState state;
  bool converged = false;
  int iterations = 0;
};

/// ||A x - y||^2 + rho * TV(x)
double objective(AcquisitionOperator& op, std::span<const double> y, const RasterImage& x, double rho);

/// Effective ADMM penalty for `rho`; `aty_max` is ||A^T y||_inf.
double effective_penalty(const AcquisitionOperator& op, double aty_max, double rho, const SolverConfig& config);
/// Minimizes ||A x - y||^2 + rho TV(x) with the splitting z = gradient(x).
/// A warm start's scaled dual is converted to the new rho and mu.
/// Throws NumericalFailure on non-finite iterates.
AdmmResult admm_reconstruct(const AcquisitionRecord& record, double rho, const SolverConfig& config);
AdmmResult admm_reconstruct(AcquisitionOperator& op, std::span<const double> y, double rho,
                            const SolverConfig& config, const SolverState* warm_start = nullptr);

/// Residual whiteness over 2-D lags |p|,|q| <= 3 (excluding 0,0) of the
/// mean-subtracted residual on its side x side window:
///   -sum (c(p,q) / c(0,0))^2
/// Higher is whiter; -infinity for a zero-variance residual.
double whiteness_score(std::span<const double> residual, std::size_t window_side);

struct RhoTrial {
  double rho = 0.0;
  double score = 0.0;
  int iterations = 0;
  bool converged = false;
  bool failed = false;
};

struct RhoSelection {
  double rho = 0.0;
  double score = 0.0;
  std::size_t index = 0;
  RasterImage estimate;
  int iterations = 0;
  std::vector<RhoTrial> trials;
};

/// Resolves config.rho_grid, deriving it from ||A^T y||_inf when empty.
std::vector<double> resolve_rho_grid(AcquisitionOperator& op, std::span<const double> y,
                                     const SolverConfig& config);

/// Runs ADMM over the rho grid (ascending) and keeps the estimate whose data
/// residual is whitest. Ties go to the smaller rho.
RhoSelection select_rho(const AcquisitionRecord& record, const SolverConfig& config);

}  // namespace lensless
