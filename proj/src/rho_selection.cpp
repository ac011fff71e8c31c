#include "lensless/admm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lensless/errors.hpp"

namespace lensless {

double whiteness_score(std::span<const double> residual, std::size_t window_side) {
  if (window_side == 0 || residual.size() != window_side * window_side) {
    throw std::invalid_argument("whiteness_score: residual length must equal window_side^2");
  }
  const auto n = window_side;
  double mean = 0.0;
  for (double v : residual) mean += v;
  mean /= static_cast<double>(residual.size());
  std::vector<double> r(residual.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = residual[i] - mean;

  // Biased sample autocovariance over the overlapping region of each lag.
  auto autocov = [&](long p, long q) {
    double acc = 0.0;
    const long side = static_cast<long>(n);
    for (long row = std::max(0L, -p); row < std::min(side, side - p); ++row) {
      for (long col = std::max(0L, -q); col < std::min(side, side - q); ++col) {
        acc += r[static_cast<std::size_t>(row * side + col)] *
               r[static_cast<std::size_t>((row + p) * side + (col + q))];
      }
    }
    return acc / static_cast<double>(r.size());
  };

  const double c0 = autocov(0, 0);
  if (!(c0 > 0.0)) return -std::numeric_limits<double>::infinity();
  constexpr long kMaxLag = 3;
  double score = 0.0;
  for (long p = -kMaxLag; p <= kMaxLag; ++p) {
    for (long q = -kMaxLag; q <= kMaxLag; ++q) {
      if (p == 0 && q == 0) continue;
      const double rho = autocov(p, q) / c0;
      score -= rho * rho;
    }
  }
  return score;
}

std::vector<double> resolve_rho_grid(AcquisitionOperator& op, std::span<const double> y,
                                     const SolverConfig& config) {
  config.validate();
  if (!config.rho_grid.empty()) return config.rho_grid;
  const auto aty = op.adjoint(y);
  double scale = 0.0;
  for (double v : aty.values()) scale = std::max(scale, std::abs(v));
  if (!(scale > 0.0)) scale = 1.0;
  std::vector<double> grid(static_cast<std::size_t>(config.rho_points));
  const double lo = std::log(config.rho_min_factor * scale);
  const double hi = std::log(config.rho_max_factor * scale);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.size() == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(grid.size() - 1);
    grid[i] = std::exp(lo + t * (hi - lo));
  }
  return grid;
}

RhoSelection select_rho(const AcquisitionRecord& record, const SolverConfig& config) {
  AcquisitionOperator op(record.model);
  const auto grid = resolve_rho_grid(op, record.y, config);

  RhoSelection best;
  best.score = -std::numeric_limits<double>::infinity();
  bool have_best = false;
  std::optional<SolverState> previous;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double rho = grid[i];
    RhoTrial trial;
    trial.rho = rho;
    try {
      const SolverState* warm = nullptr;
      if (config.warm_start && previous) {
        previous->history = {};
        warm = &*previous;
      }
      auto run = admm_reconstruct(op, record.y, rho, config, warm);
      auto residual = op.forward(run.estimate);
      for (std::size_t k = 0; k < residual.size(); ++k) residual[k] -= record.y[k];
      trial.score = whiteness_score(residual, op.window_side());
      trial.iterations = run.iterations;
      trial.converged = run.converged;
      if (!have_best || trial.score > best.score) {
        have_best = true;
        best.rho = rho;
        best.score = trial.score;
        best.index = i;
        best.estimate = run.estimate;
        best.iterations = run.iterations;
      }
      previous = std::move(run.state);
    } catch (const NumericalFailure&) {
      trial.failed = true;
      trial.score = -std::numeric_limits<double>::infinity();
      previous.reset();
    }
    best.trials.push_back(trial);
  }
  if (!have_best) throw NumericalFailure("select_rho: every rho run failed", 0);
  return best;
}

}  // namespace lensless
