#include "lensless/cg.hpp"

#include <cmath>
#include <stdexcept>

#include "lensless/errors.hpp"
#include "lensless/random.hpp"

namespace lensless {

namespace {

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

void require_symmetric(const ImageOperator& op, const ImageGrid& grid, std::uint64_t seed) {
  RandomStream rng(seed);
  RasterImage u(grid), v(grid);
  for (auto& x : u.values()) x = rng.normal();
  for (auto& x : v.values()) x = rng.normal();
  const auto au = op(u);
  const auto av = op(v);
  const double lhs = dot(au.values(), v.values());
  const double rhs = dot(u.values(), av.values());
  const double scale = norm2(au.values()) * norm2(v.values()) + norm2(u.values()) * norm2(av.values());
  if (std::abs(lhs - rhs) > 1e-8 * scale) {
    throw ContractViolation("cg_solve: operator is not self-adjoint");
  }
}

}  // namespace

CgResult cg_solve(const ImageOperator& op, const RasterImage& b, const CgOptions& options,
                  std::optional<RasterImage> initial, const ImageOperator& preconditioner) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("cg_solve: tol must be > 0");
  if (options.max_iters < 0) throw std::invalid_argument("cg_solve: max_iters must be >= 0");
  const auto& grid = b.grid();
  if (options.check_symmetry) require_symmetric(op, grid, options.symmetry_seed);

  CgResult result;
  result.x = initial ? std::move(*initial) : RasterImage(grid);
  if (!(result.x.grid() == grid)) throw std::invalid_argument("cg_solve: initial guess grid mismatch");

  const double b_norm = norm2(b.values());
  if (b_norm == 0.0 && !initial) {
    result.converged = true;
    return result;
  }
  const double target = options.tol * b_norm;

  RasterImage r = b;
  {
    const auto ax = op(result.x);
    axpy(-1.0, ax.values(), r.values());
  }
  double r_norm = norm2(r.values());
  auto denom = [&](double v) { return b_norm > 0.0 ? v / b_norm : v; };
  result.relative_residual = denom(r_norm);
  if (r_norm <= target) {
    result.converged = true;
    return result;
  }

  RasterImage z = preconditioner ? preconditioner(r) : r;
  RasterImage p = z;
  double rz = dot(r.values(), z.values());

  for (int k = 0; k < options.max_iters; ++k) {
    const auto ap = op(p);
    const double pap = dot(p.values(), ap.values());
    if (!std::isfinite(pap) || !std::isfinite(rz)) {
      throw NumericalFailure("cg_solve: non-finite inner product", k);
    }
    if (pap <= 0.0) break;  // direction in the null space of a PSD operator
    const double alpha = rz / pap;
    axpy(alpha, p.values(), result.x.values());
    axpy(-alpha, ap.values(), r.values());
    result.iterations = k + 1;
    r_norm = norm2(r.values());
    result.relative_residual = denom(r_norm);
    if (r_norm <= target) {
      result.converged = true;
      return result;
    }
    z = preconditioner ? preconditioner(r) : r;
    const double rz_next = dot(r.values(), z.values());
    const double beta = rz_next / rz;
    rz = rz_next;
    auto pv = p.values();
    auto zv = z.values();
    for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = zv[i] + beta * pv[i];
  }
  return result;
}

}  // namespace lensless
