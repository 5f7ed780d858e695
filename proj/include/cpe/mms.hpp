#pragma once

#include <array>
#include <vector>

#include "cpe/diagnostics.hpp"
#include "cpe/solver.hpp"

namespace cpe {

/// Smooth manufactured solution of the model problem on a given domain:
///   xi = 1 + A sin(k1 x1) s(t),  u = a(t, x) + b(t, x) cos(pi z / h),
/// with s(t) = cos(pi t), and a, b trigonometric in x scaled by
/// q(t) = 1 + sin(pi t) / 2. The z-profile has zero column mean and zero
/// slope at z = 0 and z = h, so u_bar = a and Neumann data hold exactly;
/// w follows from the mass equation.
struct ManufacturedSolution {
  GridSpec grid;
  double xi_amplitude = 0.2;
  double a1 = 0.3, a2 = 0.2;  // amplitudes of the column-mean velocity
  double b1 = 0.1, b2 = 0.1;  // amplitudes of the sheared part

  explicit ManufacturedSolution(const GridSpec& g) : grid(g) {}

  double xi(double t, double x1, double x2) const;
  double u1(double t, double x1, double x2, double z) const;
  double u2(double t, double x1, double x2, double z) const;
  double w(double t, double x1, double x2, double z) const;

  /// Exact state sampled at cell centers (w at faces).
  ModelState state(double t) const;

  /// Adds the residual of the model equations at the exact solution to `k`.
  void add_source(double t, const Params& p, Tendency& k) const;
  SourceFn source(const Params& p) const;
};

struct MmsLevel {
  GridSpec grid;
  long steps = 0;
  double xi_error = 0.0;  // discrete L2 of xi - xi*
  double u_error = 0.0;   // discrete L2 of |u - u*|
};

struct MmsStudy {
  std::vector<MmsLevel> levels;
  /// log2-ratios between consecutive levels: {xi, u}.
  std::vector<std::array<double, 2>> orders;
};

/// Runs the manufactured problem from t = 0 to cfg.t_end. In a study a
/// fixed cfg.dt belongs to the first grid and scales with dx1 on the others.
MmsLevel mms_run(const GridSpec& g, const Params& p, const SolverConfig& cfg);
MmsStudy mms_study(const std::vector<GridSpec>& grids, const Params& p, SolverConfig cfg);

}  // namespace cpe
