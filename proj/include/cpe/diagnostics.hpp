#pragma once

#include <array>
#include <string>
#include <vector>

#include "cpe/grid.hpp"
#include "cpe/solver.hpp"
#include "cpe/transform.hpp"

namespace cpe {

/// Symmetric (strain) or antisymmetric (vorticity) 2x2 tensor per cell.
struct Tensor2 {
  Field3D a11, a12, a21, a22;
};

/// D_x(u) = (grad_x u + grad_x^T u) / 2 with entry (c, d) = (d_d u_c + d_c u_d) / 2.
Tensor2 strain(const Field3D& u1, const Field3D& u2);
/// A_x(u) = (grad_x u - grad_x^T u) / 2.
Tensor2 vorticity(const Field3D& u1, const Field3D& u2);

struct EnergyReport {
  double t = 0.0;
  double E = 0.0;       // int xi|u|^2/2 + kappa (xi ln xi - xi + 1)
  double D_visc = 0.0;  // 2 nu int xi|D_x(u)|^2 + nu int xi|d_z u|^2
  double D_fric = 0.0;  // r int xi|u|^3
  double balance_residual = 0.0;
};

EnergyReport energy(const ModelState& s, const Params& p);

struct EntropyReport {
  double t = 0.0;
  double B = 0.0;  // int xi|psi|^2/2 + kappa (xi ln xi - xi + 1), psi = u + 2 nu grad ln xi
  double dzw = 0.0;          // 2 nu int xi |d_z w|^2
  double vorticity = 0.0;    // 2 nu int xi |A_x(u)|^2
  double dzu = 0.0;          // nu int xi |d_z u|^2
  double friction = 0.0;     // r int xi |u|^3
  double friction_cross = 0.0;  // 2 nu r int |u| u . grad xi (sign-indefinite)
  double grad_sqrt_xi = 0.0;    // 8 nu kappa int |grad sqrt xi|^2
  double balance_residual = 0.0;

  double total_rate() const {
    return dzw + vorticity + dzu + friction + friction_cross + grad_sqrt_xi;
  }
};

/// psi = u + 2 nu grad_x ln xi, ln clamped at the floor.
Vec3D bd_velocity(const ModelState& s, const Params& p);
EntropyReport bd_entropy(const ModelState& s, const Params& p);

inline constexpr std::size_t norm_count = 9;

struct NormReport {
  double t = 0.0;
  /// ||sqrt(xi) u||_2, ||xi^(1/3) u||_3, ||sqrt(xi) d_z u||_2,
  /// ||sqrt(xi) D_x(u)||_2, ||xi ln xi - xi + 1||_1, ||grad sqrt(xi)||_2,
  /// ||sqrt(xi) d_z w||_2, ||sqrt(xi) A_x(u)||_2, ||sqrt(xi) w||_2.
  std::array<double, norm_count> values{};

  double sqrt_xi_w() const { return values[8]; }
  double sqrt_xi_dzw() const { return values[6]; }
  static const std::array<const char*, norm_count>& names();
};

NormReport estimate_norms(const ModelState& s, double xi_floor = 1e-10);

/// int xi over the domain.
double mass(const ModelState& s);

/// xi ln xi - xi + 1 with ln clamped at the floor; nonnegative.
double relative_entropy_density(double xi, double xi_floor);

// -- Run driver -------------------------------------------------------------

struct DiagnosticsRow {
  double t = 0.0;
  double dt = 0.0;
  double E = 0.0;
  double D_visc = 0.0;
  double D_fric = 0.0;
  double E_residual = 0.0;
  double B = 0.0;
  double B_residual = 0.0;
  double mass = 0.0;
  std::array<double, norm_count> norms{};
  double xi_min = 0.0;
  double max_speed = 0.0;
  long floor_activations = 0;
  /// Nonnegative-by-theory entropy terms, kept for sign checks.
  EntropyReport entropy;
};

/// Column names of the diagnostics CSV, in order.
std::vector<std::string> diagnostics_columns();

struct RunObserver {
  /// Called for every emitted diagnostics row (including the initial one).
  std::function<void(const DiagnosticsRow&, const ModelState&)> on_row;
  /// Called after every step.
  std::function<void(const ModelState&, long step)> on_step;
};

struct RunResult {
  ModelState final_state;
  std::vector<DiagnosticsRow> rows;
  std::vector<ModelState> snapshots;
  long steps = 0;
  long floor_activations = 0;
  /// max over steps of |w(top face)| / max|u|.
  double max_top_w_ratio = 0.0;
};

/// Advances to cfg.t_end, emitting a row at t0, every dump_every steps and
/// at the end. Balance residuals of a row cover the interval since the
/// previous row: |(X_b - X_a)/(t_b - t_a) + (int rate dt)/(t_b - t_a)| with
/// the dissipation integral accumulated by the trapezoid rule per step.
/// The first row reports residual NaN.
RunResult run(const ModelState& initial, const Params& p, const SolverConfig& cfg,
              const SourceFn& source = {}, const RunObserver& observer = {});

// -- Stability study --------------------------------------------------------

struct StudyRow {
  double delta = 0.0;
  double sup_xi_l32 = 0.0;        // sup_t ||xi^n - xi||_{3/2}
  double l2t_sqrt_xi_u_l32 = 0.0; // (int ||sqrt(xi^n) u^n - sqrt(xi) u||_{3/2}^2 dt)^(1/2)
  double l1t_xi_u_l1 = 0.0;       // int ||xi^n u^n - xi u||_1 dt
  double mass_rel_diff = 0.0;     // |mass^n(t_end) - mass^n(0)| / mass^n(0)
  bool monotone = true;           // each metric below the previous row's
};

struct ConvergenceTable {
  std::vector<StudyRow> rows;
  /// log2-rate per consecutive pair, metric by metric.
  std::vector<std::array<double, 3>> rates;
  bool monotone = true;
  double dt = 0.0;
};

/// Runs the reference and every perturbed datum in lockstep with a common
/// fixed step (cfg.dt, or 0.8 x the smallest initial CFL step), measuring
/// the distances above. Non-monotone rows are flagged, not thrown.
ConvergenceTable stability_study(const ModelState& reference, const Params& p,
                                 const SolverConfig& cfg,
                                 const std::vector<ModelState>& perturbed,
                                 const std::vector<double>& deltas);

}  // namespace cpe
