#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "cpe/grid.hpp"
#include "cpe/transform.hpp"

namespace cpe {

/// Physical coefficients of the model problem.
struct Params {
  double nu = 0.01;         // viscosity, nu_1 = nu_2 = nu (linear profile nu_i(xi) = nu xi)
  double r = 0.0;           // quadratic friction
  double kappa = 1.0;       // pressure coefficient 1/Ma^2
  double xi_floor = 1e-10;  // vacuum floor

  /// Throws std::invalid_argument when a coefficient is out of range.
  void validate() const;

  bool operator==(const Params&) const = default;
};

enum class Integrator { ssp_rk2 };

struct SolverConfig {
  double cfl = 0.4;
  double t_end = 0.0;
  /// Fixed step; 0 selects the adaptive CFL step.
  double dt = 0.0;
  Integrator integrator = Integrator::ssp_rk2;
  int dump_every = 1;
  /// Accumulate dissipation every step so energy and entropy balance
  /// residuals can be reported. Off for pure convergence runs.
  bool track_balance = true;
  /// Keep a copy of every dumped state in the run result.
  bool keep_snapshots = false;

  void validate() const;

  bool operator==(const SolverConfig&) const = default;
};

/// Time derivative of the conserved variables (xi, xi u1, xi u2).
struct Tendency {
  Field2D xi;
  Field3D m1;
  Field3D m2;

  static Tendency zeros(const GridSpec& g);
};

/// Raised on NaN/Inf; carries the step index and the offending field.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, long step, std::string field)
      : std::runtime_error(what), step_(step), field_(std::move(field)) {}
  long step() const { return step_; }
  const std::string& field() const { return field_; }

 private:
  long step_;
  std::string field_;
};

/// Vertical mean with the same weights as integrate_z_partial.
Vec2D vertical_mean(const Vec3D& u);

/// Horizontal mass fluxes through faces, per level: logarithmic mean of xi
/// times arithmetic mean of u.
struct FaceFluxes {
  Field3D east;
  Field3D north;
};
FaceFluxes mass_fluxes(const Field2D& xi, const Field3D& u1, const Field3D& u2);

/// d(xi)/dt = -div_x(xi u_bar), the column average of the 3-D mass equation.
Field2D rhs_xi(const Field2D& xi, const Field3D& u1, const Field3D& u2);

struct DiagnosedW {
  FaceFieldZ w;
  /// True when xi dropped below the floor somewhere (w divides by the floor there).
  bool vacuum_contact = false;
};

/// xi w(z) = int_0^z div_x(xi (u_bar - u)) dz'. Face 0 is exactly 0; face nz
/// vanishes up to round-off because u_bar uses the same weights.
DiagnosedW diagnostic_w(const Field2D& xi, const Field3D& u1, const Field3D& u2,
                        double xi_floor = 1e-10);

/// Tendency of xi u. Reads state.w, which must already be diagnosed.
Vec3D rhs_momentum(const ModelState& state, const Params& p);

/// Both tendencies at once, sharing the face fluxes.
Tendency rhs(const ModelState& state, const Params& p);

/// CFL-limited step: cfl * min(dx/(max|u| + sqrt(kappa)), dz/(max|w| + tiny),
/// dx^2/(4 nu max(xi)/min(xi)), dz^2/(2 nu)). Throws NumericalError on a
/// non-finite state.
double cfl_dt(const ModelState& state, const Params& p, double cfl);

/// Optional forcing added to the tendency at stage time t.
using SourceFn = std::function<void(double t, Tendency& add_to)>;

struct StepInfo {
  long floor_activations = 0;
  bool vacuum_contact = false;
};

/// One SSP-RK2 (Heun) step. Velocity is recovered as (xi u)/max(xi, floor)
/// and w re-diagnosed after each stage.
ModelState step(const ModelState& s, const Params& p, double dt, const SourceFn& source = {},
                StepInfo* info = nullptr, long step_index = 0);

/// Recompute w for a state whose (xi, u) were set directly.
void rediagnose(ModelState& s, double xi_floor);

/// Throws NumericalError naming the first non-finite field.
void check_finite(const ModelState& s, long step_index);

/// Initial-state builders.
ModelState make_state(const Field2D& xi, const Field3D& u1, const Field3D& u2,
                      double xi_floor = 1e-10);

}  // namespace cpe
