#pragma once

#include <utility>

#include "cpe/grid.hpp"

namespace cpe {

/// Model-problem state (xi, u, w) on the transformed column z in [0, h].
///
/// xi has no vertical axis; that is the discrete form of d(xi)/dz = 0. The
/// vertical velocity w lives on faces and is diagnosed from (xi, u), so it is
/// exactly zero at k = 0 and k = nz.
struct ModelState {
  double t = 0.0;
  Field2D xi;
  Field3D u1;
  Field3D u2;
  FaceFieldZ w;

  const GridSpec& grid() const { return xi.grid(); }

  /// Zero velocity, uniform density.
  static ModelState rest(const GridSpec& g, double xi0 = 1.0);
};

/// Physical state (rho, u, v) in altitude coordinates. The altitude levels
/// are the image of the uniform z-grid under y = -ln(1 - z), so `grid`
/// stores that z-grid.
struct PhysicalState {
  double t = 0.0;
  GridSpec grid;
  Field3D rho;
  Field3D u1;
  Field3D u2;
  FaceFieldZ v;
};

double y_to_z(double y);
/// Throws std::domain_error unless 0 <= z < 1.
double z_to_y(double z);

/// Altitude of cell center k / face k of the image y-grid.
double y_center(const GridSpec& g, int k);
double y_face(const GridSpec& g, int k);

/// rho = xi e^{-y}, v = e^{y} w; u carried level by level. Throws
/// std::invalid_argument if `y_grid` is not the grid of `s` or h >= 1.
PhysicalState model_to_physical(const ModelState& s, const GridSpec& y_grid);

struct Recovered {
  ModelState state;
  /// max |rho e^{y} - xi| over the column; 0 for exactly stratified data.
  double stratification_residual = 0.0;
};

/// xi = vertical mean of rho e^{y}, w = e^{-y} v. Throws
/// std::invalid_argument on nonpositive rho.
Recovered physical_to_model(const PhysicalState& s);

/// Max over interior levels of |d(rho)/dy + rho| (nondimensional
/// hydrostatic balance with p = rho), centered on the nonuniform y-grid.
double hydrostatic_residual(const PhysicalState& s);

/// Max |d(rho)/dt + div_x(rho u) + d(rho v)/dy| at the middle snapshot, with
/// a centered time difference across the three snapshots (equal spacing not
/// required).
double physical_mass_residual(const PhysicalState& before, const PhysicalState& now,
                              const PhysicalState& after);

}  // namespace cpe
