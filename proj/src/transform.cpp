#include "cpe/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpe/operators.hpp"

namespace cpe {

ModelState ModelState::rest(const GridSpec& g, double xi0) {
  ModelState s;
  s.xi = Field2D(g, xi0);
  s.u1 = Field3D(g);
  s.u2 = Field3D(g);
  s.w = FaceFieldZ(g);
  return s;
}

double y_to_z(double y) { return -std::expm1(-y); }

double z_to_y(double z) {
  if (!(z >= 0.0) || !(z < 1.0)) throw std::domain_error("z_to_y: z must lie in [0, 1)");
  return -std::log1p(-z);
}

double y_center(const GridSpec& g, int k) { return z_to_y(g.z_center(k)); }
double y_face(const GridSpec& g, int k) { return z_to_y(g.z_face(k)); }

PhysicalState model_to_physical(const ModelState& s, const GridSpec& y_grid) {
  const GridSpec& g = s.grid();
  if (!g.same_shape(y_grid))
    throw std::invalid_argument("model_to_physical: y-grid does not match the state grid");
  if (!(g.h < 1.0))
    throw std::invalid_argument("model_to_physical: column height must be < 1");

  std::vector<double> decay(g.nz), growth(g.nz + 1);
  for (int k = 0; k < g.nz; ++k) decay[k] = std::exp(-y_center(g, k));
  for (int k = 0; k <= g.nz; ++k) growth[k] = std::exp(y_face(g, k));

  PhysicalState p;
  p.t = s.t;
  p.grid = g;
  p.rho = Field3D(g);
  p.u1 = s.u1;
  p.u2 = s.u2;
  p.v = FaceFieldZ(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      for (int k = 0; k < g.nz; ++k) p.rho(i, j, k) = s.xi(i, j) * decay[k];
      p.v(i, j, 0) = 0.0;
      for (int k = 1; k < g.nz; ++k) p.v(i, j, k) = growth[k] * s.w(i, j, k);
      p.v(i, j, g.nz) = 0.0;
    }
  return p;
}

Recovered physical_to_model(const PhysicalState& s) {
  const GridSpec& g = s.grid;
  std::vector<double> growth(g.nz), decay(g.nz + 1);
  for (int k = 0; k < g.nz; ++k) growth[k] = std::exp(y_center(g, k));
  for (int k = 0; k <= g.nz; ++k) decay[k] = std::exp(-y_face(g, k));

  Recovered r;
  ModelState& m = r.state;
  m.t = s.t;
  m.xi = Field2D(g);
  m.u1 = s.u1;
  m.u2 = s.u2;
  m.w = FaceFieldZ(g);
  double resid = 0.0;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      double acc = 0.0;
      for (int k = 0; k < g.nz; ++k) {
        const double rho = s.rho(i, j, k);
        if (!(rho > 0.0)) throw std::invalid_argument("physical_to_model: rho must be positive");
        acc += rho * growth[k];
      }
      const double xi = acc / g.nz;
      m.xi(i, j) = xi;
      for (int k = 0; k < g.nz; ++k)
        resid = std::max(resid, std::abs(s.rho(i, j, k) * growth[k] - xi));
      m.w(i, j, 0) = 0.0;
      for (int k = 1; k < g.nz; ++k) m.w(i, j, k) = decay[k] * s.v(i, j, k);
      m.w(i, j, g.nz) = 0.0;
    }
  r.stratification_residual = resid;
  return r;
}

double hydrostatic_residual(const PhysicalState& s) {
  const GridSpec& g = s.grid;
  double resid = 0.0;
  for (int k = 1; k + 1 < g.nz; ++k) {
    const double dy = y_center(g, k + 1) - y_center(g, k - 1);
    for (int i = 0; i < g.nx1; ++i)
      for (int j = 0; j < g.nx2; ++j) {
        const double drho = (s.rho(i, j, k + 1) - s.rho(i, j, k - 1)) / dy;
        resid = std::max(resid, std::abs(drho + s.rho(i, j, k)));
      }
  }
  return resid;
}

double physical_mass_residual(const PhysicalState& before, const PhysicalState& now,
                              const PhysicalState& after) {
  const GridSpec& g = now.grid;
  if (!g.same_shape(before.grid) || !g.same_shape(after.grid))
    throw std::invalid_argument("physical_mass_residual: grid mismatch");
  const double dt = after.t - before.t;
  if (!(dt > 0.0)) throw std::invalid_argument("physical_mass_residual: snapshots out of order");

  Vec3D flux{Field3D(g), Field3D(g)};
  for (std::size_t n = 0; n < g.cells(); ++n) {
    flux.c1.values()[n] = now.rho.values()[n] * now.u1.values()[n];
    flux.c2.values()[n] = now.rho.values()[n] * now.u2.values()[n];
  }
  const Field3D divx = div_x(flux);

  std::vector<double> rho_face_decay(g.nz + 1), dy(g.nz);
  for (int k = 0; k <= g.nz; ++k) rho_face_decay[k] = std::exp(-y_face(g, k));
  for (int k = 0; k < g.nz; ++k) dy[k] = y_face(g, k + 1) - y_face(g, k);

  // rho at faces follows the stratified profile through the column mean.
  const Recovered m = physical_to_model(now);
  double resid = 0.0;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = m.state.xi(i, j);
      for (int k = 0; k < g.nz; ++k) {
        const double top = xi * rho_face_decay[k + 1] * now.v(i, j, k + 1);
        const double bottom = xi * rho_face_decay[k] * now.v(i, j, k);
        const double dtrho = (after.rho(i, j, k) - before.rho(i, j, k)) / dt;
        const double r = dtrho + divx(i, j, k) + (top - bottom) / dy[k];
        resid = std::max(resid, std::abs(r));
      }
    }
  return resid;
}

}  // namespace cpe
