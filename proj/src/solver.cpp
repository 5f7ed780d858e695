#include "cpe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpe/operators.hpp"

namespace cpe {

void Params::validate() const {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("params.nu must be > 0");
  if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("params.r must be >= 0");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("params.kappa must be > 0");
  if (!(xi_floor > 0.0) || !(xi_floor < 1e-2))
    throw std::invalid_argument("params.xi_floor must lie in (0, 1e-2)");
}

void SolverConfig::validate() const {
  if (!(cfl > 0.0) || !(cfl <= 1.0)) throw std::invalid_argument("solver.cfl must lie in (0, 1]");
  if (!(t_end >= 0.0) || !std::isfinite(t_end))
    throw std::invalid_argument("solver.t_end must be >= 0");
  if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver.dt must be >= 0");
  if (dump_every < 1) throw std::invalid_argument("solver.dump_every must be >= 1");
}

Tendency Tendency::zeros(const GridSpec& g) { return {Field2D(g), Field3D(g), Field3D(g)}; }

Vec2D vertical_mean(const Vec3D& u) { return {vertical_mean(u.c1), vertical_mean(u.c2)}; }

FaceFluxes mass_fluxes(const Field2D& xi, const Field3D& u1, const Field3D& u2) {
  const GridSpec& g = xi.grid();
  FaceFluxes f{Field3D(g), Field3D(g)};
  for (int i = 0; i < g.nx1; ++i) {
    const int ip = g.wrap1(i + 1);
    for (int j = 0; j < g.nx2; ++j) {
      const int jp = g.wrap2(j + 1);
      const double xe = log_mean(xi(i, j), xi(ip, j));
      const double xn = log_mean(xi(i, j), xi(i, jp));
      for (int k = 0; k < g.nz; ++k) {
        f.east(i, j, k) = xe * 0.5 * (u1(i, j, k) + u1(ip, j, k));
        f.north(i, j, k) = xn * 0.5 * (u2(i, j, k) + u2(i, jp, k));
      }
    }
  }
  return f;
}

namespace {

// Column mean of the per-level flux divergence, and the vertical mass flux
// xi w that closes the 3-D mass balance at every level.
struct MassBalance {
  Field3D level_div;
  Field2D mean_div;
};

MassBalance mass_balance(const FaceFluxes& f) {
  MassBalance b{div_faces(f.east, f.north), Field2D(f.east.grid())};
  b.mean_div = vertical_mean(b.level_div);
  return b;
}

FaceFieldZ vertical_mass_flux(const MassBalance& b) {
  const GridSpec& g = b.mean_div.grid();
  FaceFieldZ G(g);
  const double dz = g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double mean = b.mean_div(i, j);
      double acc = 0.0;
      G(i, j, 0) = 0.0;
      for (int k = 0; k < g.nz; ++k) {
        acc += (mean - b.level_div(i, j, k)) * dz;
        G(i, j, k + 1) = acc;
      }
    }
  return G;
}

void momentum_component(const ModelState& s, const Params& p, const FaceFluxes& F,
                        const FaceFieldZ& G, const Field3D& uc, const Field2D& dxi_c,
                        const Field3D& visc_h, Field3D& out) {
  const GridSpec& g = s.grid();
  const int nz = g.nz;
  const double rdz = 1.0 / g.dz();

  Field3D east(g), north(g);
  for (int i = 0; i < g.nx1; ++i) {
    const int ip = g.wrap1(i + 1);
    for (int j = 0; j < g.nx2; ++j) {
      const int jp = g.wrap2(j + 1);
      for (int k = 0; k < nz; ++k) {
        east(i, j, k) = F.east(i, j, k) * 0.5 * (uc(i, j, k) + uc(ip, j, k));
        north(i, j, k) = F.north(i, j, k) * 0.5 * (uc(i, j, k) + uc(i, jp, k));
      }
    }
  }
  const Field3D adv_h = div_faces(east, north);
  const Field3D uzz = d2dz2(uc);

  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = s.xi(i, j);
      for (int k = 0; k < nz; ++k) {
        // Boundary faces carry no vertical flux (w = 0 there).
        const double top = k + 1 < nz ? G(i, j, k + 1) * 0.5 * (uc(i, j, k) + uc(i, j, k + 1)) : 0.0;
        const double bot = k > 0 ? G(i, j, k) * 0.5 * (uc(i, j, k - 1) + uc(i, j, k)) : 0.0;
        const double a = s.u1(i, j, k), b = s.u2(i, j, k);
        const double speed = std::sqrt(a * a + b * b);
        out(i, j, k) = -adv_h(i, j, k) - (top - bot) * rdz - p.kappa * dxi_c(i, j) +
                       2.0 * p.nu * visc_h(i, j, k) + p.nu * xi * uzz(i, j, k) -
                       p.r * xi * speed * uc(i, j, k);
      }
    }
}

Vec3D momentum(const ModelState& s, const Params& p, const FaceFluxes& F) {
  const GridSpec& g = s.grid();
  FaceFieldZ G(g);
  for (std::size_t n = 0; n < G.size(); ++n) {
    // xi is constant along the column, so scale face by face.
    G.values()[n] = s.w.values()[n];
  }
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k <= g.nz; ++k) G(i, j, k) *= s.xi(i, j);

  const Vec2D dxi = grad_x(s.xi);
  const Vec3D g1 = grad_x(s.u1);
  const Vec3D g2 = grad_x(s.u2);
  // xi * strain tensor, rows fed to the flux-form divergence.
  Vec3D row1{Field3D(g), Field3D(g)}, row2{Field3D(g), Field3D(g)};
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = s.xi(i, j);
      for (int k = 0; k < g.nz; ++k) {
        const double s11 = g1.c1(i, j, k);
        const double s22 = g2.c2(i, j, k);
        const double s12 = 0.5 * (g1.c2(i, j, k) + g2.c1(i, j, k));
        row1.c1(i, j, k) = xi * s11;
        row1.c2(i, j, k) = xi * s12;
        row2.c1(i, j, k) = xi * s12;
        row2.c2(i, j, k) = xi * s22;
      }
    }
  const Field3D visc1 = div_x(row1);
  const Field3D visc2 = div_x(row2);

  Vec3D out{Field3D(g), Field3D(g)};
  momentum_component(s, p, F, G, s.u1, dxi.c1, visc1, out.c1);
  momentum_component(s, p, F, G, s.u2, dxi.c2, visc2, out.c2);
  return out;
}

Field2D negate(Field2D f) {
  for (double& x : f.values()) x = -x;
  return f;
}

}  // namespace

Field2D rhs_xi(const Field2D& xi, const Field3D& u1, const Field3D& u2) {
  return negate(mass_balance(mass_fluxes(xi, u1, u2)).mean_div);
}

DiagnosedW diagnostic_w(const Field2D& xi, const Field3D& u1, const Field3D& u2,
                        double xi_floor) {
  const GridSpec& g = xi.grid();
  DiagnosedW d{vertical_mass_flux(mass_balance(mass_fluxes(xi, u1, u2))), false};
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double x = xi(i, j);
      if (x < xi_floor) d.vacuum_contact = true;
      const double inv = 1.0 / std::max(x, xi_floor);
      for (int k = 0; k <= g.nz; ++k) d.w(i, j, k) *= inv;
    }
  return d;
}

Vec3D rhs_momentum(const ModelState& state, const Params& p) {
  return momentum(state, p, mass_fluxes(state.xi, state.u1, state.u2));
}

Tendency rhs(const ModelState& state, const Params& p) {
  const FaceFluxes F = mass_fluxes(state.xi, state.u1, state.u2);
  Tendency t;
  t.xi = negate(mass_balance(F).mean_div);
  Vec3D m = momentum(state, p, F);
  t.m1 = std::move(m.c1);
  t.m2 = std::move(m.c2);
  return t;
}

void check_finite(const ModelState& s, long step_index) {
  auto fail = [&](const char* field) {
    throw NumericalError("non-finite value in " + std::string(field) + " at step " +
                             std::to_string(step_index),
                         step_index, field);
  };
  if (!s.xi.is_finite()) fail("xi");
  if (!s.u1.is_finite()) fail("u1");
  if (!s.u2.is_finite()) fail("u2");
  if (!s.w.is_finite()) fail("w");
}

double cfl_dt(const ModelState& s, const Params& p, double cfl) {
  check_finite(s, -1);
  const GridSpec& g = s.grid();
  double umax = 0.0;
  for (std::size_t n = 0; n < g.cells(); ++n) {
    const double a = s.u1.values()[n], b = s.u2.values()[n];
    umax = std::max(umax, std::sqrt(a * a + b * b));
  }
  const double wmax = s.w.max_abs();
  const double ximin = std::max(s.xi.min(), p.xi_floor);
  const double ximax = std::max(s.xi.max(), p.xi_floor);
  const double dx = std::min(g.dx1(), g.dx2());
  const double dz = g.dz();
  const double tiny = 1e-300;
  const double limits[] = {
      dx / (umax + std::sqrt(p.kappa)),
      dz / (wmax + tiny),
      dx * dx / (4.0 * p.nu * ximax / ximin),
      dz * dz / (2.0 * p.nu),
  };
  const double dt = cfl * *std::min_element(std::begin(limits), std::end(limits));
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NumericalError("cfl_dt: non-finite time step", -1, "dt");
  return dt;
}

void rediagnose(ModelState& s, double xi_floor) {
  s.w = diagnostic_w(s.xi, s.u1, s.u2, xi_floor).w;
}

ModelState make_state(const Field2D& xi, const Field3D& u1, const Field3D& u2,
                      double xi_floor) {
  ModelState s;
  s.xi = xi;
  s.u1 = u1;
  s.u2 = u2;
  rediagnose(s, xi_floor);
  return s;
}

namespace {

struct Conserved {
  Field2D xi;
  Field3D m1;
  Field3D m2;
};

Conserved conserved(const ModelState& s) {
  const GridSpec& g = s.grid();
  Conserved c{s.xi, Field3D(g), Field3D(g)};
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k) {
        c.m1(i, j, k) = s.xi(i, j) * s.u1(i, j, k);
        c.m2(i, j, k) = s.xi(i, j) * s.u2(i, j, k);
      }
  return c;
}

// a * x + b * (y + dt * k), elementwise.
void combine(std::span<double> out, double a, std::span<const double> x, double b,
             std::span<const double> y, double dt, std::span<const double> k) {
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = a * x[n] + b * (y[n] + dt * k[n]);
}

ModelState recover(const Conserved& c, double t, double xi_floor, StepInfo* info) {
  const GridSpec& g = c.xi.grid();
  ModelState s;
  s.t = t;
  s.xi = c.xi;
  long floored = 0;
  for (double& x : s.xi.values())
    if (x < xi_floor) {
      x = xi_floor;
      ++floored;
    }
  s.u1 = Field3D(g);
  s.u2 = Field3D(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double inv = 1.0 / std::max(s.xi(i, j), xi_floor);
      for (int k = 0; k < g.nz; ++k) {
        s.u1(i, j, k) = c.m1(i, j, k) * inv;
        s.u2(i, j, k) = c.m2(i, j, k) * inv;
      }
    }
  const DiagnosedW d = diagnostic_w(s.xi, s.u1, s.u2, xi_floor);
  s.w = d.w;
  if (info) {
    info->floor_activations += floored;
    info->vacuum_contact = info->vacuum_contact || d.vacuum_contact;
  }
  return s;
}

Tendency evaluate(const ModelState& s, const Params& p, const SourceFn& source) {
  Tendency k = rhs(s, p);
  if (source) source(s.t, k);
  return k;
}

}  // namespace

ModelState step(const ModelState& s0, const Params& p, double dt, const SourceFn& source,
                StepInfo* info, long step_index) {
  const Conserved c0 = conserved(s0);

  const Tendency k1 = evaluate(s0, p, source);
  Conserved c1 = c0;
  combine(c1.xi.values(), 0.0, c0.xi.values(), 1.0, c0.xi.values(), dt, k1.xi.values());
  combine(c1.m1.values(), 0.0, c0.m1.values(), 1.0, c0.m1.values(), dt, k1.m1.values());
  combine(c1.m2.values(), 0.0, c0.m2.values(), 1.0, c0.m2.values(), dt, k1.m2.values());
  const ModelState s1 = recover(c1, s0.t + dt, p.xi_floor, info);
  check_finite(s1, step_index);

  const Tendency k2 = evaluate(s1, p, source);
  Conserved c2 = c0;
  combine(c2.xi.values(), 0.5, c0.xi.values(), 0.5, c1.xi.values(), dt, k2.xi.values());
  combine(c2.m1.values(), 0.5, c0.m1.values(), 0.5, c1.m1.values(), dt, k2.m1.values());
  combine(c2.m2.values(), 0.5, c0.m2.values(), 0.5, c1.m2.values(), dt, k2.m2.values());
  ModelState s2 = recover(c2, s0.t + dt, p.xi_floor, info);
  check_finite(s2, step_index);
  return s2;
}

}  // namespace cpe
