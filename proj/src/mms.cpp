#include "cpe/mms.hpp"

#include <cmath>
#include <numbers>

#include "cpe/operators.hpp"

namespace cpe {

namespace {

constexpr double pi = std::numbers::pi;

struct TimeFactors {
  double s, st, q, qt;
};

TimeFactors time_factors(double t) {
  return {std::cos(pi * t), -pi * std::sin(pi * t), 1.0 + 0.5 * std::sin(pi * t),
          0.5 * pi * std::cos(pi * t)};
}

// Velocity component and the derivatives the source needs.
struct Jet {
  double v, t, d1, d2, d11, d12, d22, z, zz;
};

struct Point {
  double xi, xi_t, xi_1, xi_2;
  Jet u1, u2;
  double w, w_z;
  // d_t xi + div_x(xi u_bar), u_bar = column mean of u
  double mass_source;
};

struct Trig {
  double s1, c1, s2, c2, sz, cz;
};

Point evaluate(const ManufacturedSolution& m, const TimeFactors& f, const Trig& tr) {
  const GridSpec& g = m.grid;
  const double k1 = 2.0 * pi / g.lx1, k2 = 2.0 * pi / g.lx2, mz = pi / g.h;
  Point p{};
  p.xi = 1.0 + m.xi_amplitude * tr.s1 * f.s;
  p.xi_t = m.xi_amplitude * tr.s1 * f.st;
  p.xi_1 = m.xi_amplitude * k1 * tr.c1 * f.s;
  p.xi_2 = 0.0;

  // u1 = a1 sin(k2 x2) q + b1 cos(k1 x1) q cos(mz z)
  const double A1 = m.a1 * tr.s2, A1_2 = m.a1 * k2 * tr.c2, A1_22 = -m.a1 * k2 * k2 * tr.s2;
  const double B1 = m.b1 * tr.c1, B1_1 = -m.b1 * k1 * tr.s1, B1_11 = -m.b1 * k1 * k1 * tr.c1;
  // u2 = a2 sin(k1 x1) q + b2 sin(k2 x2) q cos(mz z)
  const double A2 = m.a2 * tr.s1, A2_1 = m.a2 * k1 * tr.c1, A2_11 = -m.a2 * k1 * k1 * tr.s1;
  const double B2 = m.b2 * tr.s2, B2_2 = m.b2 * k2 * tr.c2, B2_22 = -m.b2 * k2 * k2 * tr.s2;

  const double q = f.q, qt = f.qt, cz = tr.cz, sz = tr.sz;
  p.u1 = {(A1 + B1 * cz) * q, (A1 + B1 * cz) * qt, B1_1 * cz * q, A1_2 * q, B1_11 * cz * q,
          0.0, A1_22 * q, -mz * B1 * sz * q, -mz * mz * B1 * cz * q};
  p.u2 = {(A2 + B2 * cz) * q, (A2 + B2 * cz) * qt, A2_1 * q, B2_2 * cz * q, A2_11 * q,
          0.0, B2_22 * cz * q, -mz * B2 * sz * q, -mz * mz * B2 * cz * q};

  // div_x(xi b) for the sheared part b = (B1 q, B2 q).
  const double D = (p.xi_1 * B1 + p.xi * B1_1 + p.xi_2 * B2 + p.xi * B2_2) * q;
  // u_bar = (A1 q, A2 q); A1 depends on x2 only and A2 on x1 only.
  p.mass_source = p.xi_t + p.xi_1 * A1 * q + p.xi_2 * A2 * q;
  p.w = -D * sz / (mz * p.xi);
  p.w_z = -D * cz / p.xi;
  return p;
}

Trig trig(const GridSpec& g, double x1, double x2, double z) {
  const double k1 = 2.0 * pi / g.lx1, k2 = 2.0 * pi / g.lx2, mz = pi / g.h;
  return {std::sin(k1 * x1), std::cos(k1 * x1), std::sin(k2 * x2),
          std::cos(k2 * x2), std::sin(mz * z),  std::cos(mz * z)};
}

}  // namespace

double ManufacturedSolution::xi(double t, double x1, double x2) const {
  return evaluate(*this, time_factors(t), trig(grid, x1, x2, 0.0)).xi;
}
double ManufacturedSolution::u1(double t, double x1, double x2, double z) const {
  return evaluate(*this, time_factors(t), trig(grid, x1, x2, z)).u1.v;
}
double ManufacturedSolution::u2(double t, double x1, double x2, double z) const {
  return evaluate(*this, time_factors(t), trig(grid, x1, x2, z)).u2.v;
}
double ManufacturedSolution::w(double t, double x1, double x2, double z) const {
  return evaluate(*this, time_factors(t), trig(grid, x1, x2, z)).w;
}

ModelState ManufacturedSolution::state(double t) const {
  ModelState s;
  s.t = t;
  s.xi = sample2d(grid, [&](double x1, double x2) { return xi(t, x1, x2); });
  s.u1 = sample3d(grid, [&](double x1, double x2, double z) { return u1(t, x1, x2, z); });
  s.u2 = sample3d(grid, [&](double x1, double x2, double z) { return u2(t, x1, x2, z); });
  s.w = sample_faces(grid, [&](double x1, double x2, double z) { return w(t, x1, x2, z); });
  return s;
}

void ManufacturedSolution::add_source(double t, const Params& p, Tendency& k) const {
  const GridSpec& g = grid;
  const TimeFactors f = time_factors(t);
  const double k1 = 2.0 * pi / g.lx1, k2 = 2.0 * pi / g.lx2, mz = pi / g.h;
  std::vector<double> s1(g.nx1), c1(g.nx1), s2(g.nx2), c2(g.nx2), sz(g.nz), cz(g.nz);
  for (int i = 0; i < g.nx1; ++i) {
    s1[i] = std::sin(k1 * g.x1_center(i));
    c1[i] = std::cos(k1 * g.x1_center(i));
  }
  for (int j = 0; j < g.nx2; ++j) {
    s2[j] = std::sin(k2 * g.x2_center(j));
    c2[j] = std::cos(k2 * g.x2_center(j));
  }
  for (int kk = 0; kk < g.nz; ++kk) {
    sz[kk] = std::sin(mz * g.z_center(kk));
    cz[kk] = std::cos(mz * g.z_center(kk));
  }

  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      for (int kk = 0; kk < g.nz; ++kk) {
        const Point P = evaluate(*this, f, {s1[i], c1[i], s2[j], c2[j], sz[kk], cz[kk]});
        if (kk == 0) k.xi(i, j) += P.mass_source;
        const Jet& a = P.u1;
        const Jet& b = P.u2;
        const double divm = P.xi_1 * a.v + P.xi_2 * b.v + P.xi * (a.d1 + b.d2);
        const double S11 = a.d1, S22 = b.d2, S12 = 0.5 * (a.d2 + b.d1);
        const double speed = std::sqrt(a.v * a.v + b.v * b.v);

        auto momentum = [&](const Jet& u, double xi_c, double Sc1, double Sc2, double divS) {
          return P.xi_t * u.v + P.xi * u.t + u.v * divm + P.xi * (a.v * u.d1 + b.v * u.d2) +
                 P.xi * (P.w * u.z + u.v * P.w_z) + p.kappa * xi_c -
                 2.0 * p.nu * (P.xi_1 * Sc1 + P.xi_2 * Sc2 + P.xi * divS) -
                 p.nu * P.xi * u.zz + p.r * P.xi * speed * u.v;
        };
        const double divS1 = a.d11 + 0.5 * (a.d22 + b.d12);
        const double divS2 = 0.5 * (b.d11 + a.d12) + b.d22;
        k.m1(i, j, kk) += momentum(a, P.xi_1, S11, S12, divS1);
        k.m2(i, j, kk) += momentum(b, P.xi_2, S12, S22, divS2);
      }
    }
}

SourceFn ManufacturedSolution::source(const Params& p) const {
  return [m = *this, p](double t, Tendency& k) { m.add_source(t, p, k); };
}

MmsLevel mms_run(const GridSpec& g, const Params& p, const SolverConfig& cfg) {
  const ManufacturedSolution m(g);
  SolverConfig c = cfg;
  c.track_balance = false;
  c.keep_snapshots = false;
  c.dump_every = 1 << 30;
  const RunResult r = run(m.state(0.0), p, c, m.source(p));
  const ModelState exact = m.state(r.final_state.t);

  MmsLevel lv;
  lv.grid = g;
  lv.steps = r.steps;
  Field2D dxi(g);
  for (std::size_t n = 0; n < dxi.size(); ++n)
    dxi.values()[n] = r.final_state.xi.values()[n] - exact.xi.values()[n];
  Field3D du(g);
  for (std::size_t n = 0; n < du.size(); ++n)
    du.values()[n] = std::hypot(r.final_state.u1.values()[n] - exact.u1.values()[n],
                                r.final_state.u2.values()[n] - exact.u2.values()[n]);
  lv.xi_error = lp_norm(dxi, 2.0);
  lv.u_error = lp_norm(du, 2.0);
  return lv;
}

MmsStudy mms_study(const std::vector<GridSpec>& grids, const Params& p, SolverConfig cfg) {
  if (grids.size() < 2) throw std::invalid_argument("mms_study: need at least two grids");
  MmsStudy st;
  const double dt0 = cfg.dt;
  for (const GridSpec& g : grids) {
    if (dt0 > 0.0) cfg.dt = dt0 * g.dx1() / grids.front().dx1();
    st.levels.push_back(mms_run(g, p, cfg));
  }
  for (std::size_t n = 1; n < st.levels.size(); ++n) {
    const MmsLevel& a = st.levels[n - 1];
    const MmsLevel& b = st.levels[n];
    const double ratio = std::log2(a.grid.dx1() / b.grid.dx1());
    st.orders.push_back({std::log2(a.xi_error / b.xi_error) / ratio,
                         std::log2(a.u_error / b.u_error) / ratio});
  }
  return st;
}

}  // namespace cpe
