#include "cpe/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cpe/operators.hpp"

namespace cpe {

Tensor2 strain(const Field3D& u1, const Field3D& u2) {
  const Vec3D g1 = grad_x(u1);
  const Vec3D g2 = grad_x(u2);
  Tensor2 t{g1.c1, Field3D(u1.grid()), Field3D(u1.grid()), g2.c2};
  for (std::size_t n = 0; n < u1.size(); ++n) {
    const double s = 0.5 * (g1.c2.values()[n] + g2.c1.values()[n]);
    t.a12.values()[n] = s;
    t.a21.values()[n] = s;
  }
  return t;
}

Tensor2 vorticity(const Field3D& u1, const Field3D& u2) {
  const Vec3D g1 = grad_x(u1);
  const Vec3D g2 = grad_x(u2);
  const GridSpec& g = u1.grid();
  Tensor2 t{Field3D(g), Field3D(g), Field3D(g), Field3D(g)};
  for (std::size_t n = 0; n < u1.size(); ++n) {
    const double a = 0.5 * (g1.c2.values()[n] - g2.c1.values()[n]);
    t.a12.values()[n] = a;
    t.a21.values()[n] = -a;
  }
  return t;
}

double relative_entropy_density(double xi, double xi_floor) {
  return xi * std::log(std::max(xi, xi_floor)) - xi + 1.0;
}

namespace {

double frob2(const Tensor2& t, std::size_t n) {
  const double a = t.a11.values()[n], b = t.a12.values()[n];
  const double c = t.a21.values()[n], d = t.a22.values()[n];
  return a * a + b * b + c * c + d * d;
}

// |d_z u|^2 on interior faces from the compact difference; boundary faces 0.
FaceFieldZ dzu_squared(const ModelState& s) {
  const GridSpec& g = s.grid();
  FaceFieldZ f(g);
  const double rdz = 1.0 / g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 1; k < g.nz; ++k) {
        const double a = (s.u1(i, j, k) - s.u1(i, j, k - 1)) * rdz;
        const double b = (s.u2(i, j, k) - s.u2(i, j, k - 1)) * rdz;
        f(i, j, k) = a * a + b * b;
      }
  return f;
}

FaceFieldZ face_broadcast(const Field2D& xi) {
  const GridSpec& g = xi.grid();
  FaceFieldZ f(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k <= g.nz; ++k) f(i, j, k) = xi(i, j);
  return f;
}

// sum over interior faces of xi |d_z u|^2 dA dz
double dzu_integral(const ModelState& s) {
  const GridSpec& g = s.grid();
  const FaceFieldZ d = dzu_squared(s);
  CompensatedSum acc;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 1; k < g.nz; ++k) acc.add(s.xi(i, j) * d(i, j, k));
  return acc.value() * g.cell_volume();
}

Field3D speed(const ModelState& s) {
  Field3D f(s.grid());
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double a = s.u1.values()[n], b = s.u2.values()[n];
    f.values()[n] = std::sqrt(a * a + b * b);
  }
  return f;
}

double potential(const ModelState& s, double xi_floor) {
  const GridSpec& g = s.grid();
  CompensatedSum acc;
  for (double x : s.xi.values()) acc.add(relative_entropy_density(x, xi_floor));
  return acc.value() * g.cell_area() * g.h;
}

}  // namespace

double mass(const ModelState& s) {
  const GridSpec& g = s.grid();
  return sum(s.xi.values()) * g.cell_area() * g.h;
}

EnergyReport energy(const ModelState& s, const Params& p) {
  const GridSpec& g = s.grid();
  EnergyReport r;
  r.t = s.t;
  const Tensor2 S = strain(s.u1, s.u2);
  CompensatedSum kin, visc, fric;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = s.xi(i, j);
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t n = s.u1.index(i, j, k);
        const double a = s.u1.values()[n], b = s.u2.values()[n];
        const double q = a * a + b * b;
        kin.add(0.5 * xi * q);
        visc.add(xi * frob2(S, n));
        fric.add(xi * q * std::sqrt(q));
      }
    }
  const double dv = g.cell_volume();
  r.E = kin.value() * dv + p.kappa * potential(s, p.xi_floor);
  r.D_visc = 2.0 * p.nu * visc.value() * dv + p.nu * dzu_integral(s);
  r.D_fric = p.r * fric.value() * dv;
  return r;
}

Vec3D bd_velocity(const ModelState& s, const Params& p) {
  const GridSpec& g = s.grid();
  Field2D lnxi(g);
  for (std::size_t n = 0; n < lnxi.size(); ++n)
    lnxi.values()[n] = std::log(std::max(s.xi.values()[n], p.xi_floor));
  const Vec2D gl = grad_x(lnxi);
  Vec3D psi{s.u1, s.u2};
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k) {
        psi.c1(i, j, k) += 2.0 * p.nu * gl.c1(i, j);
        psi.c2(i, j, k) += 2.0 * p.nu * gl.c2(i, j);
      }
  return psi;
}

EntropyReport bd_entropy(const ModelState& s, const Params& p) {
  const GridSpec& g = s.grid();
  EntropyReport r;
  r.t = s.t;
  const Vec3D psi = bd_velocity(s, p);
  const Tensor2 A = vorticity(s.u1, s.u2);
  const Field3D wz = ddz_faces(s.w);
  const Vec2D dxi = grad_x(s.xi);
  Field2D sq(g);
  for (std::size_t n = 0; n < sq.size(); ++n) sq.values()[n] = std::sqrt(std::max(s.xi.values()[n], 0.0));
  const Vec2D dsq = grad_x(sq);

  CompensatedSum kin, dzw, vort, fric, cross;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = s.xi(i, j);
      for (int k = 0; k < g.nz; ++k) {
        const std::size_t n = s.u1.index(i, j, k);
        const double p1 = psi.c1.values()[n], p2 = psi.c2.values()[n];
        kin.add(0.5 * xi * (p1 * p1 + p2 * p2));
        const double wzn = wz.values()[n];
        dzw.add(xi * wzn * wzn);
        vort.add(xi * frob2(A, n));
        const double a = s.u1.values()[n], b = s.u2.values()[n];
        const double sp = std::sqrt(a * a + b * b);
        fric.add(xi * sp * sp * sp);
        cross.add(sp * (a * dxi.c1(i, j) + b * dxi.c2(i, j)));
      }
    }
  CompensatedSum gs;
  for (std::size_t n = 0; n < sq.size(); ++n) {
    const double a = dsq.c1.values()[n], b = dsq.c2.values()[n];
    gs.add(a * a + b * b);
  }
  const double dv = g.cell_volume();
  r.B = kin.value() * dv + p.kappa * potential(s, p.xi_floor);
  r.dzw = 2.0 * p.nu * dzw.value() * dv;
  r.vorticity = 2.0 * p.nu * vort.value() * dv;
  r.dzu = p.nu * dzu_integral(s);
  r.friction = p.r * fric.value() * dv;
  r.friction_cross = 2.0 * p.nu * p.r * cross.value() * dv;
  r.grad_sqrt_xi = 8.0 * p.nu * p.kappa * gs.value() * g.cell_area() * g.h;
  return r;
}

const std::array<const char*, norm_count>& NormReport::names() {
  static const std::array<const char*, norm_count> n = {
      "sqrt_xi_u_L2",   "xi13_u_L3",       "sqrt_xi_dzu_L2",
      "sqrt_xi_Du_L2",  "rel_entropy_L1",  "grad_sqrt_xi_L2",
      "sqrt_xi_dzw_L2", "sqrt_xi_Au_L2",   "sqrt_xi_w_L2"};
  return n;
}

NormReport estimate_norms(const ModelState& s, double xi_floor) {
  const GridSpec& g = s.grid();
  NormReport r;
  r.t = s.t;
  const Field3D xi3 = broadcast(s.xi);
  const FaceFieldZ xif = face_broadcast(s.xi);

  const Field3D sp = speed(s);
  r.values[0] = lp_norm(sp, 2.0, &xi3);
  r.values[1] = lp_norm(sp, 3.0, &xi3);

  FaceFieldZ dzu = dzu_squared(s);
  for (double& x : dzu.values()) x = std::sqrt(x);
  r.values[2] = lp_norm(dzu, 2.0, &xif);

  const Tensor2 S = strain(s.u1, s.u2);
  const Tensor2 A = vorticity(s.u1, s.u2);
  Field3D sn(g), an(g);
  for (std::size_t n = 0; n < sn.size(); ++n) {
    sn.values()[n] = std::sqrt(frob2(S, n));
    an.values()[n] = std::sqrt(frob2(A, n));
  }
  r.values[3] = lp_norm(sn, 2.0, &xi3);

  Field2D rel(g), sq(g);
  for (std::size_t n = 0; n < rel.size(); ++n) {
    const double x = s.xi.values()[n];
    rel.values()[n] = relative_entropy_density(x, xi_floor);
    sq.values()[n] = std::sqrt(std::max(x, 0.0));
  }
  r.values[4] = lp_norm(rel, 1.0);
  const Vec2D dsq = grad_x(sq);
  Field2D gm(g);
  for (std::size_t n = 0; n < gm.size(); ++n)
    gm.values()[n] = std::hypot(dsq.c1.values()[n], dsq.c2.values()[n]);
  r.values[5] = lp_norm(gm, 2.0);

  Field3D wz = ddz_faces(s.w);
  r.values[6] = lp_norm(wz, 2.0, &xi3);
  r.values[7] = lp_norm(an, 2.0, &xi3);
  r.values[8] = lp_norm(s.w, 2.0, &xif);
  return r;
}

std::vector<std::string> diagnostics_columns() {
  std::vector<std::string> c = {"t",      "dt", "E", "D_visc", "D_fric", "E_residual",
                                "B", "B_residual", "mass"};
  for (const char* n : NormReport::names()) c.emplace_back(n);
  c.emplace_back("xi_min");
  c.emplace_back("max_speed");
  c.emplace_back("floor_activations");
  return c;
}

namespace {

double max_speed(const ModelState& s) {
  double vmax = 0.0;
  for (std::size_t n = 0; n < s.u1.size(); ++n)
    vmax = std::max(vmax, std::hypot(s.u1.values()[n], s.u2.values()[n]));
  return vmax;
}

DiagnosticsRow make_row(const ModelState& s, const Params& p, const EnergyReport& e,
                        const EntropyReport& b) {
  DiagnosticsRow row;
  row.t = s.t;
  row.E = e.E;
  row.D_visc = e.D_visc;
  row.D_fric = e.D_fric;
  row.B = b.B;
  row.mass = mass(s);
  row.norms = estimate_norms(s, p.xi_floor).values;
  row.xi_min = s.xi.min();
  row.max_speed = max_speed(s);
  row.entropy = b;
  return row;
}

}  // namespace

RunResult run(const ModelState& initial, const Params& p, const SolverConfig& cfg,
              const SourceFn& source, const RunObserver& observer) {
  p.validate();
  cfg.validate();
  initial.grid().validate();

  RunResult res;
  ModelState s = initial;
  rediagnose(s, p.xi_floor);
  check_finite(s, 0);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  EnergyReport e0 = energy(s, p);
  EntropyReport b0 = bd_entropy(s, p);

  auto emit = [&](DiagnosticsRow row, const ModelState& st) {
    if (observer.on_row) observer.on_row(row, st);
    res.rows.push_back(std::move(row));
    if (cfg.keep_snapshots) res.snapshots.push_back(st);
  };

  {
    DiagnosticsRow row = make_row(s, p, e0, b0);
    row.E_residual = nan;
    row.B_residual = nan;
    emit(std::move(row), s);
  }

  // Value and integrated dissipation at the last emitted row.
  double t_row = s.t, E_row = e0.E, B_row = b0.B;
  CompensatedSum e_int, b_int;
  double e_rate = e0.D_visc + e0.D_fric;
  double b_rate = b0.total_rate();

  const double t_end = cfg.t_end;
  const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
  long n = 0;
  double last_dt = 0.0;
  while (s.t < t_end - eps_t) {
    double dt = cfg.dt > 0.0 ? cfg.dt : cfl_dt(s, p, cfg.cfl);
    if (s.t + dt > t_end - eps_t) dt = t_end - s.t;
    ++n;
    StepInfo info;
    ModelState next = step(s, p, dt, source, &info, n);
    next.t = (s.t + dt > t_end - eps_t) ? t_end : s.t + dt;
    res.floor_activations += info.floor_activations;
    last_dt = dt;

    const double vmax = max_speed(next);
    if (vmax > 0.0) res.max_top_w_ratio = std::max(res.max_top_w_ratio, next.w.max_abs_top() / vmax);

    s = std::move(next);
    if (observer.on_step) observer.on_step(s, n);

    const bool last = !(s.t < t_end - eps_t);
    const bool dump = last || n % cfg.dump_every == 0;
    if (!cfg.track_balance && !dump) continue;

    const EnergyReport e = energy(s, p);
    const EntropyReport b = bd_entropy(s, p);
    if (cfg.track_balance) {
      const double er = e.D_visc + e.D_fric;
      const double br = b.total_rate();
      e_int.add(0.5 * dt * (e_rate + er));
      b_int.add(0.5 * dt * (b_rate + br));
      e_rate = er;
      b_rate = br;
    }
    if (!dump) continue;

    DiagnosticsRow row = make_row(s, p, e, b);
    row.dt = last_dt;
    row.floor_activations = res.floor_activations;
    const double span = s.t - t_row;
    if (cfg.track_balance && span > 0.0) {
      row.E_residual = std::abs((e.E - E_row) / span + e_int.value() / span);
      row.B_residual = std::abs((b.B - B_row) / span + b_int.value() / span);
    } else {
      row.E_residual = nan;
      row.B_residual = nan;
    }
    emit(std::move(row), s);
    t_row = s.t;
    E_row = e.E;
    B_row = b.B;
    e_int = CompensatedSum();
    b_int = CompensatedSum();
  }
  res.steps = n;
  res.final_state = std::move(s);
  return res;
}

ConvergenceTable stability_study(const ModelState& reference, const Params& p,
                                 const SolverConfig& cfg,
                                 const std::vector<ModelState>& perturbed,
                                 const std::vector<double>& deltas) {
  p.validate();
  cfg.validate();
  if (perturbed.empty()) throw std::invalid_argument("stability_study: no perturbed data");
  if (perturbed.size() != deltas.size())
    throw std::invalid_argument("stability_study: one delta per perturbed datum");
  for (const ModelState& m : perturbed)
    if (!m.grid().same_shape(reference.grid()))
      throw std::invalid_argument("stability_study: grid mismatch");

  ModelState ref = reference;
  rediagnose(ref, p.xi_floor);
  std::vector<ModelState> runs = perturbed;
  for (ModelState& m : runs) rediagnose(m, p.xi_floor);

  ConvergenceTable table;
  double dt = cfg.dt;
  if (!(dt > 0.0)) {
    dt = cfl_dt(ref, p, cfg.cfl);
    for (const ModelState& m : runs) dt = std::min(dt, cfl_dt(m, p, cfg.cfl));
    dt *= 0.8;
  }
  table.dt = dt;

  const GridSpec& g = ref.grid();
  const std::size_t N = runs.size();
  std::vector<double> sup_xi(N, 0.0), l2_sq(N, 0.0), l1(N, 0.0), m0(N);
  std::vector<double> prev_u(N), prev_m(N);

  auto distances = [&](const ModelState& a, double& dxi, double& du, double& dm) {
    Field2D d2(g);
    for (std::size_t n = 0; n < d2.size(); ++n)
      d2.values()[n] = a.xi.values()[n] - ref.xi.values()[n];
    dxi = lp_norm(d2, 1.5);
    Field3D fu(g), fm(g);
    for (int i = 0; i < g.nx1; ++i)
      for (int j = 0; j < g.nx2; ++j) {
        const double xa = a.xi(i, j), xr = ref.xi(i, j);
        const double sa = std::sqrt(std::max(xa, 0.0)), sr = std::sqrt(std::max(xr, 0.0));
        for (int k = 0; k < g.nz; ++k) {
          const double a1 = a.u1(i, j, k), a2 = a.u2(i, j, k);
          const double r1 = ref.u1(i, j, k), r2 = ref.u2(i, j, k);
          fu(i, j, k) = std::hypot(sa * a1 - sr * r1, sa * a2 - sr * r2);
          fm(i, j, k) = std::hypot(xa * a1 - xr * r1, xa * a2 - xr * r2);
        }
      }
    du = lp_norm(fu, 1.5);
    dm = lp_norm(fm, 1.0);
  };

  for (std::size_t r = 0; r < N; ++r) {
    double dx, du, dm;
    distances(runs[r], dx, du, dm);
    sup_xi[r] = dx;
    prev_u[r] = du;
    prev_m[r] = dm;
    m0[r] = mass(runs[r]);
  }

  const double t_end = cfg.t_end;
  const double eps_t = 1e-12 * std::max(1.0, std::abs(t_end));
  long n = 0;
  while (ref.t < t_end - eps_t) {
    double h = dt;
    if (ref.t + h > t_end - eps_t) h = t_end - ref.t;
    ++n;
    const double t_next = (ref.t + h > t_end - eps_t) ? t_end : ref.t + h;
    ref = step(ref, p, h, {}, nullptr, n);
    ref.t = t_next;
    for (std::size_t r = 0; r < N; ++r) {
      runs[r] = step(runs[r], p, h, {}, nullptr, n);
      runs[r].t = t_next;
      double dx, du, dm;
      distances(runs[r], dx, du, dm);
      sup_xi[r] = std::max(sup_xi[r], dx);
      l2_sq[r] += 0.5 * h * (prev_u[r] * prev_u[r] + du * du);
      l1[r] += 0.5 * h * (prev_m[r] + dm);
      prev_u[r] = du;
      prev_m[r] = dm;
    }
  }

  for (std::size_t r = 0; r < N; ++r) {
    StudyRow row;
    row.delta = deltas[r];
    row.sup_xi_l32 = sup_xi[r];
    row.l2t_sqrt_xi_u_l32 = std::sqrt(l2_sq[r]);
    row.l1t_xi_u_l1 = l1[r];
    row.mass_rel_diff = std::abs(mass(runs[r]) - m0[r]) / m0[r];
    if (r > 0) {
      const StudyRow& prev = table.rows.back();
      row.monotone = row.sup_xi_l32 <= prev.sup_xi_l32 &&
                     row.l2t_sqrt_xi_u_l32 <= prev.l2t_sqrt_xi_u_l32 &&
                     row.l1t_xi_u_l1 <= prev.l1t_xi_u_l1;
      const double ld = std::log2(prev.delta / row.delta);
      auto rate = [&](double a, double b) {
        return (a > 0.0 && b > 0.0 && ld != 0.0) ? std::log2(a / b) / ld
                                                 : std::numeric_limits<double>::quiet_NaN();
      };
      table.rates.push_back({rate(prev.sup_xi_l32, row.sup_xi_l32),
                             rate(prev.l2t_sqrt_xi_u_l32, row.l2t_sqrt_xi_u_l32),
                             rate(prev.l1t_xi_u_l1, row.l1t_xi_u_l1)});
    }
    table.monotone = table.monotone && row.monotone;
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace cpe
