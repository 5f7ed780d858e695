#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cpe/diagnostics.hpp"
#include "cpe/operators.hpp"
#include "oracles.hpp"

using namespace cpe;
using oracle::grid;
constexpr double pi = std::numbers::pi;

namespace {

ModelState random_state(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  return make_state(oracle::random2d(g, gen, 0.5, 2.0), oracle::random3d(g, gen),
                    oracle::random3d(g, gen));
}

ModelState smooth(const GridSpec& g) {
  const Field2D xi = sample2d(g, [](double x1, double x2) {
    return 1.0 + 0.3 * std::sin(2 * pi * x1) * std::cos(2 * pi * x2);
  });
  const Field3D u1 = sample3d(g, [](double x1, double x2, double z) {
    return 0.5 * std::sin(2 * pi * x2) + 0.2 * std::cos(3 * z) * std::cos(2 * pi * x1);
  });
  const Field3D u2 = sample3d(g, [](double x1, double x2, double z) {
    return 0.3 * std::cos(2 * pi * x1) + 0.1 * z * std::sin(2 * pi * x2);
  });
  return make_state(xi, u1, u2);
}

// Straight long-double evaluation of the energy and its dissipation.
struct LongEnergy {
  long double E = 0, visc = 0, fric = 0;
};

LongEnergy long_energy(const ModelState& s, const Params& p) {
  const GridSpec& g = s.grid();
  LongEnergy r;
  const long double dv = static_cast<long double>(g.dx1()) * g.dx2() * g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const long double xi = s.xi(i, j);
      for (int k = 0; k < g.nz; ++k) {
        const long double a = s.u1(i, j, k), b = s.u2(i, j, k);
        const long double q = a * a + b * b;
        r.E += dv * (xi * q / 2 + p.kappa * (xi * std::log(xi) - xi + 1));
        r.fric += dv * p.r * xi * q * std::sqrt(q);
        auto d = [&](const Field3D& f, int dir) -> long double {
          return dir == 1 ? (static_cast<long double>(f.at(i + 1, j, k)) - f.at(i - 1, j, k)) / (2 * g.dx1())
                          : (static_cast<long double>(f.at(i, j + 1, k)) - f.at(i, j - 1, k)) / (2 * g.dx2());
        };
        const long double s11 = d(s.u1, 1), s22 = d(s.u2, 2);
        const long double s12 = (d(s.u1, 2) + d(s.u2, 1)) / 2;
        r.visc += dv * 2 * p.nu * xi * (s11 * s11 + s22 * s22 + 2 * s12 * s12);
        if (k > 0) {
          const long double za = (a - s.u1(i, j, k - 1)) / g.dz();
          const long double zb = (b - s.u2(i, j, k - 1)) / g.dz();
          r.visc += dv * p.nu * xi * (za * za + zb * zb);
        }
      }
    }
  return r;
}

}  // namespace

TEST_CASE("energy closed forms") {
  const GridSpec g = grid(8, 8, 4);
  CHECK(energy(ModelState::rest(g, 1.0), Params{}).E == 0.0);
  CHECK(energy(ModelState::rest(g, std::exp(1.0)), Params{}).E ==
        doctest::Approx(g.volume()).epsilon(1e-14));
  CHECK(mass(ModelState::rest(g, 2.0)) == doctest::Approx(2.0 * g.volume()).epsilon(1e-15));
}

TEST_CASE("energy matches a long-double quadrature oracle") {
  const GridSpec g = grid(12, 8, 5);
  Params p;
  p.r = 0.2;
  p.kappa = 1.7;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ModelState s = random_state(g, seed);
    const EnergyReport e = energy(s, p);
    const LongEnergy o = long_energy(s, p);
    CHECK(e.E >= 0.0);
    CHECK(e.D_visc >= 0.0);
    CHECK(e.D_fric >= 0.0);
    CHECK(std::abs(e.E - static_cast<double>(o.E)) <= 1e-12 * static_cast<double>(o.E));
    CHECK(std::abs(e.D_visc - static_cast<double>(o.visc)) <= 1e-12 * static_cast<double>(o.visc));
    CHECK(std::abs(e.D_fric - static_cast<double>(o.fric)) <= 1e-12 * static_cast<double>(o.fric));
  }
}

TEST_CASE("semi-discrete energy identity: dE/dt = -(D_visc + D_fric)") {
  const GridSpec g = grid(10, 8, 6);
  Params p;
  p.r = 0.3;
  p.nu = 0.02;
  p.kappa = 1.3;
  const ModelState s = random_state(g, 17);
  const Tendency k = rhs(s, p);
  // dE/dt = sum u . d(xi u)/dt + (kappa ln xi - |u|^2/2) d(xi)/dt
  CompensatedSum rate;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      const double xi = s.xi(i, j);
      for (int kk = 0; kk < g.nz; ++kk) {
        const double a = s.u1(i, j, kk), b = s.u2(i, j, kk);
        rate.add(a * k.m1(i, j, kk) + b * k.m2(i, j, kk) +
                 (p.kappa * std::log(xi) - 0.5 * (a * a + b * b)) * k.xi(i, j));
      }
    }
  const EnergyReport e = energy(s, p);
  const double dEdt = rate.value() * g.cell_volume();
  CHECK(std::abs(dEdt + e.D_visc + e.D_fric) <= 1e-11 * (e.D_visc + e.D_fric));
}

TEST_CASE("vorticity") {
  const GridSpec g = grid(16, 16, 2);
  const Field2D phi = sample2d(g, [](double x1, double x2) {
    return std::sin(2 * pi * x1) * std::cos(4 * pi * x2) + std::cos(2 * pi * x2);
  });
  const Vec3D gp{broadcast(grad_x(phi).c1), broadcast(grad_x(phi).c2)};
  const Tensor2 A0 = vorticity(gp.c1, gp.c2);
  CHECK(A0.a12.max_abs() < 1e-12);

  std::mt19937_64 gen(6);
  const Field3D r1 = oracle::random3d(g, gen), r2 = oracle::random3d(g, gen);
  const Tensor2 Ar = vorticity(r1, r2);
  for (std::size_t n = 0; n < r1.size(); ++n) {
    CHECK(Ar.a12.values()[n] + Ar.a21.values()[n] == 0.0);
    CHECK(Ar.a11.values()[n] == 0.0);
  }
  const Tensor2 Sr = strain(r1, r2);
  for (std::size_t n = 0; n < r1.size(); ++n) CHECK(Sr.a12.values()[n] == Sr.a21.values()[n]);

  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GridSpec h = grid(n, n, 2);
    const Field3D u1 = sample3d(h, [](double, double x2, double) { return -std::sin(2 * pi * x2); });
    const Field3D u2 = sample3d(h, [](double x1, double, double) { return std::sin(2 * pi * x1); });
    const Tensor2 A = vorticity(u1, u2);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double exact =
            0.5 * (-2 * pi * std::cos(2 * pi * h.x2_center(j)) - 2 * pi * std::cos(2 * pi * h.x1_center(i)));
        err = std::max(err, std::abs(A.a12(i, j, 1) - exact));
      }
    if (prev > 0.0) CHECK(oracle::order(prev, err) == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("BD entropy reduces to the energy for uniform density") {
  const GridSpec g = grid(8, 8, 4);
  std::mt19937_64 gen(12);
  const ModelState s = make_state(Field2D(g, 1.0), oracle::random3d(g, gen), oracle::random3d(g, gen));
  Params p;
  p.r = 0.1;
  const Vec3D psi = bd_velocity(s, p);
  for (std::size_t n = 0; n < s.u1.size(); ++n) CHECK(psi.c1.values()[n] == s.u1.values()[n]);
  CHECK(bd_entropy(s, p).B == doctest::Approx(energy(s, p).E).epsilon(1e-14));
  CHECK(bd_entropy(s, p).grad_sqrt_xi == 0.0);
  CHECK(bd_entropy(s, p).friction_cross == 0.0);
}

TEST_CASE("BD entropy of a resting exponential profile converges to the quadrature value") {
  Params p;
  p.nu = 0.05;
  p.kappa = 1.5;
  const double nu = p.nu;
  // B = lx2 h int_0^1 [xi |psi|^2 / 2 + kappa (xi ln xi - xi + 1)] dx1, xi = exp(cos 2 pi x1)
  const GridSpec g0 = grid(8, 8, 4);
  const double exact = g0.lx2 * g0.h * oracle::gauss(
      [&](double x) {
        const double c = std::cos(2 * pi * x), xi = std::exp(c);
        const double psi = 2 * nu * (-2 * pi * std::sin(2 * pi * x));
        return xi * psi * psi / 2 + p.kappa * (xi * c - xi + 1);
      },
      0.0, 1.0, 64);
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const GridSpec g = grid(n, 4, 2);
    const Field2D xi = sample2d(g, [](double x1, double) { return std::exp(std::cos(2 * pi * x1)); });
    const ModelState s = make_state(xi, Field3D(g), Field3D(g));
    const Vec3D psi = bd_velocity(s, p);
    double perr = 0.0;
    for (int i = 0; i < n; ++i)
      perr = std::max(perr, std::abs(psi.c1(i, 0, 0) - 2 * nu * (-2 * pi * std::sin(2 * pi * g.x1_center(i)))));
    CHECK(perr < 40 * nu / (n * n) * 4 * pi * pi);
    CHECK(psi.c2.max_abs() < 1e-15);
    const double err = std::abs(bd_entropy(s, p).B - exact);
    if (prev > 0.0) CHECK(oracle::order(prev, err) >= 1.9);
    prev = err;
  }
}

TEST_CASE("BD terms that are nonnegative in theory stay nonnegative") {
  const GridSpec g = grid(8, 8, 6);
  Params p;
  p.r = 0.4;
  for (std::uint64_t seed : {4u, 5u}) {
    const EntropyReport b = bd_entropy(random_state(g, seed), p);
    CHECK(b.dzw >= 0.0);
    CHECK(b.vorticity >= 0.0);
    CHECK(b.dzu >= 0.0);
    CHECK(b.friction >= 0.0);
    CHECK(b.grad_sqrt_xi >= 0.0);
    CHECK(b.B >= 0.0);
  }
}

TEST_CASE("norm report") {
  const GridSpec g = grid(8, 8, 4);
  const NormReport z = estimate_norms(ModelState::rest(g, 1.0));
  for (double v : z.values) CHECK(v == 0.0);

  const ModelState s = smooth(g);
  ModelState twice = s;
  for (double& v : twice.u1.values()) v *= 2;
  for (double& v : twice.u2.values()) v *= 2;
  rediagnose(twice, 1e-10);
  const NormReport a = estimate_norms(s), b = estimate_norms(twice);
  CHECK(b.values[0] == doctest::Approx(2 * a.values[0]).epsilon(1e-14));
  CHECK(b.values[1] == doctest::Approx(2 * a.values[1]).epsilon(1e-14));
  for (double v : a.values) CHECK(v >= 0.0);
  CHECK(a.values[4] == doctest::Approx(energy(s, Params{}).E - 0.5 * a.values[0] * a.values[0]).epsilon(1e-12));

  for (int n : {8, 16, 32}) {
    const ModelState r = random_state(grid(8, 8, n), 3);
    const NormReport q = estimate_norms(r);
    CHECK(q.sqrt_xi_w() <= r.grid().h * q.sqrt_xi_dzw());
  }
  CHECK(NormReport::names().size() == 9);
  CHECK(diagnostics_columns().size() == 9 + 9 + 3);
}

TEST_CASE("run: t_end = 0 gives one row; rows are deterministic") {
  const GridSpec g = grid(8, 8, 4);
  Params p;
  p.r = 0.1;
  SolverConfig c;
  c.t_end = 0.0;
  const RunResult r0 = run(smooth(g), p, c);
  CHECK(r0.rows.size() == 1);
  CHECK(r0.steps == 0);
  CHECK(std::isnan(r0.rows[0].E_residual));
  CHECK(r0.final_state.t == 0.0);

  c.t_end = 0.05;
  c.dump_every = 2;
  c.keep_snapshots = true;
  std::vector<double> seen;
  RunObserver obs;
  obs.on_row = [&](const DiagnosticsRow& row, const ModelState&) { seen.push_back(row.t); };
  const RunResult a = run(smooth(g), p, c, {}, obs);
  const RunResult b = run(smooth(g), p, c);
  CHECK(a.final_state.t == 0.05);
  CHECK(seen.size() == a.rows.size());
  CHECK(a.snapshots.size() == a.rows.size());
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t n = 0; n < a.rows.size(); ++n) {
    CHECK(a.rows[n].E == b.rows[n].E);
    CHECK(a.rows[n].norms == b.rows[n].norms);
  }
  for (std::size_t n = 1; n < a.rows.size(); ++n) {
    CHECK(a.rows[n].E <= a.rows[n - 1].E);
    CHECK(a.rows[n].E_residual >= 0.0);
  }
}

TEST_CASE("stability study bookkeeping") {
  const GridSpec g = grid(8, 8, 4);
  Params p;
  p.r = 0.1;
  SolverConfig c;
  c.t_end = 0.05;
  const ModelState ref = smooth(g);

  const ConvergenceTable zero = stability_study(ref, p, c, {ref}, {0.5});
  CHECK(zero.rows[0].sup_xi_l32 == 0.0);
  CHECK(zero.rows[0].l2t_sqrt_xi_u_l32 == 0.0);
  CHECK(zero.rows[0].l1t_xi_u_l1 == 0.0);

  std::vector<ModelState> pert;
  std::vector<double> deltas;
  for (int n = 1; n <= 3; ++n) {
    const double d = std::ldexp(1.0, -n);
    ModelState m = ref;
    for (int i = 0; i < g.nx1; ++i)
      for (int j = 0; j < g.nx2; ++j)
        for (int k = 0; k < g.nz; ++k) m.u1(i, j, k) += d * std::sin(2 * pi * g.x2_center(j));
    pert.push_back(m);
    deltas.push_back(d);
  }
  const ConvergenceTable t = stability_study(ref, p, c, pert, deltas);
  CHECK(t.rows.size() == 3);
  CHECK(t.rates.size() == 2);
  for (const StudyRow& r : t.rows) CHECK(r.mass_rel_diff < 1e-14);
  const double m0 = mass(ref);
  CHECK(m0 > 0.0);

  CHECK_THROWS_AS(stability_study(ref, p, c, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(stability_study(ref, p, c, pert, {0.5}), std::invalid_argument);
}
