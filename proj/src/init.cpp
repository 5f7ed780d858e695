#include "cpe/init.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cpe/io.hpp"

namespace cpe {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double unit(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// Sum of cosine modes with |m1|, |m2| <= k (the mean mode excluded),
// random amplitudes and phases, scaled to max |f| = 1 on the grid.
Field2D random_modes(const GridSpec& g, int k, std::mt19937_64& gen) {
  struct Mode {
    int m1, m2;
    double a, phase;
  };
  std::vector<Mode> modes;
  for (int m1 = -k; m1 <= k; ++m1)
    for (int m2 = 0; m2 <= k; ++m2) {
      if (m2 == 0 && m1 <= 0) continue;
      const double a = 2.0 * unit(gen) - 1.0;
      const double phase = two_pi * unit(gen);
      modes.push_back({m1, m2, a, phase});
    }
  Field2D f = sample2d(g, [&](double x1, double x2) {
    double v = 0.0;
    for (const Mode& m : modes)
      v += m.a * std::cos(two_pi * (m.m1 * x1 / g.lx1 + m.m2 * x2 / g.lx2) + m.phase);
    return v;
  });
  const double peak = f.max_abs();
  if (peak > 0.0)
    for (double& v : f.values()) v /= peak;
  return f;
}

}  // namespace

ModelState initial_state(const InitSpec& init, const GridSpec& g, const Params& p) {
  g.validate();
  if (init.profile == "rest") return ModelState::rest(g, 1.0);
  if (init.profile == "dump") return state_from_dump(read_dump(init.path), g, p.xi_floor);

  const double Ax = init.xi_amplitude, Au = init.u_amplitude;
  const double K1 = two_pi * init.wavenumber / g.lx1;
  const double K2 = two_pi * init.wavenumber / g.lx2;
  const double M = std::numbers::pi / g.h;

  if (init.profile == "wave") {
    const Field2D xi = sample2d(g, [&](double x1, double x2) {
      return 1.0 + Ax * std::sin(K1 * x1) * std::cos(K2 * x2);
    });
    const Field3D u1 = sample3d(g, [&](double x1, double x2, double z) {
      return Au * (std::sin(K2 * x2) + 0.5 * std::cos(K1 * x1) * std::cos(M * z));
    });
    const Field3D u2 = sample3d(g, [&](double x1, double x2, double z) {
      return Au * (std::cos(K1 * x1) + 0.5 * std::sin(K2 * x2) * std::cos(M * z));
    });
    return make_state(xi, u1, u2, p.xi_floor);
  }

  if (init.profile == "random") {
    std::mt19937_64 gen(init.seed);
    const int k = init.wavenumber;
    Field2D xi = random_modes(g, k, gen);
    for (double& v : xi.values()) v = 1.0 + Ax * v;
    const Field2D a1 = random_modes(g, k, gen), a2 = random_modes(g, k, gen);
    const Field2D b1 = random_modes(g, k, gen), b2 = random_modes(g, k, gen);
    Field3D u1(g), u2(g);
    for (int i = 0; i < g.nx1; ++i)
      for (int j = 0; j < g.nx2; ++j)
        for (int kk = 0; kk < g.nz; ++kk) {
          const double c = std::cos(M * g.z_center(kk));
          u1(i, j, kk) = Au * (a1(i, j) + 0.5 * b1(i, j) * c);
          u2(i, j, kk) = Au * (a2(i, j) + 0.5 * b2(i, j) * c);
        }
    return make_state(xi, u1, u2, p.xi_floor);
  }
  throw std::invalid_argument("init.profile: unknown profile '" + init.profile + "'");
}

ModelState perturb(const ModelState& s, const std::string& field, double delta,
                   const Params& p) {
  const GridSpec& g = s.grid();
  const Field2D phi = sample2d(g, [&](double x1, double x2) {
    return std::sin(two_pi * x1 / g.lx1) * std::sin(two_pi * x2 / g.lx2);
  });
  ModelState out = s;
  if (field == "xi") {
    for (std::size_t n = 0; n < phi.size(); ++n)
      out.xi.values()[n] *= 1.0 + 0.5 * delta * phi.values()[n];
  } else if (field == "u") {
    for (int i = 0; i < g.nx1; ++i)
      for (int j = 0; j < g.nx2; ++j)
        for (int k = 0; k < g.nz; ++k) out.u1(i, j, k) += delta * phi(i, j);
  } else {
    throw std::invalid_argument("perturb: field must be xi or u");
  }
  rediagnose(out, p.xi_floor);
  return out;
}

}  // namespace cpe
