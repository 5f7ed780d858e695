#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cpe/app.hpp"
#include "cpe/config.hpp"
#include "cpe/diagnostics.hpp"
#include "cpe/init.hpp"
#include "cpe/mms.hpp"
#include "cpe/nondim.hpp"
#include "cpe/transform.hpp"

using namespace cpe;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

GridSpec grid(int n1, int n2, int nz) {
  GridSpec g;
  g.nx1 = n1;
  g.nx2 = n2;
  g.nz = nz;
  return g;
}

double order(double coarse, double fine) { return std::log2(coarse / fine); }

// Worst top-face |w| / max|u| over every step and worst Poincare ratio
// ||sqrt(xi) w|| / (h ||sqrt(xi) dz w||) over every emitted row, across all runs.
struct Watch {
  double top_w = 0.0;
  double poincare = 0.0;
  long steps = 0;
  long rows = 0;

  RunObserver observer(std::function<void(const DiagnosticsRow&, const ModelState&)> extra = {}) {
    RunObserver o;
    o.on_step = [this](const ModelState& s, long) {
      const double u = std::max({s.u1.max_abs(), s.u2.max_abs(), 1e-300});
      top_w = std::max(top_w, s.w.max_abs_top() / u);
      ++steps;
    };
    o.on_row = [this, extra](const DiagnosticsRow& r, const ModelState& s) {
      const NormReport n = estimate_norms(s);
      if (n.sqrt_xi_dzw() > 0.0)
        poincare = std::max(poincare, n.sqrt_xi_w() / (s.grid().h * n.sqrt_xi_dzw()));
      ++rows;
      if (extra) extra(r, s);
    };
    return o;
  }
};

Watch watch;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const char* name, const std::function<Outcome()>& check) {
  const Clock::time_point t0 = Clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] AC%d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Params model(double nu, double r) {
  Params p;
  p.nu = nu;
  p.r = r;
  return p;
}

ModelState random_init(const GridSpec& g, const Params& p, std::uint64_t seed, double amp) {
  InitSpec in;
  in.profile = "random";
  in.seed = seed;
  in.xi_amplitude = 0.3;
  in.u_amplitude = amp;
  return initial_state(in, g, p);
}

double max_row(const RunResult& r, double DiagnosticsRow::*field) {
  double m = 0.0;
  for (std::size_t n = 1; n < r.rows.size(); ++n) m = std::max(m, r.rows[n].*field);
  return m;
}

Outcome ac1() {
  const Clock::time_point t0 = Clock::now();
  const std::vector<std::string> golden = {
      "horizontal-momentum/friction",
      "horizontal-momentum/horizontal-advection",
      "horizontal-momentum/horizontal-pressure-gradient",
      "horizontal-momentum/horizontal-strain-viscosity",
      "horizontal-momentum/time-derivative",
      "horizontal-momentum/vertical-advection",
      "horizontal-momentum/vertical-shear-viscosity",
      "mass/horizontal-mass-flux",
      "mass/time-derivative",
      "mass/vertical-mass-flux",
      "vertical-momentum/gravity",
      "vertical-momentum/vertical-pressure-gradient",
  };
  const std::vector<std::string> got = nondim::reduce_system(nondim::scale_terms(true));
  const double dt = seconds_since(t0);
  return {got == golden && dt < 1.0,
          fmt("%.0f terms, exact match %.0f, %.3f s", got.size(), got == golden, dt)};
}

Outcome ac2() {
  const Clock::time_point t0 = Clock::now();
  SolverConfig c;
  c.t_end = 0.1;
  c.dt = 0.004;
  const MmsStudy st = mms_study({grid(32, 32, 16), grid(64, 64, 32), grid(128, 128, 64)},
                                model(0.01, 0.05), c);
  bool ok = seconds_since(t0) < 300.0;
  std::string d;
  for (const auto& o : st.orders) {
    ok = ok && o[0] >= 1.8 && o[0] <= 2.2 && o[1] >= 1.8 && o[1] <= 2.2;
    d += fmt("xi %.3f u %.3f; ", o[0], o[1]);
  }
  return {ok, d + fmt("errors xi %.2e -> %.2e", st.levels.front().xi_error, st.levels.back().xi_error)};
}

Outcome ac3() {
  const GridSpec g = grid(32, 32, 8);
  const Params p = model(0.01, 0.05);
  SolverConfig c;
  c.dt = 2e-3;
  c.t_end = 1000 * c.dt;
  c.dump_every = 50;
  const RunResult r = run(random_init(g, p, 11, 0.5), p, c, {}, watch.observer());
  const double m0 = r.rows.front().mass;
  double drift = 0.0;
  for (const DiagnosticsRow& row : r.rows) drift = std::max(drift, std::abs(row.mass - m0) / m0);
  return {r.steps == 1000 && drift <= 1e-12, fmt("%.0f steps, max relative drift %.2e", r.steps, drift)};
}

Outcome ac4() {
  const GridSpec g = grid(16, 16, 8);
  const Params p = model(0.02, 0.2);
  const ModelState init = random_init(g, p, 4, 0.5);
  std::vector<double> res;
  bool decay = true;
  for (int level = 0; level < 3; ++level) {
    SolverConfig c;
    c.dt = 0.01 / (1 << level);
    c.t_end = 0.4;
    c.dump_every = 4 << level;
    const RunResult r = run(init, p, c, {}, watch.observer());
    decay = decay && r.rows.back().E <= r.rows.front().E;
    for (std::size_t n = 1; n < r.rows.size(); ++n)
      decay = decay && r.rows[n].E <= r.rows[n - 1].E * (1 + 1e-14);
    res.push_back(max_row(r, &DiagnosticsRow::E_residual));
  }
  const double o1 = order(res[0], res[1]), o2 = order(res[1], res[2]);
  return {decay && o1 >= 0.9 && o2 >= 0.9,
          fmt("E nonincreasing %.0f; residual %.2e -> %.2e, orders %.2f", decay, res[0], res[2], o1) +
              fmt(", %.2f", o2)};
}

Outcome ac5() {
  const Params p = model(0.02, 0.2);
  std::vector<double> res;
  double worst_sign = 0.0;
  for (int level = 0; level < 3; ++level) {
    const int f = 1 << level;
    const GridSpec g = grid(16 * f, 16 * f, 8 * f);
    InitSpec in;
    in.profile = "wave";
    in.xi_amplitude = 0.3;
    in.u_amplitude = 0.5;
    in.wavenumber = 1;
    SolverConfig c;
    c.dt = 0.01 / f;
    c.t_end = 0.2;
    c.dump_every = 4 * f;
    const RunResult r = run(initial_state(in, g, p), p, c, {},
                            watch.observer([&](const DiagnosticsRow& row, const ModelState&) {
                              const EntropyReport& e = row.entropy;
                              const double scale = std::max(
                                  {std::abs(e.B), e.dzw + e.vorticity + e.dzu + e.friction +
                                                      std::abs(e.friction_cross) + e.grad_sqrt_xi,
                                   1.0});
                              for (double v : {e.dzw, e.vorticity, e.dzu, e.friction, e.grad_sqrt_xi})
                                worst_sign = std::min(worst_sign, v / scale);
                            }));
    res.push_back(max_row(r, &DiagnosticsRow::B_residual));
  }
  const double o1 = order(res[0], res[1]), o2 = order(res[1], res[2]);
  return {o1 >= 0.9 && o2 >= 0.9 && worst_sign >= -1e-13,
          fmt("residual %.2e -> %.2e, orders %.2f, %.2f", res[0], res[2], o1, o2) +
              fmt("; most negative term / scale %.1e", worst_sign)};
}

Outcome ac6() {
  const Params p = model(0.02, 0.1);
  double strat = 0.0;
  std::vector<double> hydro, mass_res;
  for (int level = 0; level < 3; ++level) {
    const int f = 1 << level;
    const GridSpec g = grid(16 * f, 16 * f, 8 * f);
    InitSpec in;
    in.profile = "wave";
    in.xi_amplitude = 0.3;
    in.u_amplitude = 0.5;
    SolverConfig c;
    c.dt = 0.01 / f;
    c.t_end = 0.08;
    c.dump_every = 2;
    c.keep_snapshots = true;
    const RunResult r = run(initial_state(in, g, p), p, c, {}, watch.observer());
    std::vector<PhysicalState> ph;
    double h = 0.0;
    for (const ModelState& s : r.snapshots) {
      ph.push_back(model_to_physical(s, g));
      strat = std::max(strat, physical_to_model(ph.back()).stratification_residual / s.xi.max());
      h = std::max(h, hydrostatic_residual(ph.back()));
    }
    hydro.push_back(h);
    const std::size_t mid = 2 * f;
    if (std::abs(ph[mid].t - 0.04) > 1e-12) return {false, "snapshot times do not line up"};
    mass_res.push_back(physical_mass_residual(ph[mid - 1], ph[mid], ph[mid + 1]));
  }
  const double oh = order(hydro[1], hydro[2]), om = order(mass_res[1], mass_res[2]);
  const bool ok = strat <= 1e-13 && oh >= 1.8 && oh <= 2.2 && order(hydro[0], hydro[1]) >= 1.8 &&
                  om >= 1.8 && order(mass_res[0], mass_res[1]) >= 1.8;
  return {ok, fmt("stratification %.1e; hydrostatic order %.2f; mass residual %.2e, order %.2f", strat,
                  oh, mass_res[2], om)};
}

Outcome ac7() {
  return {watch.steps > 0 && watch.top_w <= 1e-13,
          fmt("worst |w_top| / max|u| %.1e over %.0f steps", watch.top_w, watch.steps)};
}

Outcome ac8() {
  const Clock::time_point t0 = Clock::now();
  const GridSpec g = grid(32, 32, 16);
  const Params p = model(0.02, 0.1);
  InitSpec in;
  in.profile = "wave";
  in.xi_amplitude = 0.2;
  in.u_amplitude = 0.5;
  const ModelState ref = initial_state(in, g, p);
  SolverConfig c;
  c.t_end = 0.5;
  std::vector<ModelState> pert;
  std::vector<double> deltas;
  for (int n = 1; n <= 5; ++n) {
    deltas.push_back(std::ldexp(1.0, -n));
    pert.push_back(perturb(ref, "xi", deltas.back(), p));
  }
  const ConvergenceTable t = stability_study(ref, p, c, pert, deltas);
  bool ok = seconds_since(t0) < 600.0;
  for (std::size_t n = 1; n < t.rows.size(); ++n)
    ok = ok && t.rows[n].sup_xi_l32 < t.rows[n - 1].sup_xi_l32 &&
         t.rows[n].l2t_sqrt_xi_u_l32 < t.rows[n - 1].l2t_sqrt_xi_u_l32;
  return {ok, fmt("sup xi distance %.2e -> %.2e, sqrt(xi)u distance %.2e -> %.2e",
                  t.rows.front().sup_xi_l32, t.rows.back().sup_xi_l32,
                  t.rows.front().l2t_sqrt_xi_u_l32, t.rows.back().l2t_sqrt_xi_u_l32)};
}

Outcome ac9() {
  return {watch.rows > 0 && watch.poincare <= 1.0,
          fmt("worst ratio / h %.3f over %.0f snapshots", watch.poincare, watch.rows)};
}

Outcome ac10() {
  const fs::path root = fs::temp_directory_path() / "cpe_acceptance";
  fs::remove_all(root);
  const std::string text =
      "grid.nx1 = 16\ngrid.nx2 = 16\ngrid.nz = 8\nsolver.t_end = 0.2\nparams.nu = 0.02\n"
      "params.r = 0.1\ninit.profile = random\ninit.seed = 5\ninit.u_amplitude = 0.5\n";
  std::string csv[2];
  for (int n = 0; n < 2; ++n) {
    const fs::path dir = root / ("run" + std::to_string(n));
    const RunConfig cfg = parse_config(text, {{"output.dir", dir.string()}});
    std::ostringstream sink;
    app::simulate(cfg, sink);
    std::ifstream in(dir / "diagnostics.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    csv[n] = ss.str();
  }
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt("%.0f bytes each, identical %.0f", csv[0].size(), same)};
}

}  // namespace

int main() {
  report(1, "scale audit golden", ac1);
  report(2, "manufactured convergence", ac2);
  report(3, "mass conservation", ac3);
  report(4, "energy inequality", ac4);
  report(5, "BD entropy balance", ac5);
  report(6, "formulation equivalence", ac6);
  report(7, "diagnostic w at the top face", ac7);
  report(8, "stability study", ac8);
  report(9, "Poincare bound", ac9);
  report(10, "determinism", ac10);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
