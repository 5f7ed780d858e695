#include "cpe/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "cpe/diagnostics.hpp"
#include "cpe/init.hpp"
#include "cpe/io.hpp"
#include "cpe/mms.hpp"
#include "cpe/nondim.hpp"
#include "cpe/transform.hpp"

namespace cpe::app {

namespace {

std::string prepare_dir(const RunConfig& cfg) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + cfg.output_dir + "': " + ec.message());
  return cfg.output_dir;
}

std::string line(const char* fmt, double a = 0, double b = 0, double c = 0, double d = 0,
                 double e = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c, d, e);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw IoError("write failed: '" + path + "'");
}

}  // namespace

void simulate(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  write_text(dir + "/config.txt", serialize(cfg));
  const ModelState init = initial_state(cfg.init, cfg.grid, cfg.params);

  CsvWriter csv(dir + "/diagnostics.csv", diagnostics_columns());
  RunObserver obs;
  obs.on_row = [&](const DiagnosticsRow& r, const ModelState&) { csv.row(row_values(r)); };
  const RunResult res = run(init, cfg.params, cfg.solver, {}, obs);
  write_dump(dir + "/final.cpe1", state_dump(res.final_state));

  const DiagnosticsRow& first = res.rows.front();
  const DiagnosticsRow& last = res.rows.back();
  out << "steps " << res.steps << ", rows " << res.rows.size() << "\n";
  out << line("t = %.6g  E: %.9g -> %.9g  mass drift %.3e\n", last.t, first.E, last.E,
              std::abs(last.mass - first.mass) / first.mass);
  out << line("xi_min %.6g  max|w_top|/max|u| %.3e  floor activations %.0f\n", last.xi_min,
              res.max_top_w_ratio, static_cast<double>(res.floor_activations));
}

void mms(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  std::vector<GridSpec> grids{cfg.grid};
  for (int l = 1; l < cfg.mms.levels; ++l) grids.push_back(grids.back().refined(2));
  const MmsStudy st = mms_study(grids, cfg.params, cfg.solver);

  CsvWriter csv(dir + "/mms.csv",
                {"nx1", "nx2", "nz", "steps", "xi_error", "u_error", "xi_order", "u_order"});
  const double nan = std::nan("");
  out << "    nx1    nx2     nz  steps      xi_error       u_error  xi_order  u_order\n";
  for (std::size_t n = 0; n < st.levels.size(); ++n) {
    const MmsLevel& l = st.levels[n];
    const double oxi = n ? st.orders[n - 1][0] : nan;
    const double ou = n ? st.orders[n - 1][1] : nan;
    csv.row({double(l.grid.nx1), double(l.grid.nx2), double(l.grid.nz), double(l.steps),
             l.xi_error, l.u_error, oxi, ou});
    char buf[200];
    std::snprintf(buf, sizeof buf, "%7d%7d%7d%7ld  %12.5e  %12.5e  %8.3f %8.3f\n", l.grid.nx1,
                  l.grid.nx2, l.grid.nz, l.steps, l.xi_error, l.u_error, oxi, ou);
    out << buf;
  }
  out << line("observed order (finest pair): xi %.3f  u %.3f\n", st.orders.back()[0],
              st.orders.back()[1]);
}

void study(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  const ModelState ref = initial_state(cfg.init, cfg.grid, cfg.params);
  std::vector<ModelState> runs;
  std::vector<double> deltas;
  for (int n = 1; n <= cfg.study.count; ++n) {
    const double delta = cfg.study.base_amplitude * std::ldexp(1.0, -n);
    deltas.push_back(delta);
    runs.push_back(perturb(ref, cfg.study.field, delta, cfg.params));
  }
  const ConvergenceTable t = stability_study(ref, cfg.params, cfg.solver, runs, deltas);

  CsvWriter csv(dir + "/study.csv", {"delta", "sup_xi_L32", "L2t_sqrt_xi_u_L32", "L1t_xi_u_L1",
                                     "mass_rel_diff", "monotone"});
  out << line("fixed dt %.6g\n", t.dt);
  out << "       delta    sup|xi|_3/2  L2t|sqrt(xi)u|_3/2    L1t|xi u|_1   mass diff\n";
  for (const StudyRow& r : t.rows) {
    csv.row({r.delta, r.sup_xi_l32, r.l2t_sqrt_xi_u_l32, r.l1t_xi_u_l1, r.mass_rel_diff,
             r.monotone ? 1.0 : 0.0});
    char buf[200];
    std::snprintf(buf, sizeof buf, "%12.5e  %13.5e  %18.5e  %13.5e  %10.3e%s\n", r.delta,
                  r.sup_xi_l32, r.l2t_sqrt_xi_u_l32, r.l1t_xi_u_l1, r.mass_rel_diff,
                  r.monotone ? "" : "  NON-MONOTONE");
    out << buf;
  }
  for (const auto& r : t.rates) out << line("rates %.3f %.3f %.3f\n", r[0], r[1], r[2]);
  out << (t.monotone ? "monotone decrease: yes\n" : "monotone decrease: no\n");
}

bool scale_audit(const std::optional<RunConfig>& cfg, std::ostream& out) {
  using namespace nondim;
  DimensionlessNumbers d;
  if (cfg && cfg->scales) {
    d = dimensionless_numbers(cfg->scales->scale_set());
    const RegimeCoefficients rc = regime_coefficients(d);
    out << line("eps %.6g  Fr %.6g  Ma %.6g\n", d.eps, d.Fr, d.Ma);
    out << line("Re1 %.6g  Re2 %.6g  Re3 %.6g  Re_lambda %.6g\n", d.Re1, d.Re2, d.Re3,
                d.Re_lambda);
    out << line("nu1 %.6g  nu2 %.6g  nu3 %.6g  gamma %.6g\n", rc.nu1, rc.nu2, rc.nu3, rc.gamma);
  }
  const std::vector<TermScale> terms = scale_terms(d, true);
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-34s %-22s %5s  %s\n", "equation", "term", "coefficient",
                "order", "kept");
  out << buf;
  for (const TermScale& t : terms) {
    std::snprintf(buf, sizeof buf, "%-20s %-34s %-22s %5d  %s\n", to_string(t.equation).c_str(),
                  t.term_id.c_str(), t.coefficient.str().c_str(), t.eps_order,
                  t.eps_order == 0 ? "yes" : "no");
    out << buf;
  }
  const std::vector<std::string> kept = reduce_system(terms);
  out << "reduced system (" << kept.size() << " terms):\n";
  for (const std::string& k : kept) out << "  " << k << "\n";
  const bool match = kept == canonical_reduced_system();
  out << (match ? "matches the simplified system: yes\n" : "matches the simplified system: no\n");
  return match;
}

void transform_check(const RunConfig& cfg, std::ostream& out) {
  const std::string dir = prepare_dir(cfg);
  const ModelState init = initial_state(cfg.init, cfg.grid, cfg.params);
  SolverConfig sc = cfg.solver;
  sc.keep_snapshots = true;
  const RunResult res = run(init, cfg.params, sc);

  std::vector<PhysicalState> phys;
  for (const ModelState& s : res.snapshots) phys.push_back(model_to_physical(s, cfg.grid));

  CsvWriter csv(dir + "/transform.csv",
                {"t", "stratification_rel", "hydrostatic", "physical_mass"});
  double strat_max = 0.0, hydro_max = 0.0, mass_max = 0.0;
  for (std::size_t n = 0; n < phys.size(); ++n) {
    const Recovered back = physical_to_model(phys[n]);
    const double strat = back.stratification_residual / res.snapshots[n].xi.max();
    const double hydro = hydrostatic_residual(phys[n]);
    double m = std::nan("");
    if (n > 0 && n + 1 < phys.size()) {
      m = physical_mass_residual(phys[n - 1], phys[n], phys[n + 1]);
      mass_max = std::max(mass_max, m);
    }
    strat_max = std::max(strat_max, strat);
    hydro_max = std::max(hydro_max, hydro);
    csv.row({phys[n].t, strat, hydro, m});
  }
  out << "snapshots " << phys.size() << "\n";
  out << line("max stratification residual / max xi  %.3e\n", strat_max);
  out << line("max hydrostatic residual              %.3e\n", hydro_max);
  out << line("max physical mass residual            %.3e\n", mass_max);
}

}  // namespace cpe::app
