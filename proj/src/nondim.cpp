#include "cpe/nondim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cpe::nondim {

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); }

Coefficient one() { return Coefficient{}; }

Coefficient mono(std::initializer_list<std::pair<Symbol, int>> powers, int factor = 1) {
  Coefficient c;
  c.factor = factor;
  for (auto [s, p] : powers) c.exponents[static_cast<std::size_t>(s)] += p;
  return c;
}

const char* symbol_name(Symbol s) {
  switch (s) {
    case Symbol::eps: return "eps";
    case Symbol::Re1: return "Re1";
    case Symbol::Re2: return "Re2";
    case Symbol::Re3: return "Re3";
    case Symbol::Re_lambda: return "Re_lambda";
    case Symbol::Ma: return "Ma";
    case Symbol::Fr: return "Fr";
    case Symbol::nu1: return "nu1";
    case Symbol::nu2: return "nu2";
    case Symbol::nu3: return "nu3";
    case Symbol::gamma: return "gamma";
  }
  return "?";
}

// Regime substitution: mu_1/Re_1 = nu_1, mu_i/Re_i = eps^2 nu_i, lambda/Re_lambda = eps^2 gamma.
Coefficient substitute_regime(const Coefficient& c) {
  Coefficient out = c;
  auto replace = [&](Symbol re, Symbol nu, int eps_power) {
    const int p = c.power(re);
    if (p == 0) return;
    if (p != -1) throw std::logic_error("regime substitution expects a single 1/Re factor");
    out.exponents[static_cast<std::size_t>(re)] = 0;
    out = out.times(nu, 1).times(Symbol::eps, eps_power);
  };
  replace(Symbol::Re1, Symbol::nu1, 0);
  replace(Symbol::Re2, Symbol::nu2, 2);
  replace(Symbol::Re3, Symbol::nu3, 2);
  replace(Symbol::Re_lambda, Symbol::gamma, 2);
  return out;
}

struct RawTerm {
  Equation eq;
  const char* id;
  const char* form;
  Coefficient coef;
};

// Coefficients as displayed in the non-dimensional thin-layer system; the
// vertical momentum entries already carry the eps^2 normalization.
std::vector<RawTerm> raw_terms() {
  using S = Symbol;
  const Equation m = Equation::mass, h = Equation::horizontal_momentum,
                 v = Equation::vertical_momentum;
  return {
      {m, "time-derivative", "dt(rho)", one()},
      {m, "horizontal-mass-flux", "div_x(rho u)", one()},
      {m, "vertical-mass-flux", "dy(rho v)", one()},

      {h, "time-derivative", "dt(rho u)", one()},
      {h, "horizontal-advection", "div_x(rho u (x) u)", one()},
      {h, "vertical-advection", "dy(rho v u)", one()},
      {h, "horizontal-pressure-gradient", "grad_x(rho)", mono({{S::Ma, -2}})},
      {h, "horizontal-strain-viscosity", "div_x(mu1 D_x(u))", mono({{S::Re1, -1}})},
      {h, "vertical-shear-viscosity", "dy(mu2 dy(u))", mono({{S::Re2, -1}, {S::eps, -2}})},
      {h, "cross-shear-viscosity", "dy(mu2 grad_x(v))", mono({{S::Re2, -1}})},
      {h, "bulk-viscosity-divergence", "grad_x(lambda div_x(u))", mono({{S::Re_lambda, -1}})},
      {h, "bulk-viscosity-vertical-stretch", "grad_x(lambda dy(v))", mono({{S::Re_lambda, -1}})},
      {h, "friction", "-r rho |u| u", mono({}, -1)},

      {v, "time-derivative", "dt(rho v)", mono({{S::eps, 2}})},
      {v, "horizontal-advection", "div_x(rho u v)", mono({{S::eps, 2}})},
      {v, "vertical-advection", "dy(rho v^2)", mono({{S::eps, 2}})},
      {v, "vertical-pressure-gradient", "dy(rho)", mono({{S::Ma, -2}})},
      {v, "gravity", "rho", mono({{S::Fr, -2}}, -1)},
      {v, "shear-viscosity", "div_x(mu3 dy(u))", mono({{S::Re3, -1}})},
      {v, "cross-shear-viscosity", "div_x(mu3 grad_x(v))", mono({{S::Re3, -1}, {S::eps, 2}})},
      {v, "normal-viscosity", "dy(mu3 dy(v))", mono({{S::Re3, -1}}, 2)},
      {v, "bulk-viscosity-divergence", "dy(lambda div_x(u))", mono({{S::Re_lambda, -1}})},
      {v, "bulk-viscosity-vertical-stretch", "dy(lambda dy(v))", mono({{S::Re_lambda, -1}})},
  };
}

}  // namespace

void ScaleSet::validate() const {
  const double all[] = {U, V, L, H, T, rho_bar, mu_bar_1, mu_bar_2, mu_bar_3, lambda_bar, c, g};
  for (double x : all)
    if (!(x > 0.0) || !std::isfinite(x))
      throw std::invalid_argument("scale set: every scale must be positive and finite");
  if (!close(T, L / U)) throw std::invalid_argument("scale set: T must equal L/U");
  if (!close(H / L, V / U)) throw std::invalid_argument("scale set: H/L must equal V/U");
}

ScaleSet ScaleSet::from_horizontal(double U, double L, double H, double rho_bar, double mu1,
                                   double mu2, double mu3, double lambda, double c, double g) {
  ScaleSet s;
  s.U = U;
  s.L = L;
  s.H = H;
  s.V = U * H / L;
  s.T = L / U;
  s.rho_bar = rho_bar;
  s.mu_bar_1 = mu1;
  s.mu_bar_2 = mu2;
  s.mu_bar_3 = mu3;
  s.lambda_bar = lambda;
  s.c = c;
  s.g = g;
  s.validate();
  return s;
}

DimensionlessNumbers dimensionless_numbers(const ScaleSet& s) {
  s.validate();
  DimensionlessNumbers d;
  d.Fr = s.U / std::sqrt(s.g * s.H);
  d.Re1 = s.rho_bar * s.U * s.L / s.mu_bar_1;
  d.Re2 = s.rho_bar * s.U * s.L / s.mu_bar_2;
  d.Re3 = s.rho_bar * s.U * s.L / s.mu_bar_3;
  d.Re_lambda = s.rho_bar * s.U * s.L / s.lambda_bar;
  d.Ma = s.U / s.c;
  d.eps = s.H / s.L;
  return d;
}

RegimeCoefficients regime_coefficients(const DimensionlessNumbers& d) {
  const double e2 = d.eps * d.eps;
  return {1.0 / d.Re1, 1.0 / (e2 * d.Re2), 1.0 / (e2 * d.Re3), 1.0 / (e2 * d.Re_lambda)};
}

std::string to_string(Equation e) {
  switch (e) {
    case Equation::mass: return "mass";
    case Equation::horizontal_momentum: return "horizontal-momentum";
    case Equation::vertical_momentum: return "vertical-momentum";
  }
  return "?";
}

Coefficient Coefficient::times(Symbol s, int p) const {
  Coefficient c = *this;
  c.exponents[static_cast<std::size_t>(s)] += p;
  return c;
}

Coefficient Coefficient::times(const Coefficient& o) const {
  Coefficient c = *this;
  c.factor *= o.factor;
  for (std::size_t n = 0; n < symbol_count; ++n) c.exponents[n] += o.exponents[n];
  return c;
}

std::string Coefficient::str() const {
  std::string out;
  if (factor == -1)
    out = "-";
  else if (factor != 1)
    out = std::to_string(factor);
  bool first = true;
  for (std::size_t n = 0; n < symbol_count; ++n) {
    const int p = exponents[n];
    if (p == 0) continue;
    if (!first || (factor != 1 && factor != -1)) out += "*";
    out += symbol_name(static_cast<Symbol>(n));
    if (p != 1) out += "^" + std::to_string(p);
    first = false;
  }
  if (first) out += (factor == 1 || factor == -1) ? "1" : "";
  return out;
}

std::string qualified_id(Equation e, const std::string& term_id) {
  return to_string(e) + "/" + term_id;
}

std::vector<TermScale> scale_terms(bool apply_regime) {
  std::vector<TermScale> out;
  for (const RawTerm& r : raw_terms()) {
    TermScale t;
    t.equation = r.eq;
    t.term_id = r.id;
    t.form = r.form;
    t.coefficient = apply_regime ? substitute_regime(r.coef) : r.coef;
    t.eps_order = t.coefficient.power(Symbol::eps);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<TermScale> scale_terms(const DimensionlessNumbers&, bool apply_regime) {
  return scale_terms(apply_regime);
}

std::vector<std::string> reduce_system(const std::vector<TermScale>& terms) {
  if (terms.empty()) throw std::invalid_argument("reduce_system: empty term list");
  std::set<Equation> seen;
  std::set<std::string> ids;
  for (const TermScale& t : terms) {
    seen.insert(t.equation);
    if (t.eps_order < 0)
      throw std::invalid_argument("reduce_system: term " + qualified_id(t.equation, t.term_id) +
                                  " has eps order " + std::to_string(t.eps_order) +
                                  "; apply the asymptotic regime first");
    if (!ids.insert(qualified_id(t.equation, t.term_id)).second)
      throw std::invalid_argument("reduce_system: duplicate term " +
                                  qualified_id(t.equation, t.term_id));
  }
  if (seen.size() != 3)
    throw std::invalid_argument("reduce_system: terms must cover mass, horizontal and vertical momentum");
  std::vector<std::string> kept;
  for (const TermScale& t : terms)
    if (t.eps_order == 0) kept.push_back(qualified_id(t.equation, t.term_id));
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::string> canonical_reduced_system() {
  std::vector<std::string> out = {
      "mass/time-derivative",
      "mass/horizontal-mass-flux",
      "mass/vertical-mass-flux",
      "horizontal-momentum/time-derivative",
      "horizontal-momentum/horizontal-advection",
      "horizontal-momentum/vertical-advection",
      "horizontal-momentum/horizontal-pressure-gradient",
      "horizontal-momentum/horizontal-strain-viscosity",
      "horizontal-momentum/vertical-shear-viscosity",
      "horizontal-momentum/friction",
      "vertical-momentum/vertical-pressure-gradient",
      "vertical-momentum/gravity",
  };
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace cpe::nondim
