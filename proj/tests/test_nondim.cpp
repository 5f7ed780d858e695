#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <cmath>
#include <random>
#include <tuple>

#include "cpe/nondim.hpp"

using namespace cpe::nondim;

namespace {

ScaleSet atmosphere() {
  return ScaleSet::from_horizontal(10.0, 1.0e6, 1.0e4, 1.2, 1.0e4, 1.0, 1.0, 2.0e-3, 300.0, 9.81);
}

// Hand-enumerated table with the regime applied and vertical momentum
// multiplied by eps^2: (equation, term, coefficient, eps order).
const std::vector<std::tuple<std::string, std::string, std::string, int>>& golden() {
  static const std::vector<std::tuple<std::string, std::string, std::string, int>> g = {
      {"mass", "time-derivative", "1", 0},
      {"mass", "horizontal-mass-flux", "1", 0},
      {"mass", "vertical-mass-flux", "1", 0},
      {"horizontal-momentum", "time-derivative", "1", 0},
      {"horizontal-momentum", "horizontal-advection", "1", 0},
      {"horizontal-momentum", "vertical-advection", "1", 0},
      {"horizontal-momentum", "horizontal-pressure-gradient", "Ma^-2", 0},
      {"horizontal-momentum", "horizontal-strain-viscosity", "nu1", 0},
      {"horizontal-momentum", "vertical-shear-viscosity", "nu2", 0},
      {"horizontal-momentum", "cross-shear-viscosity", "eps^2*nu2", 2},
      {"horizontal-momentum", "bulk-viscosity-divergence", "eps^2*gamma", 2},
      {"horizontal-momentum", "bulk-viscosity-vertical-stretch", "eps^2*gamma", 2},
      {"horizontal-momentum", "friction", "-1", 0},
      {"vertical-momentum", "time-derivative", "eps^2", 2},
      {"vertical-momentum", "horizontal-advection", "eps^2", 2},
      {"vertical-momentum", "vertical-advection", "eps^2", 2},
      {"vertical-momentum", "vertical-pressure-gradient", "Ma^-2", 0},
      {"vertical-momentum", "gravity", "-Fr^-2", 0},
      {"vertical-momentum", "shear-viscosity", "eps^2*nu3", 2},
      {"vertical-momentum", "cross-shear-viscosity", "eps^4*nu3", 4},
      {"vertical-momentum", "normal-viscosity", "2*eps^2*nu3", 2},
      {"vertical-momentum", "bulk-viscosity-divergence", "eps^2*gamma", 2},
      {"vertical-momentum", "bulk-viscosity-vertical-stretch", "eps^2*gamma", 2},
  };
  return g;
}

}  // namespace

TEST_CASE("scale set validation") {
  CHECK_NOTHROW(atmosphere().validate());
  ScaleSet s = atmosphere();
  s.T *= 1.0 + 1e-9;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = atmosphere();
  s.V *= 1.001;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = atmosphere();
  s.g = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK(atmosphere().eps() == doctest::Approx(1e-2));
}

TEST_CASE("dimensionless numbers follow their formulas") {
  ScaleSet s = ScaleSet::from_horizontal(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(dimensionless_numbers(s).Fr == 1.0);

  s = ScaleSet::from_horizontal(10.0, 1000.0, 10.0, 1.0, 10.0, 1.0, 1.0, 1.0, 340.0, 9.81);
  CHECK(dimensionless_numbers(s).Re1 == doctest::Approx(1000.0).epsilon(1e-15));

  s = ScaleSet::from_horizontal(340.0, 1000.0, 10.0, 1.0, 10.0, 1.0, 1.0, 1.0, 340.0, 9.81);
  CHECK(dimensionless_numbers(s).Ma == 1.0);

  const ScaleSet a = atmosphere();
  const DimensionlessNumbers d = dimensionless_numbers(a);
  CHECK(d.Fr == doctest::Approx(a.U / std::sqrt(a.g * a.H)));
  CHECK(d.Re2 == doctest::Approx(a.rho_bar * a.U * a.L / a.mu_bar_2));
  CHECK(d.Re_lambda == doctest::Approx(a.rho_bar * a.U * a.L / a.lambda_bar));
  CHECK(d.eps == doctest::Approx(a.H / a.L));

  const RegimeCoefficients rc = regime_coefficients(d);
  CHECK(rc.nu1 == doctest::Approx(1.0 / d.Re1));
  CHECK(rc.nu2 == doctest::Approx(1.0 / (d.eps * d.eps * d.Re2)));
  CHECK(rc.gamma == doctest::Approx(1.0 / (d.eps * d.eps * d.Re_lambda)));
}

TEST_CASE("consistent rescaling leaves Fr and Ma fixed and scales Re by k^2") {
  const ScaleSet a = atmosphere();
  const double k = 3.0;
  // U, V, L, H scaled by k; T = L/U unchanged
  const ScaleSet b = ScaleSet::from_horizontal(k * a.U, k * a.L, k * a.H, a.rho_bar, a.mu_bar_1,
                                               a.mu_bar_2, a.mu_bar_3, a.lambda_bar, k * a.c,
                                               k * a.g);
  const DimensionlessNumbers da = dimensionless_numbers(a), db = dimensionless_numbers(b);
  CHECK(db.Fr == doctest::Approx(da.Fr).epsilon(1e-14));
  CHECK(db.Ma == doctest::Approx(da.Ma).epsilon(1e-14));
  CHECK(db.Re1 == doctest::Approx(k * k * da.Re1).epsilon(1e-14));
  CHECK(db.Re3 == doctest::Approx(k * k * da.Re3).epsilon(1e-14));
}

TEST_CASE("scaled term table matches the hand enumeration") {
  const std::vector<TermScale> t = scale_terms(dimensionless_numbers(atmosphere()), true);
  REQUIRE(t.size() == golden().size());
  for (std::size_t n = 0; n < t.size(); ++n) {
    const auto& [eq, id, coef, order] = golden()[n];
    CAPTURE(id);
    CHECK(to_string(t[n].equation) == eq);
    CHECK(t[n].term_id == id);
    CHECK(t[n].coefficient.str() == coef);
    CHECK(t[n].eps_order == order);
    CHECK(t[n].eps_order == t[n].coefficient.power(Symbol::eps));
  }
}

TEST_CASE("regime substitution examples") {
  auto find = [](const std::vector<TermScale>& ts, Equation e, const std::string& id) {
    return *std::find_if(ts.begin(), ts.end(),
                         [&](const TermScale& t) { return t.equation == e && t.term_id == id; });
  };
  const std::vector<TermScale> raw = scale_terms(false);
  const std::vector<TermScale> reg = scale_terms(true);
  const TermScale vs = find(reg, Equation::horizontal_momentum, "vertical-shear-viscosity");
  CHECK(vs.coefficient.str() == "nu2");
  CHECK(vs.eps_order == 0);
  CHECK(find(raw, Equation::horizontal_momentum, "vertical-shear-viscosity").eps_order == -2);
  CHECK(find(raw, Equation::horizontal_momentum, "vertical-shear-viscosity").coefficient.str() ==
        "eps^-2*Re2^-1");
  const TermScale cs = find(reg, Equation::horizontal_momentum, "cross-shear-viscosity");
  CHECK(cs.coefficient.str() == "eps^2*nu2");
  CHECK(cs.eps_order == 2);
  for (const TermScale& t : reg)
    if (t.equation == Equation::vertical_momentum) {
      const bool kept = t.term_id == "vertical-pressure-gradient" || t.term_id == "gravity";
      CHECK((kept ? t.eps_order == 0 : t.eps_order >= 2));
    }
}

TEST_CASE("reduce_system") {
  const std::vector<std::string> expected = {
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
  std::vector<TermScale> t = scale_terms(true);
  CHECK(reduce_system(t) == expected);
  CHECK(canonical_reduced_system() == expected);

  std::mt19937_64 gen(9);
  for (int n = 0; n < 5; ++n) {
    std::shuffle(t.begin(), t.end(), gen);
    CHECK(reduce_system(t) == expected);
  }

  CHECK_THROWS_AS(reduce_system({}), std::invalid_argument);
  CHECK_THROWS_AS(reduce_system(scale_terms(false)), std::invalid_argument);

  std::vector<TermScale> no_vertical;
  for (const TermScale& x : scale_terms(true))
    if (x.equation != Equation::vertical_momentum) no_vertical.push_back(x);
  CHECK_THROWS_AS(reduce_system(no_vertical), std::invalid_argument);

  std::vector<TermScale> dup = scale_terms(true);
  dup.push_back(dup.front());
  CHECK_THROWS_AS(reduce_system(dup), std::invalid_argument);
}

TEST_CASE("coefficient formatting") {
  Coefficient c;
  CHECK(c.str() == "1");
  CHECK(c.times(Symbol::eps, 2).times(Symbol::nu3, 1).str() == "eps^2*nu3");
  Coefficient m;
  m.factor = -1;
  CHECK(m.times(Symbol::Fr, -2).str() == "-Fr^-2");
  Coefficient two;
  two.factor = 2;
  CHECK(two.times(Symbol::Re3, -1).str() == "2*Re3^-1");
  CHECK(two.times(m).factor == -2);
}
