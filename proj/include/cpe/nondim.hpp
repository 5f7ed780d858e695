#pragma once

#include <array>
#include <string>
#include <vector>

namespace cpe::nondim {

/// Characteristic scales of the 3-D flow, SI units.
struct ScaleSet {
  double U = 0.0;        // horizontal velocity, m/s
  double V = 0.0;        // vertical velocity, m/s
  double L = 0.0;        // horizontal length, m
  double H = 0.0;        // vertical length, m
  double T = 0.0;        // time, s
  double rho_bar = 0.0;  // density, kg/m^3
  double mu_bar_1 = 0.0;
  double mu_bar_2 = 0.0;
  double mu_bar_3 = 0.0;
  double lambda_bar = 0.0;  // viscosities, Pa s
  double c = 0.0;           // sound-speed-like constant, m/s
  double g = 0.0;           // gravity, m/s^2

  /// Throws std::invalid_argument unless every scale is positive and finite,
  /// T = L/U and H/L = V/U hold to 1e-12 relative.
  void validate() const;

  /// Derives V = U H / L and T = L / U, then validates.
  static ScaleSet from_horizontal(double U, double L, double H, double rho_bar, double mu1,
                                  double mu2, double mu3, double lambda, double c, double g);

  double eps() const { return H / L; }
  double pressure_unit() const { return rho_bar * U * U; }
};

struct DimensionlessNumbers {
  double Fr = 0.0;
  double Re1 = 0.0;
  double Re2 = 0.0;
  double Re3 = 0.0;
  double Re_lambda = 0.0;
  double Ma = 0.0;
  double eps = 0.0;
};

DimensionlessNumbers dimensionless_numbers(const ScaleSet& s);

/// nu_1 = 1/Re_1, nu_i = 1/(eps^2 Re_i) (i = 2, 3), gamma = 1/(eps^2 Re_lambda):
/// the viscosity coefficients the asymptotic regime holds fixed, evaluated
/// at the reference density.
struct RegimeCoefficients {
  double nu1 = 0.0;
  double nu2 = 0.0;
  double nu3 = 0.0;
  double gamma = 0.0;
};

RegimeCoefficients regime_coefficients(const DimensionlessNumbers& d);

enum class Equation { mass, horizontal_momentum, vertical_momentum };

std::string to_string(Equation e);

/// Symbol basis for exact coefficient bookkeeping.
enum class Symbol { eps, Re1, Re2, Re3, Re_lambda, Ma, Fr, nu1, nu2, nu3, gamma };
inline constexpr std::size_t symbol_count = 11;

/// Signed integer factor times a monomial in the symbol basis.
struct Coefficient {
  int factor = 1;
  std::array<int, symbol_count> exponents{};

  int power(Symbol s) const { return exponents[static_cast<std::size_t>(s)]; }
  Coefficient times(Symbol s, int power) const;
  Coefficient times(const Coefficient& other) const;
  /// e.g. "eps^2*nu2", "-Fr^-2", "1".
  std::string str() const;
  bool operator==(const Coefficient&) const = default;
};

struct TermScale {
  Equation equation = Equation::mass;
  std::string term_id;
  /// Operator as it appears in the scaled system, for display only.
  std::string form;
  Coefficient coefficient;
  int eps_order = 0;
};

/// One entry per term of the three scaled equations. The vertical momentum
/// equation is multiplied by eps^2 before ordering. With `apply_regime`, the
/// inverse Reynolds numbers are rewritten in (nu_1, nu_2, nu_3, gamma, eps).
/// The numeric values of `d` do not enter the exponents.
std::vector<TermScale> scale_terms(const DimensionlessNumbers& d, bool apply_regime);
std::vector<TermScale> scale_terms(bool apply_regime);

/// "equation/term-id" for every eps-order-0 term, sorted. Throws
/// std::invalid_argument if an equation is missing or if any term has
/// negative eps order (the regime was not applied).
std::vector<std::string> reduce_system(const std::vector<TermScale>& terms);

/// The simplified CPE system, term for term, in the same sorted form.
std::vector<std::string> canonical_reduced_system();

std::string qualified_id(Equation e, const std::string& term_id);

}  // namespace cpe::nondim
