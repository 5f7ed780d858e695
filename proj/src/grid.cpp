#include "cpe/grid.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cpe {

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs_of(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

void GridSpec::validate() const {
  if (nx1 < 4 || nx2 < 4 || nx1 % 2 != 0 || nx2 % 2 != 0)
    throw std::invalid_argument("grid: nx1 and nx2 must be even and >= 4");
  if (nz < 2) throw std::invalid_argument("grid: nz must be >= 2");
  if (!(lx1 > 0.0) || !(lx2 > 0.0) || !(h > 0.0))
    throw std::invalid_argument("grid: lengths must be strictly positive");
  if (!std::isfinite(lx1) || !std::isfinite(lx2) || !std::isfinite(h))
    throw std::invalid_argument("grid: lengths must be finite");
}

bool GridSpec::same_shape(const GridSpec& o) const {
  return nx1 == o.nx1 && nx2 == o.nx2 && nz == o.nz && lx1 == o.lx1 && lx2 == o.lx2 &&
         h == o.h;
}

GridSpec GridSpec::refined(int factor) const {
  GridSpec g = *this;
  g.nx1 *= factor;
  g.nx2 *= factor;
  g.nz *= factor;
  return g;
}

bool Field2D::is_finite() const { return all_finite(v_); }
double Field2D::max_abs() const { return max_abs_of(v_); }
double Field2D::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::min(m, x);
  return m;
}
double Field2D::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v_) m = std::max(m, x);
  return m;
}

bool Field3D::is_finite() const { return all_finite(v_); }
double Field3D::max_abs() const { return max_abs_of(v_); }

bool FaceFieldZ::is_finite() const { return all_finite(v_); }
double FaceFieldZ::max_abs() const { return max_abs_of(v_); }
double FaceFieldZ::max_abs_top() const {
  double m = 0.0;
  for (int i = 0; i < grid_.nx1; ++i)
    for (int j = 0; j < grid_.nx2; ++j) m = std::max(m, std::abs((*this)(i, j, grid_.nz)));
  return m;
}

Field3D broadcast(const Field2D& f) {
  const GridSpec& g = f.grid();
  Field3D out(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k) out(i, j, k) = f(i, j);
  return out;
}

double sum(std::span<const double> v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value();
}

}  // namespace cpe
