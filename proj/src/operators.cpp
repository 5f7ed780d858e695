#include "cpe/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cpe {

namespace {

// Shared kernels over `levels` stacked 2-D slabs (levels = 1 for Field2D,
// nz for Field3D). Layout is ((i * nx2) + j) * levels + k.
void grad_kernel(const GridSpec& g, int levels, std::span<const double> f,
                 std::span<double> g1, std::span<double> g2) {
  const double r1 = 1.0 / (2.0 * g.dx1());
  const double r2 = 1.0 / (2.0 * g.dx2());
  auto at = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * g.nx2 + j) * levels + k;
  };
  for (int i = 0; i < g.nx1; ++i) {
    const int ip = g.wrap1(i + 1), im = g.wrap1(i - 1);
    for (int j = 0; j < g.nx2; ++j) {
      const int jp = g.wrap2(j + 1), jm = g.wrap2(j - 1);
      for (int k = 0; k < levels; ++k) {
        g1[at(i, j, k)] = (f[at(ip, j, k)] - f[at(im, j, k)]) * r1;
        g2[at(i, j, k)] = (f[at(i, jp, k)] - f[at(i, jm, k)]) * r2;
      }
    }
  }
}

void div_kernel(const GridSpec& g, int levels, std::span<const double> f1,
                std::span<const double> f2, std::span<double> out) {
  const double r1 = 1.0 / g.dx1();
  const double r2 = 1.0 / g.dx2();
  auto at = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(i) * g.nx2 + j) * levels + k;
  };
  for (int i = 0; i < g.nx1; ++i) {
    const int ip = g.wrap1(i + 1), im = g.wrap1(i - 1);
    for (int j = 0; j < g.nx2; ++j) {
      const int jp = g.wrap2(j + 1), jm = g.wrap2(j - 1);
      for (int k = 0; k < levels; ++k) {
        const double c1 = f1[at(i, j, k)];
        const double c2 = f2[at(i, j, k)];
        const double east = 0.5 * (c1 + f1[at(ip, j, k)]);
        const double west = 0.5 * (f1[at(im, j, k)] + c1);
        const double north = 0.5 * (c2 + f2[at(i, jp, k)]);
        const double south = 0.5 * (f2[at(i, jm, k)] + c2);
        out[at(i, j, k)] = (east - west) * r1 + (north - south) * r2;
      }
    }
  }
}

template <class F>
void require_same_shape(const F& a, const F& b, const char* what) {
  if (!a.grid().same_shape(b.grid()) || a.size() != b.size())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

double lp_accumulate(std::span<const double> f, std::span<const double> w,
                     std::span<const double> cellw, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n)
      if (w.empty() || w[n] > 0.0) m = std::max(m, std::abs(f[n]));
    return m;
  }
  CompensatedSum s;
  for (std::size_t n = 0; n < f.size(); ++n) {
    const double a = std::abs(f[n]);
    const double ap = p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
    s.add((w.empty() ? 1.0 : w[n]) * ap * cellw[n]);
  }
  const double total = s.value();
  return p == 1.0 ? total : (p == 2.0 ? std::sqrt(total) : std::pow(total, 1.0 / p));
}

}  // namespace

Vec2D grad_x(const Field2D& f) {
  Vec2D out{Field2D(f.grid()), Field2D(f.grid())};
  grad_kernel(f.grid(), 1, f.values(), out.c1.values(), out.c2.values());
  return out;
}

Vec3D grad_x(const Field3D& f) {
  Vec3D out{Field3D(f.grid()), Field3D(f.grid())};
  grad_kernel(f.grid(), f.grid().nz, f.values(), out.c1.values(), out.c2.values());
  return out;
}

Field2D div_x(const Vec2D& F) {
  require_same_shape(F.c1, F.c2, "div_x");
  Field2D out(F.c1.grid());
  div_kernel(F.c1.grid(), 1, F.c1.values(), F.c2.values(), out.values());
  return out;
}

Field3D div_x(const Vec3D& F) {
  require_same_shape(F.c1, F.c2, "div_x");
  Field3D out(F.c1.grid());
  div_kernel(F.c1.grid(), F.c1.grid().nz, F.c1.values(), F.c2.values(), out.values());
  return out;
}

Field3D div_faces(const Field3D& east, const Field3D& north) {
  require_same_shape(east, north, "div_faces");
  const GridSpec& g = east.grid();
  Field3D out(g);
  const double r1 = 1.0 / g.dx1();
  const double r2 = 1.0 / g.dx2();
  for (int i = 0; i < g.nx1; ++i) {
    const int im = g.wrap1(i - 1);
    for (int j = 0; j < g.nx2; ++j) {
      const int jm = g.wrap2(j - 1);
      for (int k = 0; k < g.nz; ++k)
        out(i, j, k) = (east(i, j, k) - east(im, j, k)) * r1 +
                       (north(i, j, k) - north(i, jm, k)) * r2;
    }
  }
  return out;
}

Field3D ddz(const Field3D& f) {
  const GridSpec& g = f.grid();
  Field3D out(g);
  const double r = 1.0 / (2.0 * g.dz());
  const int nz = g.nz;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < nz; ++k) {
        const double below = f(i, j, k == 0 ? 0 : k - 1);
        const double above = f(i, j, k == nz - 1 ? nz - 1 : k + 1);
        out(i, j, k) = (above - below) * r;
      }
  return out;
}

Field3D d2dz2(const Field3D& f) {
  const GridSpec& g = f.grid();
  Field3D out(g);
  const double r = 1.0 / (g.dz() * g.dz());
  const int nz = g.nz;
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < nz; ++k) {
        const double c = f(i, j, k);
        const double below = k == 0 ? c : f(i, j, k - 1);
        const double above = k == nz - 1 ? c : f(i, j, k + 1);
        out(i, j, k) = ((above - c) - (c - below)) * r;
      }
  return out;
}

Field3D ddz_faces(const FaceFieldZ& f) {
  const GridSpec& g = f.grid();
  Field3D out(g);
  const double r = 1.0 / g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k) out(i, j, k) = (f(i, j, k + 1) - f(i, j, k)) * r;
  return out;
}

FaceFieldZ integrate_z_partial(const Field3D& f) {
  const GridSpec& g = f.grid();
  FaceFieldZ out(g);
  const double dz = g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      double acc = 0.0;
      out(i, j, 0) = 0.0;
      for (int k = 0; k < g.nz; ++k) {
        acc += f(i, j, k) * dz;
        out(i, j, k + 1) = acc;
      }
    }
  return out;
}

FaceFieldZ integrate_z_partial(const FaceFieldZ& f) {
  const GridSpec& g = f.grid();
  FaceFieldZ out(g);
  const double dz = g.dz();
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      double acc = 0.0;
      out(i, j, 0) = 0.0;
      for (int k = 0; k < g.nz; ++k) {
        acc += 0.5 * (f(i, j, k) + f(i, j, k + 1)) * dz;
        out(i, j, k + 1) = acc;
      }
    }
  return out;
}

Field2D vertical_mean(const Field3D& f) {
  const GridSpec& g = f.grid();
  Field2D out(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      double acc = 0.0;
      for (int k = 0; k < g.nz; ++k) acc += f(i, j, k);
      out(i, j) = acc / g.nz;
    }
  return out;
}

double lp_norm(const Field2D& f, double p, const Field2D* weight) {
  if (weight) require_same_shape(f, *weight, "lp_norm");
  const GridSpec& g = f.grid();
  std::vector<double> cellw(f.size(), g.cell_area() * g.h);
  return lp_accumulate(f.values(), weight ? weight->values() : std::span<const double>{},
                       cellw, p);
}

double lp_norm(const Field3D& f, double p, const Field3D* weight) {
  if (weight) require_same_shape(f, *weight, "lp_norm");
  std::vector<double> cellw(f.size(), f.grid().cell_volume());
  return lp_accumulate(f.values(), weight ? weight->values() : std::span<const double>{},
                       cellw, p);
}

double lp_norm(const FaceFieldZ& f, double p, const FaceFieldZ* weight) {
  if (weight) require_same_shape(f, *weight, "lp_norm");
  const GridSpec& g = f.grid();
  std::vector<double> cellw(f.size(), g.cell_volume());
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) {
      cellw[f.index(i, j, 0)] *= 0.5;
      cellw[f.index(i, j, g.nz)] *= 0.5;
    }
  return lp_accumulate(f.values(), weight ? weight->values() : std::span<const double>{},
                       cellw, p);
}

double log_mean(double a, double b) {
  const double zeta = a / b;
  const double f = (zeta - 1.0) / (zeta + 1.0);
  const double u = f * f;
  if (u < 1e-4) {
    const double series = 1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0)));
    return (a + b) / (2.0 * series);
  }
  return (a - b) / (std::log(a) - std::log(b));
}

}  // namespace cpe
