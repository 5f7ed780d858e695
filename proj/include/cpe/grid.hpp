#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cpe {

/// Uniform periodic torus in (x1, x2) times a bounded column [0, h] in z.
///
/// Cells are indexed (i, j, k) with i along x1, j along x2 and k along z.
/// Horizontal indices wrap around; vertical faces run from k = 0 (bottom)
/// to k = nz (top).
struct GridSpec {
  int nx1 = 32;
  int nx2 = 32;
  int nz = 16;
  double lx1 = 1.0;
  double lx2 = 1.0;
  double h = 1.0 - std::exp(-1.0);

  /// Throws std::invalid_argument unless nx1, nx2 >= 4 and even, nz >= 2,
  /// and all lengths are strictly positive.
  void validate() const;

  double dx1() const { return lx1 / nx1; }
  double dx2() const { return lx2 / nx2; }
  double dz() const { return h / nz; }
  double cell_area() const { return dx1() * dx2(); }
  double cell_volume() const { return dx1() * dx2() * dz(); }
  double volume() const { return lx1 * lx2 * h; }

  std::size_t columns() const { return static_cast<std::size_t>(nx1) * nx2; }
  std::size_t cells() const { return columns() * nz; }
  std::size_t faces() const { return columns() * (nz + 1); }

  int wrap1(int i) const { return ((i % nx1) + nx1) % nx1; }
  int wrap2(int j) const { return ((j % nx2) + nx2) % nx2; }

  double x1_center(int i) const { return (i + 0.5) * dx1(); }
  double x2_center(int j) const { return (j + 0.5) * dx2(); }
  double z_center(int k) const { return (k + 0.5) * dz(); }
  double z_face(int k) const { return k * dz(); }

  /// Same counts and lengths (the comparison the transforms need).
  bool same_shape(const GridSpec& other) const;

  /// Same grid refined by `factor` in every direction.
  GridSpec refined(int factor) const;

  bool operator==(const GridSpec&) const = default;
};

/// Scalar per horizontal cell center.
class Field2D {
 public:
  Field2D() = default;
  explicit Field2D(const GridSpec& g, double fill = 0.0)
      : grid_(g), v_(g.columns(), fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j) { return v_[index(i, j)]; }
  double operator()(int i, int j) const { return v_[index(i, j)]; }
  /// Periodic access.
  double at(int i, int j) const { return v_[index(grid_.wrap1(i), grid_.wrap2(j))]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  bool is_finite() const;
  double max_abs() const;
  double min() const;
  double max() const;

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * grid_.nx2 + j;
  }

 private:
  GridSpec grid_;
  std::vector<double> v_;
};

/// Scalar per 3-D cell center, x1-major then x2 then z.
class Field3D {
 public:
  Field3D() = default;
  explicit Field3D(const GridSpec& g, double fill = 0.0)
      : grid_(g), v_(g.cells(), fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j, int k) { return v_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[index(i, j, k)]; }
  double at(int i, int j, int k) const {
    return v_[index(grid_.wrap1(i), grid_.wrap2(j), k)];
  }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  bool is_finite() const;
  double max_abs() const;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * grid_.nx2 + j) * grid_.nz + k;
  }

 private:
  GridSpec grid_;
  std::vector<double> v_;
};

/// Scalar per vertical face, nz + 1 faces per column.
class FaceFieldZ {
 public:
  FaceFieldZ() = default;
  explicit FaceFieldZ(const GridSpec& g, double fill = 0.0)
      : grid_(g), v_(g.faces(), fill) {}

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return v_.size(); }

  double& operator()(int i, int j, int k) { return v_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return v_[index(i, j, k)]; }

  std::span<double> values() { return v_; }
  std::span<const double> values() const { return v_; }

  bool is_finite() const;
  double max_abs() const;
  /// Largest |value| on the top face (k = nz).
  double max_abs_top() const;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * grid_.nx2 + j) * (grid_.nz + 1) + k;
  }

 private:
  GridSpec grid_;
  std::vector<double> v_;
};

/// Horizontal 2-vector on the 2-D grid.
struct Vec2D {
  Field2D c1;
  Field2D c2;
};

/// Horizontal 2-vector at 3-D cell centers.
struct Vec3D {
  Field3D c1;
  Field3D c2;
};

/// Copies a 2-D field into every level of a 3-D field.
Field3D broadcast(const Field2D& f);

/// Sample an analytic function at cell centers.
template <class Fn>
Field2D sample2d(const GridSpec& g, Fn&& fn) {
  Field2D f(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j) f(i, j) = fn(g.x1_center(i), g.x2_center(j));
  return f;
}

template <class Fn>
Field3D sample3d(const GridSpec& g, Fn&& fn) {
  Field3D f(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k < g.nz; ++k)
        f(i, j, k) = fn(g.x1_center(i), g.x2_center(j), g.z_center(k));
  return f;
}

template <class Fn>
FaceFieldZ sample_faces(const GridSpec& g, Fn&& fn) {
  FaceFieldZ f(g);
  for (int i = 0; i < g.nx1; ++i)
    for (int j = 0; j < g.nx2; ++j)
      for (int k = 0; k <= g.nz; ++k)
        f(i, j, k) = fn(g.x1_center(i), g.x2_center(j), g.z_face(k));
  return f;
}

/// Neumaier-compensated accumulator. Grid sums go through this in a fixed
/// loop order so results do not depend on anything but the data.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double sum(std::span<const double> v);

}  // namespace cpe
