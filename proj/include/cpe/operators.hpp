#pragma once

#include <optional>

#include "cpe/grid.hpp"

namespace cpe {

// Second-order centered horizontal gradient, periodic.
Vec2D grad_x(const Field2D& f);
Vec3D grad_x(const Field3D& f);

// Flux-form divergence. Face flux is the arithmetic mean of the two
// adjacent cell values, so the result equals the centered difference and
// div_x = -grad_x^T on the periodic grid.
Field2D div_x(const Vec2D& F);
Field3D div_x(const Vec3D& F);

/// Divergence of fluxes already living on horizontal faces: `east(i, j, k)`
/// is the x1-flux through face i+1/2, `north(i, j, k)` the x2-flux through
/// face j+1/2.
Field3D div_faces(const Field3D& east, const Field3D& north);

/// Centered vertical derivative at cell centers. Ghost cells mirror the
/// boundary-adjacent cells (homogeneous Neumann at z = 0 and z = h).
Field3D ddz(const Field3D& f);

/// Compact second vertical derivative with the same Neumann ghosts.
Field3D d2dz2(const Field3D& f);

/// Vertical difference of face values, evaluated at cell centers.
Field3D ddz_faces(const FaceFieldZ& f);

/// Cumulative midpoint sum: face k holds sum_{m<k} f_m dz, face 0 is 0.
FaceFieldZ integrate_z_partial(const Field3D& f);

/// Same for face data, trapezoid rule between consecutive faces.
FaceFieldZ integrate_z_partial(const FaceFieldZ& f);

/// Arithmetic mean over the nz cells of each column.
Field2D vertical_mean(const Field3D& f);

/// Discrete L^p norm, (sum weight |f|^p dV)^(1/p), or max |f| for p = inf.
/// Field2D norms are taken over the full column (dV = dA h). Face fields
/// use trapezoid weights (half cells at k = 0 and k = nz). Throws
/// std::invalid_argument for p < 1 or a weight of a different shape.
double lp_norm(const Field2D& f, double p, const Field2D* weight = nullptr);
double lp_norm(const Field3D& f, double p, const Field3D* weight = nullptr);
double lp_norm(const FaceFieldZ& f, double p, const FaceFieldZ* weight = nullptr);

/// Logarithmic mean (a - b) / (ln a - ln b), series-evaluated near a = b.
double log_mean(double a, double b);

}  // namespace cpe
