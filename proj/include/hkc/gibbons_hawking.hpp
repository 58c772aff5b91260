#pragma once

#include <numbers>

#include "hkc/calibration.hpp"
#include "hkc/forms.hpp"
#include "hkc/torus.hpp"

namespace hkc {

/// Normalized circle-fiber length. Every fiber integral is this factor; it is
/// used nowhere else.
inline constexpr double FIBER_LEN = 2.0 * std::numbers::pi;
/// Factor for the involution quotient of the total space; used nowhere else.
inline constexpr double QUOTIENT_HALF = 0.5;

/// Pointwise Gibbons-Hawking data at a point where the harmonic function has
/// value h > 0. Coframe order is (theta, theta_1, theta_2, theta_3), mapped
/// to (e0, e1, e2, e3):
///   eta_i = theta_i ^ theta + h theta_j ^ theta_k,
///   g     = diag(1/h, h, h, h),
///   moment_diff = matrix of the bundle projection differential in the
///                 g-orthonormalized coframe: A^i_i = h^{-1/2}, A^i_0 = 0.
struct GHFrame {
  double h;
  FormTriple triple;
  Metric4 metric;
  LinearMap34 moment_diff;
};

/// Throws std::domain_error for h <= 0 (the triple is hyper-Kahler only
/// where h is positive).
GHFrame gh_frame(double h_val);

/// Differential of the bundle projection in the orthonormalized coframe.
LinearMap34 moment_map_differential(double h_val);
/// Same differential in the raw coframe (rows are the theta_i).
LinearMap34 moment_map_differential_raw();

/// tr of the pulled-back flat metric against the GH metric: 3/h. Must equal
/// energy_density(moment_diff) to roundoff.
double moment_energy_density(double h_val);

/// Residual of the pointwise calibration identity
///   sum_i eta_i ^ A*(Theta_i) = tr (A^t A) vol
/// for an arbitrary map differential given in the orthonormalized coframe.
/// Computed through the wedge machinery in the raw coframe, so the h-value
/// enters every factor. Zero (to roundoff) at the moment-map differential.
double calibration_residual(double h_val, const LinearMap34& a_ortho);
double calibration_residual(double h_val);

/// Residual at a torus point: h-value taken as 1/eps + h(x).
double calibration_residual(const Vec3& x, const HarmonicField& field, double eps);

/// Per-unit-torus-volume densities after fiber integration and the
/// involution quotient, at H = 1/eps + h(x):
///   e = 3 pi eps (constant), i = pi eps I_3, v = pi eps^2 H.
struct GHDensity {
  double e;
  Mat3 i;
  double v;
};
GHDensity gh_densities(double h_val, double eps);
GHDensity gh_densities(const Vec3& x, const HarmonicField& field, double eps);

/// Density matrix of the invariant pairing for a composed map with target
/// Jacobian J at the base point, through the genuine mixed wedge pairing
/// (the vanishing of the off-diagonal part is an output, not an input).
Mat3 invariant_density(const Mat3& jac, double h_val, double eps);

/// Energy density of the composed map: the h factors of the squared
/// differential norm and of the volume density cancel against each other.
double map_energy_density(const Mat3& jac, double h_val, double eps);

}  // namespace hkc
