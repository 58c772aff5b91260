#include "hkc/gibbons_hawking.hpp"

#include <cmath>
#include <stdexcept>

namespace hkc {

namespace {

constexpr double kPi = std::numbers::pi;

// eta_i in the raw coframe: theta_i ^ theta contributes -e0i, the h-term
// fills the complementary cyclic slot.
FormTriple gh_triple(double h) {
  FormTriple t;
  t[0] = KForm4::from_coeffs(2, {-1, 0, 0, h, 0, 0});
  t[1] = KForm4::from_coeffs(2, {0, -1, 0, 0, h, 0});
  t[2] = KForm4::from_coeffs(2, {0, 0, -1, 0, 0, h});
  return t;
}

// Coefficient of theta_1 ^ theta_2 ^ theta_3 ^ theta, which is the positive
// generator for the GH orientation and equals -e0123.
double oriented_coeff(const KForm4& four_form) { return -four_form[0]; }

}  // namespace

GHFrame gh_frame(double h_val) {
  if (!(h_val > 0.0)) throw std::domain_error("gh_frame: GH triple is not hyper-Kahler here (h <= 0)");
  GHFrame f;
  f.h = h_val;
  f.triple = gh_triple(h_val);
  Mat4 g = Mat4::Identity();
  g(0, 0) = 1.0 / h_val;
  g(1, 1) = g(2, 2) = g(3, 3) = h_val;
  f.metric = Metric4{g, +1};
  f.moment_diff = moment_map_differential(h_val);
  return f;
}

LinearMap34 moment_map_differential(double h_val) {
  if (!(h_val > 0.0)) throw std::domain_error("moment_map_differential: h <= 0");
  LinearMap34 a = LinearMap34::Zero();
  const double s = 1.0 / std::sqrt(h_val);
  a(0, 1) = a(1, 2) = a(2, 3) = s;
  return a;
}

LinearMap34 moment_map_differential_raw() {
  LinearMap34 a = LinearMap34::Zero();
  a(0, 1) = a(1, 2) = a(2, 3) = 1.0;
  return a;
}

double moment_energy_density(double h_val) {
  if (!(h_val > 0.0)) throw std::domain_error("moment_energy_density: h <= 0");
  return 3.0 / h_val;
}

double calibration_residual(double h_val, const LinearMap34& a_ortho) {
  if (!(h_val > 0.0)) throw std::domain_error("calibration_residual: h <= 0");
  // Convert to the raw coframe: e0 = sqrt(h) ehat0, ei = ehat_i / sqrt(h).
  const double rh = std::sqrt(h_val);
  LinearMap34 a_raw = a_ortho;
  a_raw.col(0) /= rh;
  a_raw.col(1) *= rh;
  a_raw.col(2) *= rh;
  a_raw.col(3) *= rh;

  const FormTriple eta = gh_triple(h_val);
  double lhs = 0.0;
  for (int i = 0; i < 3; ++i)
    lhs += oriented_coeff(wedge(eta[i], pullback(a_raw, KForm3::basis(2, i))));
  const double vol_coeff = h_val;  // vol = h theta_1 ^ theta_2 ^ theta_3 ^ theta
  return std::abs(lhs / vol_coeff - energy_density(a_ortho));
}

double calibration_residual(double h_val) {
  return calibration_residual(h_val, moment_map_differential(h_val));
}

double calibration_residual(const Vec3& x, const HarmonicField& field, double eps) {
  for (const Charge& c : field.charges())
    if (torus_distance(x, c.pos, field.spec()) < 1e-10)
      throw std::domain_error("calibration_residual: point too close to a pole");
  const double h_val = 1.0 / eps + field.value(x);
  return calibration_residual(h_val);
}

GHDensity gh_densities(double h_val, double eps) {
  if (!(h_val > 0.0)) throw std::domain_error("gh_densities: 1/eps + h <= 0");
  GHDensity d;
  d.e = eps * moment_energy_density(h_val) * h_val * kPi;  // = 3 pi eps
  d.i = invariant_density(Mat3::Identity(), h_val, eps);
  d.v = kPi * eps * eps * h_val;
  return d;
}

GHDensity gh_densities(const Vec3& x, const HarmonicField& field, double eps) {
  return gh_densities(1.0 / eps + field.value(x), eps);
}

Mat3 invariant_density(const Mat3& jac, double h_val, double eps) {
  if (!(h_val > 0.0)) throw std::domain_error("invariant_density: h <= 0");
  const FormTriple eta = gh_triple(h_val);
  // Composed map differential in the raw coframe: rows are J-combinations of
  // the theta_i, no theta component.
  LinearMap34 a_raw = LinearMap34::Zero();
  a_raw.block<3, 3>(0, 1) = jac;
  Mat3 density;
  for (int j = 0; j < 3; ++j) {
    const KForm4 pulled = pullback(a_raw, KForm3::basis(2, j));
    for (int i = 0; i < 3; ++i)
      density(i, j) = kPi * eps * oriented_coeff(wedge(eta[i], pulled));
  }
  return density;
}

double map_energy_density(const Mat3& jac, double h_val, double eps) {
  if (!(h_val > 0.0)) throw std::domain_error("map_energy_density: h <= 0");
  const LinearMap34 a_prime = jac * moment_map_differential(h_val);
  return kPi * eps * h_val * energy_density(a_prime);
}

}  // namespace hkc
