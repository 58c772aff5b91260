#pragma once

#include <optional>

#include "hkc/forms.hpp"

namespace hkc {

/// 3x4 coefficient table of a linear map R^4 -> R^3. Row h-1 holds the
/// components of the h-th target coordinate; column l is the source index.
using LinearMap34 = Eigen::Matrix<double, 3, 4>;

/// tr(A^t A): the squared differential norm of the map A models.
double energy_density(const LinearMap34& a);

/// Calibration functional: the coefficient of e0123 in the sum of the
/// standard 2-forms wedged with the pulled-back target area forms. This is
/// the closed-form expansion; tau_wedge below evaluates the defining wedge
/// expression through the exterior-algebra engine, and the two must agree.
double tau(const LinearMap34& a);
double tau_wedge(const LinearMap34& a);

/// The gap energy - tau written directly as half the sum of squares of the
/// twelve difference terms in the expansion of tau. Nonnegative by
/// construction.
double calibration_gap_terms(const LinearMap34& a);

/// Max violation of the equality conditions that characterize gap = 0.
double equality_locus_violation(const LinearMap34& a);

/// Builds the calibrated map with parameters b = A^1_1 = A^2_2 = A^3_3 and
/// off[i] = A^{i+1}_0: the general solution of the equality conditions.
LinearMap34 calibrated_map(double b, const Vec3& off);

/// Pullback A* of a form on the R^3 target. Degree <= 3.
KForm4 pullback(const LinearMap34& a, const KForm3& form);

enum class DFormula { Statement, Proof, Both, Neither };

struct Reconstruction {
  KForm4 theta;        // the 1-form of the factorization, gauge theta = D*alpha
  double d_const;      // empirically determined scalar
  FormTriple triple;   // t_i = theta ^ A*f^i + D A*f^j ^ A*f^k
  double residual;     // max coefficient deviation from the standard triple
  double d_statement;  // sqrt(tr(A^t A)/3)
  double d_proof;      // 3 / tr(A^t A)
  DFormula match;
};

/// Factorizes the standard triple through a calibrated map. The scalar is
/// determined numerically (least squares against the standard triple, which
/// is the unique normalization: pure SU(2)-ness is scale invariant) and then
/// compared with both closed-form candidates. Throws when A is not
/// calibrated at tol or A = 0.
Reconstruction reconstruct(const LinearMap34& a, double tol = 1e-10);

struct CalibrationReport {
  double tau = 0;
  double energy = 0;
  double gap = 0;          // energy - tau
  bool calibrated = false; // gap within tol
  std::optional<KForm4> theta;    // present iff calibrated and A != 0
  std::optional<double> d_const;  // present iff calibrated and A != 0
};

/// Evaluates tau, the energy, the gap (cross-checked against the explicit
/// sum-of-squares form) and, for calibrated nonzero maps, the factorization
/// data.
CalibrationReport calibration_report(const LinearMap34& a, double tol = 1e-10);

const char* to_string(DFormula f);

}  // namespace hkc
