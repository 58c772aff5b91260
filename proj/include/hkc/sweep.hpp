#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hkc/gibbons_hawking.hpp"
#include "hkc/quadrature.hpp"

namespace hkc {

struct SweepRow {
  double eps;
  double E_num, E_closed;
  double trI_num, trI_closed;
  double vol_num, vol_leading;
  double ratio_E_trI, ratio_vol_trI;
  double offdiag_max;
  double err_est;
  Mat3 I_num;
};

/// {+-1}-equivariant perturbation of the torus identity: psi(x) = x + delta
/// v(x) with v an odd trigonometric vector field,
///   v_c(x) = weight_c * sin(2 pi modes_c . (x / L)).
/// validate() rejects non-odd terms and amplitudes that break the
/// diffeomorphism bound |delta Dv| < 1.
struct PerturbationField {
  double delta = 0.0;
  std::array<Eigen::Vector3i, 3> modes{Eigen::Vector3i::Zero(), Eigen::Vector3i::Zero(),
                                       Eigen::Vector3i::Zero()};
  std::array<double, 3> weights{0.0, 0.0, 0.0};
  std::array<bool, 3> cosine{false, false, false};  // cosine terms are even, hence rejected

  Vec3 value(const Vec3& x, const TorusSpec& spec) const;
  Mat3 jacobian_offset(const Vec3& x, const TorusSpec& spec) const;  // Dv
  void validate(const TorusSpec& spec) const;
};

/// Shared per-configuration state for the sweep: the harmonic field and the
/// grid samples of its Green part, evaluated once per resolution and reused
/// across eps values, perturbations, and values of c0.
class SweepContext {
 public:
  SweepContext(const PoleConfig& cfg, const TorusSpec& spec, const EwaldParams& params,
               const QuadratureSpec& qspec, Exec exec = Exec::OpenMP);

  const HarmonicField& field() const { return field_; }
  const TorusSpec& spec() const { return spec_; }
  const PoleConfig& config() const { return cfg_; }
  const QuadratureSpec& qspec() const { return qspec_; }
  Exec exec() const { return exec_; }

  const MidpointGrid& fine() const { return fine_; }
  const MidpointGrid& coarse() const { return coarse_; }
  /// Green part of h (c0 excluded) at the grid points.
  const std::vector<double>& h_fine() const;
  const std::vector<double>& h_coarse() const;

  std::vector<Vec3> centers() const;

 private:
  PoleConfig cfg_;
  TorusSpec spec_;
  QuadratureSpec qspec_;
  Exec exec_;
  HarmonicField field_;
  MidpointGrid fine_, coarse_;
  mutable std::vector<double> h_fine_, h_coarse_;  // filled lazily
};

/// Energy over the torus minus the exclusion balls: numerical quadrature of
/// the energy density and the closed form 3 pi eps (V - (2n+8)(4pi/3) r^3).
std::pair<QuadResult, double> energy_gh(double eps, SweepContext& ctx);

/// Invariant matrix by quadrature of the wedge-pairing density; the
/// off-diagonal entries are computed, not assumed zero.
std::pair<Mat3, double> invariant_matrix(double eps, SweepContext& ctx);

/// Volume: quadrature of pi eps^2 (1/eps + h) and the leading closed form
/// pi eps (V + eps c0 V).
std::pair<QuadResult, double> volume_gh(double eps, SweepContext& ctx);

/// Energy and invariant matrix of the moment map composed with the
/// perturbation diffeomorphism.
struct PerturbedResult {
  double energy;
  Mat3 invariant;
  double err_est;
};
PerturbedResult perturbed_energy_and_invariant(double eps, SweepContext& ctx,
                                               const PerturbationField& pert);

std::vector<SweepRow> sweep(const std::vector<double>& eps_list, SweepContext& ctx);

/// CSV with exactly the documented column set, floats at 17 significant
/// digits. Byte-stable across reruns.
std::string to_csv(const std::vector<SweepRow>& rows);

struct SweepSummary {
  PowerFit closed_deficit;   // 3 pi V - E_closed/eps against eps
  std::optional<PowerFit> num_deficit;  // same from E_num (when positive)
  double vol_ratio_slope;    // linear fit of vol_num/trI_num - 1/3 against eps
};
SweepSummary summarize(const std::vector<SweepRow>& rows, const TorusSpec& spec);

}  // namespace hkc
