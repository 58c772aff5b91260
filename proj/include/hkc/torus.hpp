#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hkc/forms.hpp"

namespace hkc {

/// Flat rectangular 3-torus R^3 / (L1 Z x L2 Z x L3 Z).
struct TorusSpec {
  Vec3 box{1.0, 1.0, 1.0};
  double volume() const { return box[0] * box[1] * box[2]; }
  /// Injectivity radius: half the shortest lattice vector.
  double injectivity() const { return 0.5 * box.minCoeff(); }
};

/// Componentwise wrap of a difference vector into [-L/2, L/2).
Vec3 min_image(const Vec3& d, const TorusSpec& spec);
double torus_distance(const Vec3& x, const Vec3& y, const TorusSpec& spec);

/// Ewald splitting parameters. Cutoffs are validated at construction against
/// analytic tail bounds for the requested truncation tolerance.
struct EwaldParams {
  double alpha;  // splitting parameter, dimension 1/length
  double r_cut;  // real-space cutoff radius
  double g_cut;  // reciprocal-space cutoff |k|
  double tol;    // truncation target both tails were solved for

  /// alpha defaults to alpha_scale * sqrt(pi) / V^{1/3}; cutoffs from tail
  /// bounds targeting tol. Throws when the bounds cannot be met.
  static EwaldParams for_spec(const TorusSpec& spec, double tol = 1e-12, double alpha_scale = 2.0);
  static EwaldParams with_alpha(const TorusSpec& spec, double alpha, double tol = 1e-12);
};

/// Periodic Green's function on the torus in the 1/rho normalization:
///   G_p ~ 1/rho_p near p,  Lap G_p = 4 pi / vol  away from p,  mean(G_p) = 0.
/// Evaluated by Ewald splitting with image and reciprocal tables cached per
/// (spec, params).
class GreenEvaluator {
 public:
  GreenEvaluator(const TorusSpec& spec, const EwaldParams& params);

  double operator()(const Vec3& x, const Vec3& p) const { return green(x, p); }
  double green(const Vec3& x, const Vec3& p) const;
  Vec3 gradient(const Vec3& x, const Vec3& p) const;

  /// Smooth remainder at the pole: lim_{x->p} (G_p(x) - 1/rho_p(x)).
  double self_constant() const;

  const TorusSpec& spec() const { return spec_; }
  const EwaldParams& params() const { return params_; }

 private:
  struct RecipTerm {
    std::array<int, 3> n;
    Vec3 k;
    double w;  // (4 pi / V) exp(-k^2/4a^2) / k^2, doubled for half-space terms
  };

  void fill_phases(const Vec3& d, std::array<std::array<std::complex<double>, 64>, 3>& z) const;
  double recip_sum(const Vec3& d) const;
  Vec3 recip_grad(const Vec3& d) const;

  TorusSpec spec_;
  EwaldParams params_;
  std::vector<Vec3> images_;      // lattice vectors within r_cut + cell radius
  std::vector<RecipTerm> recip_;  // half reciprocal lattice, |k| <= g_cut
  std::array<int, 3> kmax_;
  double const_term_;  // -pi/(alpha^2 V), the neutralizing background shift
};

/// Direct lattice-sum route to the self constant: spherically resummed with a
/// C^2 radial taper between r_inner and r_outer, background subtracted by
/// quadrature of the same taper. Independent of the Ewald machinery.
double self_constant_direct(const TorusSpec& spec, double r_inner, double r_outer);

/// Same direct route for the Green's function at a general point pair.
double green_direct(const TorusSpec& spec, const Vec3& x, const Vec3& p, double r_inner,
                    double r_outer);

/// Prescribed pole data on the torus: n pole pairs +-p_i with positive
/// integer weights k_i, the 8 fixed points q_j with nonnegative weights m_j,
/// and the additive constant c0. The induced scalar charges are k_i/2 at
/// +-p_i and m_j - 2 at q_j; the balancing condition sum(m) + sum(k) = 16 is
/// equivalent to total charge zero.
struct PoleConfig {
  std::vector<Vec3> p;
  std::vector<int> k;
  std::array<int, 8> m{2, 2, 2, 2, 2, 2, 2, 2};
  double c0 = 0.0;
};

/// The 8 fixed points of x -> -x, coordinates 0 or L/2, in lexicographic
/// order. Configurations refer to them by index.
std::array<Vec3, 8> fixed_points(const TorusSpec& spec);

struct Charge {
  Vec3 pos;
  double q;
};

/// Derived charge list: one entry per element of the pole set S (2n+8
/// entries, zero charges included).
std::vector<Charge> charge_list(const PoleConfig& cfg, const TorusSpec& spec);

bool is_balanced(const PoleConfig& cfg);
double total_charge(const PoleConfig& cfg);

/// Validates box positivity, balancing, pole distinctness and placement.
/// Throws std::invalid_argument naming the violated invariant.
void validate(const PoleConfig& cfg, const TorusSpec& spec);

/// delta_0: a quarter of the smaller of the minimal pole separation and the
/// injectivity radius.
double delta0(const PoleConfig& cfg, const TorusSpec& spec);

/// Identifies a pole of a configuration.
struct PoleId {
  enum class Kind { Fixed, PairPlus, PairMinus };
  Kind kind;
  int index;
};

/// The harmonic function with the prescribed poles:
///   h = sum_i (k_i/2)(G_{p_i} + G_{-p_i}) + sum_j (m_j - 2) G_{q_j} + c0.
/// Balanced configurations make it harmonic; unbalanced ones pick up the
/// uniform background 4 pi (total charge) / vol.
class HarmonicField {
 public:
  HarmonicField(PoleConfig cfg, TorusSpec spec, EwaldParams params);

  /// Throws std::domain_error at (nonzero-charge) poles.
  double value(const Vec3& x) const;
  Vec3 gradient(const Vec3& x) const;

  /// Value with the additive constant c0 excluded (the pure Green part).
  double value_no_c0(const Vec3& x) const;

  /// Finite value at a pole after removing its own singular term.
  double regular_value(const PoleId& id) const;

  Vec3 pole_position(const PoleId& id) const;
  double pole_charge(const PoleId& id) const;

  const PoleConfig& config() const { return cfg_; }
  const TorusSpec& spec() const { return spec_; }
  const GreenEvaluator& green() const { return green_; }
  const std::vector<Charge>& charges() const { return charges_; }

 private:
  PoleConfig cfg_;
  TorusSpec spec_;
  GreenEvaluator green_;
  std::vector<Charge> charges_;
};

/// 7-point second-order finite-difference Laplacian probe.
double laplacian_probe(const std::function<double(const Vec3&)>& f, const Vec3& x, double step);

}  // namespace hkc
