#include "hkc/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace hkc {

namespace {
constexpr double kPi = std::numbers::pi;

double wrapped_sq(double x, double c, double l) {
  double d = x - c;
  d -= l * std::round(d / l);
  return d * d;
}
}  // namespace

ExclusionMask::ExclusionMask(const MidpointGrid& grid, const std::vector<Vec3>& centers,
                             double radius)
    : ncenters_(centers.size()), stride_(static_cast<std::size_t>(grid.n)), r2_(radius * radius) {
  ax_.resize(ncenters_ * stride_);
  ay_.resize(ncenters_ * stride_);
  az_.resize(ncenters_ * stride_);
  for (std::size_t c = 0; c < ncenters_; ++c)
    for (int i = 0; i < grid.n; ++i) {
      const std::size_t at = c * stride_ + static_cast<std::size_t>(i);
      ax_[at] = wrapped_sq((i + 0.5) * grid.spec.box[0] / grid.n, centers[c][0], grid.spec.box[0]);
      ay_[at] = wrapped_sq((i + 0.5) * grid.spec.box[1] / grid.n, centers[c][1], grid.spec.box[1]);
      az_[at] = wrapped_sq((i + 0.5) * grid.spec.box[2] / grid.n, centers[c][2], grid.spec.box[2]);
    }
}

void check_exclusion_radius(const PoleConfig& cfg, const TorusSpec& spec, double r) {
  if (r <= 0.0) return;
  if (r >= spec.injectivity())
    throw std::domain_error("quadrature: exclusion radius reaches the injectivity radius");
  const auto charges = charge_list(cfg, spec);
  for (std::size_t i = 0; i < charges.size(); ++i)
    for (std::size_t j = i + 1; j < charges.size(); ++j)
      if (torus_distance(charges[i].pos, charges[j].pos, spec) <= 2.0 * r)
        throw std::domain_error("quadrature: overlapping exclusion balls");
}

QuadResult integrate_h_full(const HarmonicField& field, const QuadratureSpec& qspec, Exec exec) {
  const TorusSpec& spec = field.spec();
  const double r0 = delta0(field.config(), spec);
  const auto& charges = field.charges();

  const GreenEvaluator& green = field.green();
  auto integrand = [&](const Vec3& x) {
    for (const Charge& c : charges) {
      const double d = torus_distance(x, c.pos, spec);
      if (d < r0) {
        // Smooth remainder inside the subtraction ball. Assembled termwise so
        // a sample point landing on the pole itself stays finite.
        double s = field.config().c0;
        for (const Charge& t : charges) {
          if (t.q == 0.0) continue;
          if (&t == &c) {
            s += d < 1e-9 ? t.q * green.self_constant() : t.q * (green.green(x, t.pos) - 1.0 / d);
          } else {
            s += t.q * green.green(x, t.pos);
          }
        }
        return s;
      }
    }
    return field.value(x);
  };

  PoleConfig empty;  // no exclusion: the singular parts are subtracted instead
  QuadResult res = quad_region(integrand, empty, spec, qspec, 0.0, exec);
  double analytic = 0.0;
  for (const Charge& c : charges) analytic += 2.0 * kPi * c.q * r0 * r0;
  res.value += analytic;
  return res;
}

PowerFit fit_power(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("fit_power: size mismatch");
  if (xs.size() < 4) throw std::invalid_argument("fit_power: need at least 4 points");
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("fit_power: nonpositive data");
    const double lx = std::log(xs[i]), ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  const double dn = static_cast<double>(n);
  const double vxx = sxx - sx * sx / dn;
  const double vxy = sxy - sx * sy / dn;
  const double vyy = syy - sy * sy / dn;
  if (vxx == 0.0) throw std::invalid_argument("fit_power: xs are all equal");
  const double slope = vxy / vxx;
  const double intercept = (sy - slope * sx) / dn;
  const double r2 = vyy == 0.0 ? 1.0 : (vxy * vxy) / (vxx * vyy);
  return {slope, std::exp(intercept), r2};
}

}  // namespace hkc
