#include "hkc/torus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hkc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleEps = 1e-14;

double wrap_half(double d, double l) {
  d -= l * std::round(d / l);
  if (d == -0.5 * l) d = 0.5 * l;  // keep a single representative
  return d;
}

// Upper bound for the real-space tail beyond radius R (image density 1/V).
double real_tail(double r, double alpha, double vol) {
  return 2.0 * std::sqrt(kPi) / (vol * std::pow(alpha, 3) * r) * std::exp(-alpha * alpha * r * r);
}

// Upper bound for the reciprocal tail beyond |k| = K.
double recip_tail(double k, double alpha) {
  return (2.0 / kPi) * (2.0 * alpha * alpha / k) * std::exp(-k * k / (4.0 * alpha * alpha));
}

double solve_cutoff(const std::function<double(double)>& tail, double start, double step, double tol) {
  double x = start;
  for (int it = 0; it < 10000; ++it) {
    if (tail(x) < tol) return x;
    x += step;
  }
  throw std::invalid_argument("ewald: cutoff search failed to reach tolerance");
}

}  // namespace

Vec3 min_image(const Vec3& d, const TorusSpec& spec) {
  return Vec3(wrap_half(d[0], spec.box[0]), wrap_half(d[1], spec.box[1]), wrap_half(d[2], spec.box[2]));
}

double torus_distance(const Vec3& x, const Vec3& y, const TorusSpec& spec) {
  return min_image(x - y, spec).norm();
}

EwaldParams EwaldParams::for_spec(const TorusSpec& spec, double tol, double alpha_scale) {
  const double alpha = alpha_scale * std::sqrt(kPi) / std::cbrt(spec.volume());
  return with_alpha(spec, alpha, tol);
}

EwaldParams EwaldParams::with_alpha(const TorusSpec& spec, double alpha, double tol) {
  if (alpha <= 0.0) throw std::invalid_argument("ewald: alpha must be positive");
  if (tol <= 0.0 || tol >= 1e-3) throw std::invalid_argument("ewald: tol out of range");
  const double vol = spec.volume();
  const double r0 = 1.0 / alpha;
  const double r_cut = solve_cutoff([&](double r) { return real_tail(r, alpha, vol); }, r0, 0.05 * r0, tol);
  const double g_cut = solve_cutoff([&](double k) { return recip_tail(k, alpha); }, alpha, 0.05 * alpha, tol);
  return EwaldParams{alpha, r_cut, g_cut, tol};
}

GreenEvaluator::GreenEvaluator(const TorusSpec& spec, const EwaldParams& params)
    : spec_(spec), params_(params) {
  // Image list: lattice vectors that can come within r_cut of a wrapped
  // difference vector (|d_a| <= L_a/2).
  std::array<int, 3> nmax;
  for (int a = 0; a < 3; ++a)
    nmax[a] = static_cast<int>(std::ceil((params_.r_cut + 0.5 * spec_.box[a]) / spec_.box[a]));
  const double reach = params_.r_cut + 0.5 * spec_.box.norm();
  for (int i = -nmax[0]; i <= nmax[0]; ++i)
    for (int j = -nmax[1]; j <= nmax[1]; ++j)
      for (int k = -nmax[2]; k <= nmax[2]; ++k) {
        const Vec3 v(i * spec_.box[0], j * spec_.box[1], k * spec_.box[2]);
        if (v.norm() <= reach) images_.push_back(v);
      }

  // Half reciprocal lattice (n lexicographically positive), weights doubled.
  for (int a = 0; a < 3; ++a) {
    kmax_[a] = static_cast<int>(std::floor(params_.g_cut * spec_.box[a] / (2.0 * kPi)));
    if (kmax_[a] >= 64) throw std::invalid_argument("ewald: reciprocal table too large for this alpha");
  }
  const double g2max = params_.g_cut * params_.g_cut;
  for (int i = 0; i <= kmax_[0]; ++i)
    for (int j = (i == 0 ? 0 : -kmax_[1]); j <= kmax_[1]; ++j)
      for (int k = ((i == 0 && j == 0) ? 1 : -kmax_[2]); k <= kmax_[2]; ++k) {
        const Vec3 kv(2.0 * kPi * i / spec_.box[0], 2.0 * kPi * j / spec_.box[1],
                      2.0 * kPi * k / spec_.box[2]);
        const double k2 = kv.squaredNorm();
        if (k2 > g2max) continue;
        const double w = 2.0 * (4.0 * kPi / spec_.volume()) *
                         std::exp(-k2 / (4.0 * params_.alpha * params_.alpha)) / k2;
        recip_.push_back({{i, j, k}, kv, w});
      }

  const_term_ = -kPi / (params_.alpha * params_.alpha * spec_.volume());
}

namespace {
constexpr int kPhaseSlots = 64;
using PhaseTable = std::array<std::array<std::complex<double>, kPhaseSlots>, 3>;
}  // namespace

// Separable phase tables: cos(k.d) = Re prod_a z_a^{n_a}; stack storage so
// grid sweeps stay allocation free.
void GreenEvaluator::fill_phases(const Vec3& d, PhaseTable& z) const {
  for (int a = 0; a < 3; ++a) {
    const std::complex<double> base(std::cos(2.0 * kPi * d[a] / spec_.box[a]),
                                    std::sin(2.0 * kPi * d[a] / spec_.box[a]));
    z[a][0] = 1.0;
    for (int m = 1; m <= kmax_[a]; ++m) z[a][static_cast<std::size_t>(m)] = z[a][static_cast<std::size_t>(m - 1)] * base;
  }
}

double GreenEvaluator::recip_sum(const Vec3& d) const {
  PhaseTable z;
  fill_phases(d, z);
  auto phase = [&](int a, int n) {
    return n >= 0 ? z[a][static_cast<std::size_t>(n)] : std::conj(z[a][static_cast<std::size_t>(-n)]);
  };
  double s = 0.0;
  for (const auto& t : recip_) {
    const std::complex<double> ph = phase(0, t.n[0]) * phase(1, t.n[1]) * phase(2, t.n[2]);
    s += t.w * ph.real();
  }
  return s;
}

Vec3 GreenEvaluator::recip_grad(const Vec3& d) const {
  PhaseTable z;
  fill_phases(d, z);
  auto phase = [&](int a, int n) {
    return n >= 0 ? z[a][static_cast<std::size_t>(n)] : std::conj(z[a][static_cast<std::size_t>(-n)]);
  };
  Vec3 g = Vec3::Zero();
  for (const auto& t : recip_) {
    const std::complex<double> ph = phase(0, t.n[0]) * phase(1, t.n[1]) * phase(2, t.n[2]);
    g -= t.w * ph.imag() * t.k;  // grad cos(k.d) = -k sin(k.d)
  }
  return g;
}

double GreenEvaluator::green(const Vec3& x, const Vec3& p) const {
  const Vec3 d = min_image(x - p, spec_);
  double s = 0.0;
  for (const Vec3& img : images_) {
    const double r = (d + img).norm();
    if (r < kPoleEps) throw std::domain_error("green: evaluation at the pole");
    if (r <= params_.r_cut) s += std::erfc(params_.alpha * r) / r;
  }
  return s + recip_sum(d) + const_term_;
}

Vec3 GreenEvaluator::gradient(const Vec3& x, const Vec3& p) const {
  const Vec3 d = min_image(x - p, spec_);
  Vec3 g = Vec3::Zero();
  const double a = params_.alpha;
  for (const Vec3& img : images_) {
    const Vec3 rv = d + img;
    const double r = rv.norm();
    if (r < kPoleEps) throw std::domain_error("green: evaluation at the pole");
    if (r <= params_.r_cut) {
      const double r2 = r * r;
      const double coef = -std::erfc(a * r) / (r2 * r) -
                          2.0 * a * std::exp(-a * a * r2) / (std::sqrt(kPi) * r2);
      g += coef * rv;
    }
  }
  return g + recip_grad(d);
}

double GreenEvaluator::self_constant() const {
  double s = 0.0;
  for (const Vec3& img : images_) {
    const double r = img.norm();
    if (r == 0.0) continue;
    if (r <= params_.r_cut) s += std::erfc(params_.alpha * r) / r;
  }
  double recip = 0.0;
  for (const auto& t : recip_) recip += t.w;
  return s + recip + const_term_ - 2.0 * params_.alpha / std::sqrt(kPi);
}

namespace {

// Tapered spherically-resummed lattice sum of 1/r around offset d, minus the
// neutralizing-background integral of the same taper. drop_singular removes
// the n = 0 image (for the smooth remainder at the pole).
double direct_lattice_sum(const TorusSpec& spec, const Vec3& d, double r_inner, double r_outer,
                          bool drop_singular) {
  if (!(0.0 < r_inner && r_inner < r_outer))
    throw std::invalid_argument("direct lattice sum: need 0 < r_inner < r_outer");
  const double w = r_outer - r_inner;
  // C^3 radial taper; the smoother the cutoff, the faster the shell sum
  // converges to the background-subtracted limit.
  auto taper = [&](double r) {
    if (r <= r_inner) return 1.0;
    if (r >= r_outer) return 0.0;
    const double t = (r - r_inner) / w;
    return 1.0 - t * t * t * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
  };

  double lattice = 0.0;
  std::array<int, 3> nmax;
  for (int a = 0; a < 3; ++a)
    nmax[a] = static_cast<int>(std::ceil((r_outer + std::abs(d[a])) / spec.box[a]));
  for (int i = -nmax[0]; i <= nmax[0]; ++i)
    for (int j = -nmax[1]; j <= nmax[1]; ++j)
      for (int k = -nmax[2]; k <= nmax[2]; ++k) {
        if (drop_singular && i == 0 && j == 0 && k == 0) continue;
        const double r =
            (d + Vec3(i * spec.box[0], j * spec.box[1], k * spec.box[2])).norm();
        if (r < r_outer) lattice += taper(r) / r;
      }

  // Neutralizing background: (1/V) * 4 pi * int_0^{r_outer} r T(r) dr, by
  // composite Simpson on the smooth taper.
  const int segments = 4096;
  const double hstep = r_outer / segments;
  double integral = 0.0;
  for (int s = 0; s < segments; ++s) {
    const double a = s * hstep, b = a + hstep, mid = a + 0.5 * hstep;
    integral += (hstep / 6.0) * (a * taper(a) + 4.0 * mid * taper(mid) + b * taper(b));
  }
  return lattice - 4.0 * kPi * integral / spec.volume();
}

}  // namespace

double self_constant_direct(const TorusSpec& spec, double r_inner, double r_outer) {
  return direct_lattice_sum(spec, Vec3::Zero(), r_inner, r_outer, true);
}

double green_direct(const TorusSpec& spec, const Vec3& x, const Vec3& p, double r_inner,
                    double r_outer) {
  const Vec3 d = min_image(x - p, spec);
  if (d.norm() < kPoleEps) throw std::domain_error("green_direct: evaluation at the pole");
  return direct_lattice_sum(spec, d, r_inner, r_outer, false);
}

std::array<Vec3, 8> fixed_points(const TorusSpec& spec) {
  std::array<Vec3, 8> q;
  for (int b = 0; b < 8; ++b) {
    q[static_cast<std::size_t>(b)] =
        Vec3((b & 4) ? 0.5 * spec.box[0] : 0.0, (b & 2) ? 0.5 * spec.box[1] : 0.0,
             (b & 1) ? 0.5 * spec.box[2] : 0.0);
  }
  return q;
}

std::vector<Charge> charge_list(const PoleConfig& cfg, const TorusSpec& spec) {
  std::vector<Charge> out;
  out.reserve(2 * cfg.p.size() + 8);
  for (std::size_t i = 0; i < cfg.p.size(); ++i) {
    out.push_back({cfg.p[i], 0.5 * cfg.k[i]});
    out.push_back({min_image(-cfg.p[i], spec), 0.5 * cfg.k[i]});
  }
  const auto q = fixed_points(spec);
  for (int j = 0; j < 8; ++j) out.push_back({q[static_cast<std::size_t>(j)], cfg.m[static_cast<std::size_t>(j)] - 2.0});
  return out;
}

double total_charge(const PoleConfig& cfg) {
  double s = 0.0;
  for (int ki : cfg.k) s += ki;
  for (int mj : cfg.m) s += mj;
  return s - 16.0;
}

bool is_balanced(const PoleConfig& cfg) { return total_charge(cfg) == 0.0; }

void validate(const PoleConfig& cfg, const TorusSpec& spec) {
  if (!(spec.box.minCoeff() > 0.0)) throw std::invalid_argument("box: all lengths must be positive");
  if (cfg.p.size() != cfg.k.size())
    throw std::invalid_argument("poles: p and k must have the same length");
  for (int ki : cfg.k)
    if (ki <= 0) throw std::invalid_argument("poles: all k must be positive integers");
  for (int mj : cfg.m)
    if (mj < 0) throw std::invalid_argument("poles: all m must be nonnegative integers");
  if (!is_balanced(cfg)) {
    int sum = 0;
    for (int ki : cfg.k) sum += ki;
    for (int mj : cfg.m) sum += mj;
    throw std::invalid_argument("balancing: sum(m) + sum(k) = " + std::to_string(sum) + " != 16");
  }
  // p points must avoid the fixed-point set and each other (including the
  // implicit mirror points).
  const auto charges = charge_list(cfg, spec);
  const std::size_t np2 = 2 * cfg.p.size();
  for (std::size_t i = 0; i < cfg.p.size(); ++i) {
    if (torus_distance(cfg.p[i], min_image(-cfg.p[i], spec), spec) < 1e-12)
      throw std::invalid_argument("poles: p[" + std::to_string(i) + "] is a fixed point of x -> -x");
  }
  for (std::size_t i = 0; i < charges.size(); ++i)
    for (std::size_t j = i + 1; j < charges.size(); ++j) {
      if (j < np2 || i < np2) {  // pairs involving at least one p-type pole
        if (torus_distance(charges[i].pos, charges[j].pos, spec) < 1e-12)
          throw std::invalid_argument("poles: pole positions must be pairwise distinct");
      }
    }
}

double delta0(const PoleConfig& cfg, const TorusSpec& spec) {
  const auto charges = charge_list(cfg, spec);
  double dmin = spec.injectivity();
  for (std::size_t i = 0; i < charges.size(); ++i)
    for (std::size_t j = i + 1; j < charges.size(); ++j)
      dmin = std::min(dmin, torus_distance(charges[i].pos, charges[j].pos, spec));
  return 0.25 * dmin;
}

HarmonicField::HarmonicField(PoleConfig cfg, TorusSpec spec, EwaldParams params)
    : cfg_(std::move(cfg)), spec_(spec), green_(spec, params), charges_(charge_list(cfg_, spec_)) {}

double HarmonicField::value_no_c0(const Vec3& x) const {
  double s = 0.0;
  for (const Charge& c : charges_) {
    if (c.q == 0.0) continue;
    s += c.q * green_.green(x, c.pos);
  }
  return s;
}

double HarmonicField::value(const Vec3& x) const { return value_no_c0(x) + cfg_.c0; }

Vec3 HarmonicField::gradient(const Vec3& x) const {
  Vec3 g = Vec3::Zero();
  for (const Charge& c : charges_) {
    if (c.q == 0.0) continue;
    g += c.q * green_.gradient(x, c.pos);
  }
  return g;
}

Vec3 HarmonicField::pole_position(const PoleId& id) const {
  switch (id.kind) {
    case PoleId::Kind::Fixed:
      return fixed_points(spec_)[static_cast<std::size_t>(id.index)];
    case PoleId::Kind::PairPlus:
      return cfg_.p[static_cast<std::size_t>(id.index)];
    case PoleId::Kind::PairMinus:
      return min_image(-cfg_.p[static_cast<std::size_t>(id.index)], spec_);
  }
  throw std::invalid_argument("pole_position: bad id");
}

double HarmonicField::pole_charge(const PoleId& id) const {
  switch (id.kind) {
    case PoleId::Kind::Fixed:
      return cfg_.m[static_cast<std::size_t>(id.index)] - 2.0;
    case PoleId::Kind::PairPlus:
    case PoleId::Kind::PairMinus:
      return 0.5 * cfg_.k[static_cast<std::size_t>(id.index)];
  }
  throw std::invalid_argument("pole_charge: bad id");
}

double HarmonicField::regular_value(const PoleId& id) const {
  const Vec3 pos = pole_position(id);
  const double own = pole_charge(id);
  double s = cfg_.c0 + own * green_.self_constant();
  for (const Charge& c : charges_) {
    if (c.q == 0.0) continue;
    if (torus_distance(c.pos, pos, spec_) < 1e-12) continue;  // the pole's own term
    s += c.q * green_.green(pos, c.pos);
  }
  return s;
}

double laplacian_probe(const std::function<double(const Vec3&)>& f, const Vec3& x, double step) {
  double s = -6.0 * f(x);
  for (int a = 0; a < 3; ++a) {
    Vec3 e = Vec3::Zero();
    e[a] = step;
    s += f(x + e) + f(x - e);
  }
  return s / (step * step);
}

}  // namespace hkc
