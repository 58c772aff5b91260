#include "hkc/calibration.hpp"

#include <cmath>
#include <stdexcept>

namespace hkc {

namespace {

inline double sq(double x) { return x * x; }

// Entry accessor in the h/l convention: h in 1..3 (target), l in 0..3.
inline double at(const LinearMap34& m, int h, int l) { return m(h - 1, l); }

// The twelve squared difference terms of the tau expansion. tau is the energy
// minus half this sum; the wedge route tau_wedge is the independent check.
double difference_term_sum(const LinearMap34& a) {
  double s = 0.0;
  s += sq(at(a, 2, 0) - at(a, 3, 1)) + sq(at(a, 2, 0) + at(a, 1, 3)) + sq(at(a, 1, 3) + at(a, 3, 1));
  s += sq(at(a, 3, 0) - at(a, 1, 2)) + sq(at(a, 3, 0) + at(a, 2, 1)) + sq(at(a, 1, 2) + at(a, 2, 1));
  s += sq(at(a, 1, 0) - at(a, 2, 3)) + sq(at(a, 1, 0) + at(a, 3, 2)) + sq(at(a, 2, 3) + at(a, 3, 2));
  s += sq(at(a, 1, 1) - at(a, 2, 2)) + sq(at(a, 2, 2) - at(a, 3, 3)) + sq(at(a, 1, 1) - at(a, 3, 3));
  return s;
}

}  // namespace

double energy_density(const LinearMap34& a) { return a.squaredNorm(); }

double tau(const LinearMap34& a) { return energy_density(a) - 0.5 * difference_term_sum(a); }

double calibration_gap_terms(const LinearMap34& a) { return 0.5 * difference_term_sum(a); }

double tau_wedge(const LinearMap34& a) {
  const FormTriple std_t = standard_triple();
  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const KForm4 pulled = pullback(a, KForm3::basis(2, i));
    total += wedge(std_t[i], pulled)[0];
  }
  return total;
}

double equality_locus_violation(const LinearMap34& a) {
  double v = 0.0;
  auto upd = [&v](double x) { v = std::max(v, std::abs(x)); };
  upd(at(a, 1, 1) - at(a, 2, 2));
  upd(at(a, 2, 2) - at(a, 3, 3));
  upd(at(a, 2, 0) - at(a, 3, 1));
  upd(at(a, 3, 1) + at(a, 1, 3));
  upd(at(a, 3, 0) - at(a, 1, 2));
  upd(at(a, 1, 2) + at(a, 2, 1));
  upd(at(a, 1, 0) - at(a, 2, 3));
  upd(at(a, 2, 3) + at(a, 3, 2));
  return v;
}

LinearMap34 calibrated_map(double b, const Vec3& off) {
  LinearMap34 a = LinearMap34::Zero();
  for (int i = 1; i <= 3; ++i) {
    const int j = i % 3 + 1, k = j % 3 + 1;
    a(i - 1, 0) = off[i - 1];
    a(i - 1, i) = b;
    a(j - 1, k) = off[i - 1];
    a(k - 1, j) = -off[i - 1];
  }
  return a;
}

KForm4 pullback(const LinearMap34& a, const KForm3& form) {
  switch (form.degree) {
    case 0: {
      KForm4 r(0);
      r[0] = form[0];
      return r;
    }
    case 1: {
      Vec4 v = Vec4::Zero();
      for (int h = 0; h < 3; ++h)
        for (int l = 0; l < 4; ++l) v[l] += form[h] * a(h, l);
      return KForm4::one_form(v);
    }
    case 2: {
      // Pull each cyclic basis 2-form f^j ^ f^k through the rows.
      KForm4 r(2);
      for (int i = 0; i < 3; ++i) {
        if (form[i] == 0.0) continue;
        const int j = (i + 1) % 3, k = (i + 2) % 3;
        const KForm4 pj = KForm4::one_form(a.row(j).transpose());
        const KForm4 pk = KForm4::one_form(a.row(k).transpose());
        r += form[i] * wedge(pj, pk);
      }
      return r;
    }
    case 3: {
      const KForm4 p1 = KForm4::one_form(a.row(0).transpose());
      const KForm4 p2 = KForm4::one_form(a.row(1).transpose());
      const KForm4 p3 = KForm4::one_form(a.row(2).transpose());
      return form[0] * wedge(wedge(p1, p2), p3);
    }
    default:
      throw std::invalid_argument("pullback: degree out of range");
  }
}

Reconstruction reconstruct(const LinearMap34& a, double tol) {
  const double tr = energy_density(a);
  if (tr == 0.0) throw std::domain_error("reconstruct: A = 0 has no factorization");
  const double gap = energy_density(a) - tau(a);
  if (gap > tol) throw std::domain_error("reconstruct: map is not calibrated");

  // Parameters of the equality locus, averaged over the tied entries.
  const double b = (at(a, 1, 1) + at(a, 2, 2) + at(a, 3, 3)) / 3.0;
  Vec3 off;
  off[0] = (at(a, 1, 0) + at(a, 2, 3) - at(a, 3, 2)) / 3.0;
  off[1] = (at(a, 2, 0) + at(a, 3, 1) - at(a, 1, 3)) / 3.0;
  off[2] = (at(a, 3, 0) + at(a, 1, 2) - at(a, 2, 1)) / 3.0;

  KForm4 alpha = KForm4::one_form(Vec4(b, -off[0], -off[1], -off[2]));

  std::array<KForm4, 3> mu{pullback(a, KForm3::basis(1, 0)), pullback(a, KForm3::basis(1, 1)),
                           pullback(a, KForm3::basis(1, 2))};

  const FormTriple target = standard_triple();
  double num = 0.0, den = 0.0;
  std::array<KForm4, 3> base{KForm4(2), KForm4(2), KForm4(2)};
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    base[static_cast<std::size_t>(i)] = wedge(alpha, mu[static_cast<std::size_t>(i)]) +
                                        wedge(mu[static_cast<std::size_t>(j)], mu[static_cast<std::size_t>(k)]);
    for (int s = 0; s < 6; ++s) {
      num += base[static_cast<std::size_t>(i)][s] * target[i][s];
      den += base[static_cast<std::size_t>(i)][s] * base[static_cast<std::size_t>(i)][s];
    }
  }
  if (den == 0.0) throw std::domain_error("reconstruct: degenerate factorization basis");
  const double d = num / den;

  Reconstruction rec{KForm4(1), d, FormTriple{}, 0.0, std::sqrt(tr / 3.0), 3.0 / tr, DFormula::Neither};
  rec.theta = d * alpha;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    rec.triple[i] = wedge(rec.theta, mu[static_cast<std::size_t>(i)]) +
                    d * wedge(mu[static_cast<std::size_t>(j)], mu[static_cast<std::size_t>(k)]);
    rec.residual = std::max(rec.residual, (rec.triple[i] - target[i]).max_abs());
  }

  const double match_tol = 1e-6 * std::max(1.0, std::abs(d));
  const bool ms = std::abs(d - rec.d_statement) <= match_tol;
  const bool mp = std::abs(d - rec.d_proof) <= match_tol;
  rec.match = ms && mp ? DFormula::Both : ms ? DFormula::Statement : mp ? DFormula::Proof : DFormula::Neither;
  return rec;
}

CalibrationReport calibration_report(const LinearMap34& a, double tol) {
  CalibrationReport rep;
  rep.tau = tau(a);
  rep.energy = energy_density(a);
  rep.gap = rep.energy - rep.tau;
  const double terms = calibration_gap_terms(a);
  if (std::abs(rep.gap - terms) > 1e-12 * std::max(1.0, rep.energy))
    throw std::logic_error("calibration_report: gap expansions disagree");
  rep.calibrated = terms <= tol;
  if (rep.calibrated && rep.energy > 0.0) {
    const Reconstruction rec = reconstruct(a, tol);
    rep.theta = rec.theta;
    rep.d_const = rec.d_const;
  }
  return rep;
}

const char* to_string(DFormula f) {
  switch (f) {
    case DFormula::Statement: return "statement sqrt(tr/3)";
    case DFormula::Proof: return "proof 3/tr";
    case DFormula::Both: return "both (tr = 3)";
    default: return "neither";
  }
}

}  // namespace hkc
