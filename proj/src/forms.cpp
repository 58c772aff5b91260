#include "hkc/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace hkc {

namespace {

// Basis slots per degree as index bitmasks over {0,1,2,3}, in the documented
// order, together with the parity of the written index order relative to
// ascending order (only e31 is written out of order).
struct Slot {
  unsigned mask;
  int sign;
};

constexpr std::array<Slot, 1> kSlots0{{{0u, +1}}};
constexpr std::array<Slot, 4> kSlots1{{{1u, +1}, {2u, +1}, {4u, +1}, {8u, +1}}};
constexpr std::array<Slot, 6> kSlots2{{{0b0011u, +1},
                                       {0b0101u, +1},
                                       {0b1001u, +1},
                                       {0b1100u, +1},
                                       {0b1010u, -1},   // e31
                                       {0b0110u, +1}}};
constexpr std::array<Slot, 4> kSlots3{{{0b0111u, +1}, {0b1011u, +1}, {0b1101u, +1}, {0b1110u, +1}}};
constexpr std::array<Slot, 1> kSlots4{{{0b1111u, +1}}};

const Slot* slots_of(int degree) {
  switch (degree) {
    case 0: return kSlots0.data();
    case 1: return kSlots1.data();
    case 2: return kSlots2.data();
    case 3: return kSlots3.data();
    case 4: return kSlots4.data();
    default: throw std::invalid_argument("KForm4: degree out of range");
  }
}

int slot_of_mask(int degree, unsigned mask) {
  const Slot* s = slots_of(degree);
  for (int i = 0; i < KForm4::kDims[static_cast<std::size_t>(degree)]; ++i)
    if (s[i].mask == mask) return i;
  throw std::logic_error("KForm4: mask not found");
}

// Sign of sorting the concatenation of two ascending disjoint index sets.
int merge_sign(unsigned a, unsigned b) {
  int swaps = 0;
  unsigned bb = b;
  while (bb) {
    const unsigned j = static_cast<unsigned>(__builtin_ctz(bb));
    swaps += __builtin_popcount(a >> (j + 1));
    bb &= bb - 1;
  }
  return (swaps & 1) ? -1 : +1;
}

// Index list (ascending) of a mask.
int mask_indices(unsigned mask, std::array<int, 4>& out) {
  int n = 0;
  for (int i = 0; i < 4; ++i)
    if (mask & (1u << i)) out[static_cast<std::size_t>(n++)] = i;
  return n;
}

void check_spd(const Mat4& g) {
  Eigen::LLT<Mat4> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("metric is not symmetric positive definite");
}

}  // namespace

KForm4& KForm4::operator+=(const KForm4& o) {
  if (degree != o.degree) throw std::invalid_argument("KForm4: degree mismatch");
  for (int i = 0; i < dim(); ++i) c[static_cast<std::size_t>(i)] += o[i];
  return *this;
}

KForm4& KForm4::operator-=(const KForm4& o) {
  if (degree != o.degree) throw std::invalid_argument("KForm4: degree mismatch");
  for (int i = 0; i < dim(); ++i) c[static_cast<std::size_t>(i)] -= o[i];
  return *this;
}

KForm4& KForm4::operator*=(double s) {
  for (int i = 0; i < dim(); ++i) c[static_cast<std::size_t>(i)] *= s;
  return *this;
}

double KForm4::max_abs() const {
  double m = 0.0;
  for (int i = 0; i < dim(); ++i) m = std::max(m, std::abs((*this)[i]));
  return m;
}

KForm4 KForm4::basis(int degree, int slot) {
  KForm4 a(degree);
  a[slot] = 1.0;
  return a;
}

KForm4 KForm4::one_form(const Vec4& coeffs) {
  KForm4 a(1);
  for (int i = 0; i < 4; ++i) a[i] = coeffs[i];
  return a;
}

KForm4 KForm4::from_coeffs(int degree, std::initializer_list<double> coeffs) {
  KForm4 a(degree);
  if (static_cast<int>(coeffs.size()) != a.dim())
    throw std::invalid_argument("KForm4: wrong coefficient count");
  int i = 0;
  for (double v : coeffs) a[i++] = v;
  return a;
}

KForm3 KForm3::basis(int degree, int slot) {
  KForm3 a(degree);
  a[slot] = 1.0;
  return a;
}

FormTriple::FormTriple() : omega{KForm4(2), KForm4(2), KForm4(2)} {}

FormTriple::FormTriple(const KForm4& o1, const KForm4& o2, const KForm4& o3) : omega{o1, o2, o3} {
  for (const auto& w : omega)
    if (w.degree != 2) throw std::invalid_argument("FormTriple: all members must be 2-forms");
}

FormTriple& FormTriple::operator*=(double s) {
  for (auto& w : omega) w *= s;
  return *this;
}

FormTriple standard_triple() {
  FormTriple t;
  t[0] = KForm4::from_coeffs(2, {1, 0, 0, 1, 0, 0});
  t[1] = KForm4::from_coeffs(2, {0, 1, 0, 0, 1, 0});
  t[2] = KForm4::from_coeffs(2, {0, 0, 1, 0, 0, 1});
  return t;
}

KForm4 wedge(const KForm4& a, const KForm4& b) {
  const int k = a.degree, l = b.degree;
  if (k + l > 4) throw std::invalid_argument("wedge: degree overflow");
  KForm4 r(k + l);
  const Slot* sa = slots_of(k);
  const Slot* sb = slots_of(l);
  for (int i = 0; i < a.dim(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (int j = 0; j < b.dim(); ++j) {
      const double bj = b[j];
      if (bj == 0.0) continue;
      const unsigned ma = sa[i].mask, mb = sb[j].mask;
      if (ma & mb) continue;
      const unsigned mr = ma | mb;
      const int slot = slot_of_mask(k + l, mr);
      const int sgn = sa[i].sign * sb[j].sign * merge_sign(ma, mb) * slots_of(k + l)[slot].sign;
      r[slot] += sgn * ai * bj;
    }
  }
  return r;
}

KForm3 wedge3(const KForm3& a, const KForm3& b) {
  const int k = a.degree, l = b.degree;
  if (k + l > 3) throw std::invalid_argument("wedge3: degree overflow");
  KForm3 r(k + l);
  if (k == 0 || l == 0) {
    const KForm3& form = (k == 0) ? b : a;
    const double s = (k == 0) ? a[0] : b[0];
    r = form;
    for (int i = 0; i < r.dim(); ++i) r[i] *= s;
    return r;
  }
  if (k == 1 && l == 1) {
    // (f^j ^ f^k) slots are cyclic: slot i holds f^j ^ f^k with (i,j,k) cyclic.
    r[0] = a[1] * b[2] - a[2] * b[1];
    r[1] = a[2] * b[0] - a[0] * b[2];
    r[2] = a[0] * b[1] - a[1] * b[0];
    return r;
  }
  // 1-form ^ 2-form or 2-form ^ 1-form -> multiple of f123.
  const KForm3& one = (k == 1) ? a : b;
  const KForm3& two = (k == 1) ? b : a;
  r[0] = one[0] * two[0] + one[1] * two[1] + one[2] * two[2];
  return r;
}

KForm4 interior(const Vec4& u, const KForm4& a) {
  if (a.degree == 0) throw std::invalid_argument("interior: degree-0 input");
  KForm4 r(a.degree - 1);
  const Slot* sa = slots_of(a.degree);
  for (int i = 0; i < a.dim(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    std::array<int, 4> idx{};
    const int n = mask_indices(sa[i].mask, idx);
    for (int pos = 0; pos < n; ++pos) {
      const int drop = idx[static_cast<std::size_t>(pos)];
      const double uc = u[drop];
      if (uc == 0.0) continue;
      const unsigned mrem = sa[i].mask & ~(1u << drop);
      const int slot = slot_of_mask(a.degree - 1, mrem);
      const int sgn = ((pos & 1) ? -1 : +1) * sa[i].sign * slots_of(a.degree - 1)[slot].sign;
      r[slot] += sgn * uc * ai;
    }
  }
  return r;
}

GramData gram(const FormTriple& t) {
  Mat3 raw;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const double w = wedge(t[i], t[j])[0];
      raw(i, j) = w;
      raw(j, i) = w;
    }
  const double sq0 = raw(0, 0);
  if (sq0 == 0.0) throw std::domain_error("gram: omega_1^2 vanishes");
  const double det = raw.determinant();
  const double scale = std::pow(std::abs(sq0), 3);
  if (std::abs(det) <= 1e-12 * scale)
    throw std::domain_error("gram: not a definite triple (degenerate wedge Gram matrix)");
  const double mu = std::copysign(std::cbrt(std::abs(det)), det);
  Mat3 Q = raw / mu;
  Eigen::SelfAdjointEigenSolver<Mat3> es(Q);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::domain_error("gram: not a definite triple (Q not positive definite)");
  return GramData{Q, mu, mu > 0 ? +1 : -1};
}

bool is_su2(const FormTriple& t, double tol) {
  const double s0 = wedge(t[0], t[0])[0];
  if (s0 == 0.0) return false;
  const double ref = std::abs(s0);
  for (int i = 1; i < 3; ++i)
    if (std::abs(wedge(t[i], t[i])[0] - s0) > tol * ref) return false;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (std::abs(wedge(t[i], t[j])[0]) > tol * ref) return false;
  return true;
}

Metric4 metric_of(const FormTriple& t) {
  const GramData gd = gram(t);
  Eigen::SelfAdjointEigenSolver<Mat3> es(gd.Q);
  constexpr double kEigFloor = 1e-12;
  if (es.eigenvalues().minCoeff() < kEigFloor)
    throw std::domain_error("metric_of: not a definite triple (Q eigenvalue below floor)");
  const Mat3 p_inv = es.eigenvectors() *
                     es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                     es.eigenvectors().transpose();

  FormTriple w;
  for (int i = 0; i < 3; ++i) {
    KForm4 acc(2);
    for (int j = 0; j < 3; ++j) acc += p_inv(i, j) * t[j];
    w[i] = acc;
  }

  const double sq = wedge(w[0], w[0])[0];
  Mat4 s;
  for (int l = 0; l < 4; ++l) {
    const KForm4 il = interior(Vec4::Unit(l), w[0]);
    for (int m = 0; m < 4; ++m) {
      const KForm4 im = interior(Vec4::Unit(m), w[1]);
      s(l, m) = 2.0 * wedge(wedge(il, im), w[2])[0] / sq;
    }
  }
  s = 0.5 * (s + s.transpose()).eval();

  const int sign = s(0, 0) >= 0 ? +1 : -1;
  Mat4 g = sign * s;
  Eigen::LLT<Mat4> llt(g);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("metric_of: induced tensor is not definite");
  return Metric4{g, sign};
}

double form_norm(const KForm4& a, const Metric4& g) {
  check_spd(g.g);
  const Mat4 dual = g.g.inverse();
  const int k = a.degree;
  if (k == 0) return std::abs(a[0]);
  const Slot* slots = slots_of(k);
  double n2 = 0.0;
  for (int i = 0; i < a.dim(); ++i) {
    if (a[i] == 0.0) continue;
    std::array<int, 4> ia{};
    mask_indices(slots[i].mask, ia);
    for (int j = 0; j < a.dim(); ++j) {
      if (a[j] == 0.0) continue;
      std::array<int, 4> ja{};
      mask_indices(slots[j].mask, ja);
      Eigen::MatrixXd m(k, k);
      for (int r = 0; r < k; ++r)
        for (int cidx = 0; cidx < k; ++cidx)
          m(r, cidx) = dual(ia[static_cast<std::size_t>(r)], ja[static_cast<std::size_t>(cidx)]);
      n2 += slots[i].sign * slots[j].sign * a[i] * a[j] * m.determinant();
    }
  }
  return std::sqrt(std::max(0.0, n2));
}

std::pair<double, double> compare_metrics(const Metric4& g0, const Metric4& g1) {
  check_spd(g0.g);
  check_spd(g1.g);
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat4> ges(g1.g, g0.g);
  const auto& ev = ges.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

}  // namespace hkc
