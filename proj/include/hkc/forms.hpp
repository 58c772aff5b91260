#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>

namespace hkc {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

// ---------------------------------------------------------------------------
// Constant-coefficient exterior algebra on R^4 (coframe e^0..e^3) and on the
// R^3 target (coframe f^1..f^3).
//
// Basis order per degree on R^4:
//   k=0: 1
//   k=1: e0, e1, e2, e3
//   k=2: e01, e02, e03, e23, e31, e12
//   k=3: e012, e013, e023, e123
//   k=4: e0123
// The k=2 order keeps self-dual forms in clean coordinates: the standard
// triple is (1,0,0,1,0,0), (0,1,0,0,1,0), (0,0,1,0,0,1). Note e31 is stored
// with indices written as (3,1), i.e. it equals -e13 in lexicographic terms.
// File formats and tests use this order throughout.
// ---------------------------------------------------------------------------

struct KForm4 {
  int degree = 0;
  std::array<double, 6> c{};  // first dim() entries are used

  KForm4() = default;
  explicit KForm4(int k) : degree(k) {}

  static constexpr std::array<int, 5> kDims{1, 4, 6, 4, 1};
  int dim() const { return kDims[static_cast<std::size_t>(degree)]; }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  KForm4& operator+=(const KForm4& o);
  KForm4& operator-=(const KForm4& o);
  KForm4& operator*=(double s);
  friend KForm4 operator+(KForm4 a, const KForm4& b) { return a += b; }
  friend KForm4 operator-(KForm4 a, const KForm4& b) { return a -= b; }
  friend KForm4 operator*(double s, KForm4 a) { return a *= s; }

  double max_abs() const;

  static KForm4 basis(int degree, int slot);
  static KForm4 one_form(const Vec4& coeffs);
  static KForm4 from_coeffs(int degree, std::initializer_list<double> coeffs);
};

/// Forms on the R^3 target. Basis order: k=1: f1,f2,f3; k=2: f23, f31, f12.
struct KForm3 {
  int degree = 0;
  std::array<double, 3> c{};

  KForm3() = default;
  explicit KForm3(int k) : degree(k) {}

  static constexpr std::array<int, 4> kDims{1, 3, 3, 1};
  int dim() const { return kDims[static_cast<std::size_t>(degree)]; }

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  static KForm3 basis(int degree, int slot);
};

struct FormTriple {
  std::array<KForm4, 3> omega;

  FormTriple();
  FormTriple(const KForm4& o1, const KForm4& o2, const KForm4& o3);

  KForm4& operator[](int i) { return omega[static_cast<std::size_t>(i)]; }
  const KForm4& operator[](int i) const { return omega[static_cast<std::size_t>(i)]; }

  FormTriple& operator*=(double s);
  friend FormTriple operator*(double s, FormTriple t) { return t *= s; }
};

/// The standard triple omega_i = e0^ei + ej^ek, (i,j,k) cyclic.
FormTriple standard_triple();

struct Metric4 {
  Mat4 g = Mat4::Identity();
  int sign = +1;  // sign of the symmetric tensor before taking |.|
};

struct GramData {
  Mat3 Q;      // wedge Gram matrix, normalized to det(Q) = 1
  double mu;   // coefficient of the orientation 4-form w.r.t. e0123
  int sign;    // sign of mu relative to e0123
};

/// Graded-anticommutative exterior product. Throws std::invalid_argument when
/// the degrees overflow 4.
KForm4 wedge(const KForm4& a, const KForm4& b);
KForm3 wedge3(const KForm3& a, const KForm3& b);

/// Interior product i_u a. Throws on degree-0 input.
KForm4 interior(const Vec4& u, const KForm4& a);

/// Wedge Gram data of a triple of 2-forms. Throws std::domain_error when the
/// triple is not definite (Q degenerate or not positive definite).
GramData gram(const FormTriple& t);

/// Equal nonzero squares and vanishing pairwise wedges, within tol*|omega_1^2|.
bool is_su2(const FormTriple& t, double tol);

/// Metric induced by a definite triple: normalize by the principal square
/// root of Q, assemble the symmetric tensor from contractions, fix the sign.
Metric4 metric_of(const FormTriple& t);

/// Norm on Lambda^k induced by an SPD metric. Throws on non-SPD input.
double form_norm(const KForm4& a, const Metric4& g);

/// Tightest (lmin, lmax) with lmin*g0 <= g1 <= lmax*g0, via the generalized
/// eigenvalues of the pencil (g1, g0). Throws on non-SPD input.
std::pair<double, double> compare_metrics(const Metric4& g0, const Metric4& g1);

}  // namespace hkc
