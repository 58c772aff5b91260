#include <doctest.h>

#include <cmath>

#include "hkc/forms.hpp"
#include "test_support.hpp"

using namespace hkc;

TEST_CASE("wedge on basis forms") {
  const KForm4 e01 = KForm4::basis(2, 0);
  const KForm4 e23 = KForm4::basis(2, 3);
  CHECK(wedge(e01, e23)[0] == doctest::Approx(1.0));

  // graded anticommutativity for 2-forms: a ^ b = b ^ a
  CHECK(wedge(e23, e01)[0] == doctest::Approx(1.0));

  const KForm4 e0 = KForm4::basis(1, 0);
  const KForm4 e1 = KForm4::basis(1, 1);
  CHECK(wedge(e0, e1)[0] == doctest::Approx(1.0));  // e0 ^ e1 = +e01
  CHECK(wedge(e1, e0)[0] == doctest::Approx(-1.0));
}

TEST_CASE("a ^ a = 0 for 1-forms") {
  Rng rng(7);
  for (int s = 0; s < 100; ++s) {
    const KForm4 a = test::random_form(rng, 1);
    CHECK(wedge(a, a).max_abs() == doctest::Approx(0.0));
  }
}

TEST_CASE("standard triple wedge relations") {
  const FormTriple t = standard_triple();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double w = wedge(t[i], t[j])[0];
      if (i == j)
        CHECK(w == doctest::Approx(2.0));
      else
        CHECK(w == doctest::Approx(0.0));
    }
}

TEST_CASE("wedge degree overflow is rejected") {
  const KForm4 three = KForm4::basis(3, 0);
  const KForm4 two = KForm4::basis(2, 0);
  CHECK_THROWS_AS(wedge(three, two), std::invalid_argument);
}

TEST_CASE("interior product basics") {
  const KForm4 e01 = KForm4::basis(2, 0);
  CHECK(interior(Vec4::Unit(0), e01)[1] == doctest::Approx(1.0));   // i_{e0} e01 = e1
  CHECK(interior(Vec4::Unit(2), e01).max_abs() == doctest::Approx(0.0));
  CHECK_THROWS_AS(interior(Vec4::Unit(0), KForm4::basis(0, 0)), std::invalid_argument);

  Rng rng(3);
  for (int s = 0; s < 50; ++s) {  // i_u i_u = 0
    const Vec4 u = test::random_vec4(rng);
    const KForm4 a = test::random_form(rng, 3);
    CHECK(interior(u, interior(u, a)).max_abs() < 1e-14);
  }
}

TEST_CASE("contraction identity defining the symmetric tensor") {
  // i_{e0} w1 ^ i_{e0} w2 ^ w3 expands by hand to e1 ^ e2 ^ (e0 ^ e3) = +e0123,
  // i.e. (1/2) S(e0,e0) w1^2 with S(e0,e0) = 1.
  const FormTriple t = standard_triple();
  const KForm4 lhs = wedge(wedge(interior(Vec4::Unit(0), t[0]), interior(Vec4::Unit(0), t[1])), t[2]);
  CHECK(lhs[0] == doctest::Approx(1.0));
  CHECK(wedge(t[0], t[0])[0] == doctest::Approx(2.0));
}

TEST_CASE("gram of the standard triple and scalings") {
  const GramData g = gram(standard_triple());
  CHECK((g.Q - Mat3::Identity()).norm() < 1e-14);
  CHECK(g.mu == doctest::Approx(2.0));
  CHECK(g.sign == 1);

  Rng rng(11);
  for (int s = 0; s < 20; ++s) {
    const double c = rng.uniform(0.1, 10.0);
    FormTriple t = standard_triple();
    t *= c;
    const GramData gc = gram(t);
    CHECK((gc.Q - Mat3::Identity()).norm() < 1e-12);
    CHECK(gc.mu == doctest::Approx(2.0 * c * c));
  }
}

TEST_CASE("gram rejects degenerate triples") {
  const FormTriple t = standard_triple();
  CHECK_THROWS_AS(gram(FormTriple(t[0], t[1], t[0])), std::domain_error);
}

TEST_CASE("gram is invariant under rotations of the triple index") {
  Rng rng(13);
  const FormTriple t = standard_triple();
  for (int s = 0; s < 20; ++s) {
    // Rodrigues rotation from a random axis and angle.
    Vec3 axis(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
    axis.normalize();
    const double ang = rng.uniform(0, 2 * M_PI);
    const Mat3 rot = Eigen::AngleAxisd(ang, axis).toRotationMatrix();
    FormTriple tr;
    for (int i = 0; i < 3; ++i) {
      KForm4 acc(2);
      for (int j = 0; j < 3; ++j) acc += rot(i, j) * t[j];
      tr[i] = acc;
    }
    const GramData g = gram(tr);
    CHECK((g.Q - Mat3::Identity()).norm() < 1e-12);
    CHECK(g.mu == doctest::Approx(2.0));
    const Metric4 m = metric_of(tr);
    CHECK((m.g - Mat4::Identity()).norm() < 1e-12);
  }
}

TEST_CASE("is_su2 examples") {
  FormTriple t = standard_triple();
  CHECK(is_su2(t, 1e-10));
  t[0] *= 1.1;
  CHECK_FALSE(is_su2(t, 1e-10));
}

TEST_CASE("normalizing a definite triple by sqrt(Q) yields an SU(2)-structure") {
  Rng rng(17);
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const FormTriple t = test::random_definite_triple(rng);
    const GramData g = gram(t);
    Eigen::SelfAdjointEigenSolver<Mat3> es(g.Q);
    const Mat3 p_inv = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
    FormTriple w;
    for (int i = 0; i < 3; ++i) {
      KForm4 acc(2);
      for (int j = 0; j < 3; ++j) acc += p_inv(i, j) * t[j];
      w[i] = acc;
    }
    REQUIRE(is_su2(w, 1e-9));
  }
}

TEST_CASE("metric_of examples") {
  const Metric4 m = metric_of(standard_triple());
  CHECK((m.g - Mat4::Identity()).norm() < 1e-14);
  CHECK(m.sign == 1);

  SUBCASE("negated triple gives the same metric with flipped sign flag") {
    FormTriple t = standard_triple();
    t *= -1.0;
    const Metric4 mn = metric_of(t);
    CHECK((mn.g - Mat4::Identity()).norm() < 1e-14);
    CHECK(mn.sign == -1);
  }

  SUBCASE("scaling: metric_of(c t) = c metric_of(t)") {
    Rng rng(23);
    for (int s = 0; s < 200; ++s) {
      const FormTriple t = test::random_definite_triple(rng);
      const double c = rng.uniform(0.1, 10.0);
      FormTriple tc = t;
      tc *= c;
      const Mat4 a = metric_of(tc).g;
      const Mat4 b = c * metric_of(t).g;
      CHECK((a - b).norm() <= 1e-10 * b.norm());
    }
  }

  SUBCASE("non-definite input is rejected") {
    const FormTriple t = standard_triple();
    CHECK_THROWS_AS(metric_of(FormTriple(t[0], t[1], t[0])), std::domain_error);
  }
}

TEST_CASE("form_norm examples") {
  const Metric4 id;
  CHECK(form_norm(KForm4::basis(2, 0), id) == doctest::Approx(1.0));

  const FormTriple t = standard_triple();
  const Metric4 m = metric_of(t);
  CHECK(form_norm(t[0], m) == doctest::Approx(std::sqrt(2.0)));

  Rng rng(29);
  for (int s = 0; s < 50; ++s) {  // homogeneity
    const KForm4 a = test::random_form(rng, 2);
    const double c = rng.uniform(0.0, 5.0);
    KForm4 ca = a;
    ca *= c;
    CHECK(form_norm(ca, id) == doctest::Approx(c * form_norm(a, id)));
  }

  Metric4 bad;
  bad.g(0, 0) = -1.0;
  CHECK_THROWS_AS(form_norm(KForm4::basis(1, 0), bad), std::domain_error);
}

TEST_CASE("compare_metrics examples") {
  const Metric4 id;
  auto [lo, hi] = compare_metrics(id, id);
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(1.0));

  Metric4 twice;
  twice.g = 2.0 * Mat4::Identity();
  std::tie(lo, hi) = compare_metrics(id, twice);
  CHECK(lo == doctest::Approx(2.0));
  CHECK(hi == doctest::Approx(2.0));

  Metric4 diag;
  diag.g = Vec4(1, 1, 1, 4).asDiagonal();
  std::tie(lo, hi) = compare_metrics(id, diag);
  CHECK(lo == doctest::Approx(1.0));
  CHECK(hi == doctest::Approx(4.0));
}

TEST_CASE("wedge and contraction are submultiplicative with a small constant") {
  // The constant is existential in dimension 4; we report the empirical
  // maximum and require it below the combinatorial bound 8.
  Rng rng(31);
  double worst_wedge = 0.0, worst_interior = 0.0;
  const int samples = 100000;
  for (int s = 0; s < samples; ++s) {
    const FormTriple t = test::random_definite_triple(rng);
    Metric4 m;
    try {
      m = metric_of(t);
    } catch (const std::domain_error&) {
      continue;
    }
    const int ka = 1 + static_cast<int>(rng.below(3));
    const int kb = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(4 - ka)));
    const KForm4 a = test::random_form(rng, ka);
    const KForm4 b = test::random_form(rng, kb);
    const double na = form_norm(a, m), nb = form_norm(b, m);
    if (na < 1e-8 || nb < 1e-8) continue;
    worst_wedge = std::max(worst_wedge, form_norm(wedge(a, b), m) / (na * nb));

    const Vec4 u = test::random_vec4(rng);
    const double nu = std::sqrt(u.dot(m.g * u));
    if (nu < 1e-8) continue;
    worst_interior = std::max(worst_interior, form_norm(interior(u, a), m) / (nu * na));
  }
  MESSAGE("empirical submultiplicativity constants: wedge ", worst_wedge, ", interior ",
          worst_interior);
  CHECK(worst_wedge <= 8.0);
  CHECK(worst_interior <= 8.0);
}

TEST_CASE("metric comparison scales linearly with the triple perturbation") {
  Rng rng(37);
  const std::array<double, 3> deltas{1e-1, 1e-2, 1e-3};
  std::array<double, 3> fitted{};
  const int samples = 300;
  for (std::size_t d = 0; d < deltas.size(); ++d) {
    double worst = 0.0;
    Rng local(rng.next_u64());
    for (int s = 0; s < samples; ++s) {
      const FormTriple t = test::random_definite_triple(local);
      Metric4 base;
      try {
        base = metric_of(t);
      } catch (const std::domain_error&) {
        continue;
      }
      FormTriple dir;
      double nmax = 0.0;
      for (int i = 0; i < 3; ++i) {
        dir[i] = test::random_form(local, 2);
        nmax = std::max(nmax, form_norm(dir[i], base));
      }
      FormTriple pert = t;
      for (int i = 0; i < 3; ++i) {
        KForm4 scaled = dir[i];
        scaled *= deltas[d] / nmax;
        pert[i] += scaled;
      }
      try {
        const Metric4 other = metric_of(pert);
        const auto [lo, hi] = compare_metrics(base, other);
        worst = std::max(worst, std::max(hi - 1.0, 1.0 - lo) / deltas[d]);
      } catch (const std::domain_error&) {
        continue;  // perturbation left the definite cone
      }
    }
    fitted[d] = worst;
  }
  MESSAGE("fitted comparison constants per delta: ", fitted[0], " ", fitted[1], " ", fitted[2]);
  // One constant fits all levels: consecutive ratios stay near 1.
  CHECK(fitted[0] / fitted[1] < 2.5);
  CHECK(fitted[1] / fitted[0] < 2.5);
  CHECK(fitted[1] / fitted[2] < 2.5);
  CHECK(fitted[2] / fitted[1] < 2.5);
}
