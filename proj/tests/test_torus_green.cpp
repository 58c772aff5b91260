#include <doctest.h>

#include <cmath>

#include "hkc/rng.hpp"
#include "hkc/torus.hpp"

using namespace hkc;

namespace {

const TorusSpec kUnit{};

Vec3 random_point(Rng& rng, const TorusSpec& spec) {
  return Vec3(rng.uniform(0, spec.box[0]), rng.uniform(0, spec.box[1]),
              rng.uniform(0, spec.box[2]));
}

// Samples a point at distance >= dmin from every charged pole (zero-charge
// fixed points are not singularities of h).
Vec3 point_away(Rng& rng, const TorusSpec& spec, const std::vector<Charge>& charges, double dmin) {
  for (;;) {
    const Vec3 x = random_point(rng, spec);
    bool ok = true;
    for (const Charge& c : charges)
      if (c.q != 0.0 && torus_distance(x, c.pos, spec) < dmin) ok = false;
    if (ok) return x;
  }
}

// balanced demo-style configuration: one pole pair plus two m = 1 fixed points
PoleConfig pair_config() {
  PoleConfig cfg;
  cfg.p = {Vec3(0.25, 0.25, 0.25)};
  cfg.k = {2};
  cfg.m = {2, 2, 2, 2, 2, 2, 1, 1};
  return cfg;
}

// Variant whose charge set is symmetric under x -> (1/2,1/2,1/2) - x, which
// fixes p and kills the gradient of the regular part there; used for the ray
// probes, where that gradient would otherwise dominate the spread.
PoleConfig symmetric_pair_config() {
  PoleConfig cfg;
  cfg.p = {Vec3(0.25, 0.25, 0.25)};
  cfg.k = {2};
  cfg.m = {1, 2, 2, 2, 2, 2, 2, 1};
  return cfg;
}

}  // namespace

TEST_CASE("torus distance") {
  CHECK(torus_distance(Vec3(0, 0, 0), Vec3(0.5, 0, 0), kUnit) == doctest::Approx(0.5));
  CHECK(torus_distance(Vec3(0.9, 0, 0), Vec3(0.1, 0, 0), kUnit) == doctest::Approx(0.2));
  CHECK(torus_distance(Vec3(0.3, 0.7, 0.2), Vec3(0.3, 0.7, 0.2), kUnit) == doctest::Approx(0.0));
}

TEST_CASE("green kernel symmetry and periodicity") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
  Rng rng(101);
  for (int s = 0; s < 50; ++s) {
    const Vec3 x = random_point(rng, kUnit);
    Vec3 p;
    do {
      p = random_point(rng, kUnit);
    } while (torus_distance(x, p, kUnit) < 1e-3);
    CHECK(std::abs(green.green(x, p) - green.green(p, x)) <= 1e-12);
    CHECK(std::abs(green.green(x + Vec3(2, -1, 3), p) - green.green(x, p)) <= 1e-12);
  }
  CHECK_THROWS_AS(green.green(Vec3(0.2, 0.2, 0.2), Vec3(0.2, 0.2, 0.2)), std::domain_error);
}

TEST_CASE("self constant: Ewald and direct lattice sum agree") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
  const double ewald = green.self_constant();
  const double direct = self_constant_direct(kUnit, 50.0, 100.0);
  CHECK(std::abs(ewald - direct) <= 1e-6);
  // frozen: both routes give the simple-cubic value
  CHECK(ewald == doctest::Approx(-2.8372974794928).epsilon(1e-9));
  CHECK(direct == doctest::Approx(-2.8372974794928).epsilon(1e-6));
}

TEST_CASE("green agrees with the direct lattice sum at generic pairs") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
  Rng rng(103);
  for (int s = 0; s < 10; ++s) {
    const Vec3 x = random_point(rng, kUnit);
    Vec3 p;
    do {
      p = random_point(rng, kUnit);
    } while (torus_distance(x, p, kUnit) < 5e-2);
    CHECK(std::abs(green.green(x, p) - green_direct(kUnit, x, p, 50.0, 100.0)) <= 1e-6);
  }
}

TEST_CASE("Ewald splitting invariance under alpha doubling") {
  const EwaldParams base = EwaldParams::for_spec(kUnit);
  const GreenEvaluator g1(kUnit, base);
  const GreenEvaluator g2(kUnit, EwaldParams::with_alpha(kUnit, 2.0 * base.alpha, base.tol));
  Rng rng(107);
  for (int s = 0; s < 100; ++s) {
    const Vec3 x = random_point(rng, kUnit);
    Vec3 p;
    do {
      p = random_point(rng, kUnit);
    } while (torus_distance(x, p, kUnit) < 1e-3);
    CHECK(std::abs(g1.green(x, p) - g2.green(x, p)) <= 1e-10);
  }
}

TEST_CASE("gradient of the green kernel") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));

  SUBCASE("vanishes at the antipodal symmetry point") {
    const Vec3 p(0.1, 0.2, 0.3);
    CHECK(green.gradient(p + Vec3(0.5, 0.5, 0.5), p).norm() <= 1e-12);
  }

  SUBCASE("odd under reflection through the pole") {
    Rng rng(109);
    for (int s = 0; s < 50; ++s) {
      const Vec3 p = random_point(rng, kUnit);
      const Vec3 d = Vec3(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
      if (d.norm() < 1e-2) continue;
      CHECK((green.gradient(p + d, p) + green.gradient(p - d, p)).norm() <= 1e-11);
    }
  }

  SUBCASE("matches central differences away from the pole") {
    Rng rng(113);
    double worst = 0.0;
    int tested = 0;
    while (tested < 100) {
      const Vec3 x = random_point(rng, kUnit);
      const Vec3 p = random_point(rng, kUnit);
      if (torus_distance(x, p, kUnit) < 0.35) continue;
      ++tested;
      const Vec3 g = green.gradient(x, p);
      for (int a = 0; a < 3; ++a) {
        Vec3 e = Vec3::Zero();
        e[a] = 1e-4;
        worst = std::max(worst,
                         std::abs((green.green(x + e, p) - green.green(x - e, p)) / 2e-4 - g[a]));
      }
    }
    MESSAGE("max FD gradient deviation: ", worst);
    CHECK(worst <= 1e-6);
  }
}

TEST_CASE("green stays mean-zero on a grid with the pole cell excluded") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
  const Vec3 p(0.11, 0.64, 0.05);
  const int n = 64;
  const int pi = static_cast<int>(p[0] * n), pj = static_cast<int>(p[1] * n),
            pk = static_cast<int>(p[2] * n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (i == pi && j == pj && k == pk) continue;
        sum += green.green(Vec3((i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n), p);
      }
  CHECK(std::abs(sum / (n * n * n)) <= 1e-3);
}

TEST_CASE("near a pole the kernel reduces to the two nearest images") {
  const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
  const Vec3 p(0.3, 0.4, 0.5);
  const double rho = 1e-7;
  const Vec3 x = p + rho * Vec3(1, 0, 0);
  const double two_images = 1.0 / rho + 1.0 / (1.0 - rho);
  CHECK(std::abs(green.green(x, p) / two_images - 1.0) <= 1e-6);
}

TEST_CASE("pole configuration bookkeeping") {
  const PoleConfig cfg = pair_config();
  CHECK(is_balanced(cfg));
  const auto charges = charge_list(cfg, kUnit);
  CHECK(charges.size() == 10);
  double total = 0.0;
  for (const Charge& c : charges) total += c.q;
  CHECK(total == 0.0);
  CHECK_NOTHROW(validate(cfg, kUnit));
  CHECK(delta0(cfg, kUnit) == doctest::Approx(0.25 * std::sqrt(3.0) / 4.0));

  SUBCASE("balancing violations are named") {
    PoleConfig bad = cfg;
    bad.m[0] = 1;
    try {
      validate(bad, kUnit);
      FAIL("expected a balancing error");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("balancing") != std::string::npos);
      CHECK(std::string(e.what()).find("15") != std::string::npos);
    }
  }

  SUBCASE("p at a fixed point is rejected") {
    PoleConfig bad = cfg;
    bad.p[0] = Vec3(0.5, 0.5, 0.0);
    bad.m = {2, 2, 2, 2, 2, 2, 2, 0};  // keep the balance
    CHECK_THROWS_AS(validate(bad, kUnit), std::invalid_argument);
  }

  SUBCASE("fixed points are lexicographic in the box coordinates") {
    const auto q = fixed_points(TorusSpec{Vec3(2, 4, 6)});
    CHECK(q[0] == Vec3(0, 0, 0));
    CHECK(q[1] == Vec3(0, 0, 3));
    CHECK(q[2] == Vec3(0, 2, 0));
    CHECK(q[7] == Vec3(1, 2, 3));
  }
}

TEST_CASE("h with all weights 2 is identically c0") {
  PoleConfig cfg;
  cfg.c0 = 1.5;
  const HarmonicField field(cfg, kUnit, EwaldParams::for_spec(kUnit));
  Rng rng(127);
  for (int s = 0; s < 20; ++s) CHECK(field.value(random_point(rng, kUnit)) == doctest::Approx(1.5));
  // evaluation at the (zero-charge) fixed points is legal
  CHECK(field.value(Vec3(0, 0, 0)) == doctest::Approx(1.5));
  for (int j = 0; j < 8; ++j)
    CHECK(field.regular_value({PoleId::Kind::Fixed, j}) == doctest::Approx(1.5));
}

TEST_CASE("h is invariant under x -> -x") {
  const HarmonicField field(pair_config(), kUnit, EwaldParams::for_spec(kUnit));
  Rng rng(131);
  for (int s = 0; s < 1000; ++s) {
    const Vec3 x = point_away(rng, kUnit, field.charges(), 1e-2);
    const double hx = field.value(x);
    const double hmx = field.value(-x);
    CHECK(std::abs(hx - hmx) <= 1e-12 * std::max(1.0, std::abs(hx)));
  }
}

TEST_CASE("pole subtraction keeps h - q/rho bounded along a ray") {
  const HarmonicField field(symmetric_pair_config(), kUnit, EwaldParams::for_spec(kUnit));
  const Vec3 p = field.pole_position({PoleId::Kind::PairPlus, 0});
  const double q = field.pole_charge({PoleId::Kind::PairPlus, 0});
  const Vec3 dir = Vec3(1.0, 0.7, 0.43).normalized();
  double lo = 1e300, hi = -1e300;
  for (double rho : {1e-2, 1e-3, 1e-4}) {
    const double v = field.value(p + rho * dir) - q / rho;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  MESSAGE("pole-subtraction spread: ", hi - lo);
  CHECK(hi - lo < 1e-2);
}

TEST_CASE("finite-difference Laplacian probes") {
  SUBCASE("constant field") {
    CHECK(laplacian_probe([](const Vec3&) { return 3.25; }, Vec3(0.3, 0.3, 0.3), 1e-3) ==
          doctest::Approx(0.0));
  }

  SUBCASE("green kernel has the background Laplacian 4 pi / vol") {
    const GreenEvaluator green(kUnit, EwaldParams::for_spec(kUnit));
    const Vec3 p(0.15, 0.85, 0.4);
    Rng rng(137);
    double worst = 0.0;
    int tested = 0;
    while (tested < 20) {
      const Vec3 x = random_point(rng, kUnit);
      if (torus_distance(x, p, kUnit) < 0.25) continue;
      ++tested;
      const double probe = laplacian_probe([&](const Vec3& y) { return green.green(y, p); }, x, 1e-3);
      worst = std::max(worst, std::abs(probe / (4.0 * M_PI) - 1.0));
    }
    MESSAGE("max relative deviation from 4 pi: ", worst);
    CHECK(worst <= 1e-3);
  }

  SUBCASE("balanced h is harmonic") {
    const HarmonicField field(pair_config(), kUnit, EwaldParams::for_spec(kUnit));
    Rng rng(139);
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      const Vec3 x = point_away(rng, kUnit, field.charges(), 0.5);
      worst = std::max(worst,
                       std::abs(laplacian_probe([&](const Vec3& y) { return field.value(y); }, x, 1e-3)));
    }
    MESSAGE("max |FD Laplacian of h|: ", worst);
    CHECK(worst <= 1e-3);
  }

  SUBCASE("an unbalanced configuration picks up the background") {
    // bypassing validate() deliberately: total charge -2
    PoleConfig bad;
    bad.m = {2, 2, 2, 2, 2, 2, 1, 1};
    const HarmonicField field(bad, kUnit, EwaldParams::for_spec(kUnit));
    CHECK(total_charge(bad) == doctest::Approx(-2.0));
    Rng rng(149);
    const Vec3 x = point_away(rng, kUnit, field.charges(), 0.5);
    const double probe = laplacian_probe([&](const Vec3& y) { return field.value(y); }, x, 1e-3);
    const double expected = 4.0 * M_PI * total_charge(bad) / kUnit.volume();
    CHECK(probe == doctest::Approx(expected).epsilon(1e-2));
  }
}

TEST_CASE("regular values at the poles") {
  PoleConfig cfg = symmetric_pair_config();
  cfg.c0 = 0.25;
  const EwaldParams base = EwaldParams::for_spec(kUnit);
  const HarmonicField field(cfg, kUnit, base);

  SUBCASE("independent of the Ewald splitting") {
    const HarmonicField doubled(cfg, kUnit, EwaldParams::with_alpha(kUnit, 2.0 * base.alpha, base.tol));
    for (const PoleId id : {PoleId{PoleId::Kind::PairPlus, 0}, PoleId{PoleId::Kind::Fixed, 6},
                            PoleId{PoleId::Kind::Fixed, 7}}) {
      CHECK(std::abs(field.regular_value(id) - doubled.regular_value(id)) <= 1e-10);
    }
  }

  SUBCASE("matches Richardson extrapolation along a ray") {
    for (const PoleId id : {PoleId{PoleId::Kind::PairPlus, 0}, PoleId{PoleId::Kind::Fixed, 7}}) {
      const Vec3 p = field.pole_position(id);
      const double q = field.pole_charge(id);
      const Vec3 dir = Vec3(0.2, 1.0, -0.53).normalized();
      auto phi = [&](double rho) { return field.value(p + rho * dir) - q / rho; };
      // two Richardson levels remove the linear and quadratic ray terms
      const double rho = 2e-3;
      const double r1a = 2.0 * phi(rho / 2) - phi(rho);
      const double r1b = 2.0 * phi(rho / 4) - phi(rho / 2);
      const double extrapolated = (4.0 * r1b - r1a) / 3.0;
      CHECK(std::abs(extrapolated - field.regular_value(id)) <= 1e-5);
    }
  }
}

TEST_CASE("eval at a charged pole raises a pole error") {
  const HarmonicField field(pair_config(), kUnit, EwaldParams::for_spec(kUnit));
  CHECK_THROWS_AS(field.value(Vec3(0.25, 0.25, 0.25)), std::domain_error);
}

TEST_CASE("ewald parameter validation") {
  CHECK_THROWS_AS(EwaldParams::with_alpha(kUnit, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(EwaldParams::with_alpha(kUnit, 1.0, 0.5), std::invalid_argument);
}
