#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hkc/parallel.hpp"
#include "hkc/torus.hpp"

namespace hkc {

struct QuadratureSpec {
  enum class Scheme { TensorMidpoint, QuasiRandom };
  Scheme scheme = Scheme::TensorMidpoint;
  int resolution = 128;  // points per axis (midpoint) or sqrt-ish sample scale (quasi-random)
};

/// Exclusion radius rule r(eps) = 2 eps^{2/5}. The radius is a rule, not a
/// parameter, so closed-form comparisons stay honest.
inline double exclusion_radius(double eps) { return 2.0 * std::pow(eps, 0.4); }

struct QuadResult {
  double value;
  double err_est;
};

/// Midpoint grid over the box, n points per axis.
struct MidpointGrid {
  TorusSpec spec;
  int n = 0;

  double cell_volume() const {
    return spec.volume() / (static_cast<double>(n) * n * n);
  }
  Vec3 point(int i, int j, int k) const {
    return Vec3((i + 0.5) * spec.box[0] / n, (j + 0.5) * spec.box[1] / n,
                (k + 0.5) * spec.box[2] / n);
  }
  std::size_t size() const { return static_cast<std::size_t>(n) * n * n; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
           static_cast<std::size_t>(k);
  }
};

/// Per-axis wrapped squared offsets to each center; membership in the union
/// of balls then costs three lookups and two adds per center.
class ExclusionMask {
 public:
  ExclusionMask(const MidpointGrid& grid, const std::vector<Vec3>& centers, double radius);

  bool excluded(int i, int j, int k) const {
    for (std::size_t c = 0; c < ncenters_; ++c) {
      const double d2 = ax_[c * stride_ + static_cast<std::size_t>(i)] +
                        ay_[c * stride_ + static_cast<std::size_t>(j)] +
                        az_[c * stride_ + static_cast<std::size_t>(k)];
      if (d2 < r2_) return true;
    }
    return false;
  }

 private:
  std::size_t ncenters_;
  std::size_t stride_;
  double r2_;
  std::vector<double> ax_, ay_, az_;
};

/// Deterministic masked midpoint sum of f(i,j,k,x) over grid points outside
/// all exclusion balls. Chunked by (i,j)-row; bitwise identical for Serial
/// and OpenMP.
template <class F>
double masked_grid_sum(const MidpointGrid& grid, const std::vector<Vec3>& centers, double radius,
                       F&& f, Exec exec) {
  const ExclusionMask mask(grid, centers, radius);
  const int n = grid.n;
  const std::size_t rows = static_cast<std::size_t>(n) * n;
  auto row_sum = [&](std::size_t row) {
    const int i = static_cast<int>(row / static_cast<std::size_t>(n));
    const int j = static_cast<int>(row % static_cast<std::size_t>(n));
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
      if (mask.excluded(i, j, k)) continue;
      s += f(i, j, k, grid.point(i, j, k));
    }
    return s;
  };
  return indexed_sum(rows, row_sum, exec, 1);
}

/// Multi-component variant: f(i,j,k,x,acc) adds its contributions into the
/// accumulator array. Same deterministic chunking as masked_grid_sum.
template <int M, class F>
std::array<double, M> masked_grid_sum_multi(const MidpointGrid& grid,
                                            const std::vector<Vec3>& centers, double radius,
                                            F&& f, Exec exec) {
  const ExclusionMask mask(grid, centers, radius);
  const int n = grid.n;
  const std::size_t rows = static_cast<std::size_t>(n) * n;
  std::vector<std::array<double, M>> partial(rows);
  auto row_sum = [&](std::size_t row) {
    const int i = static_cast<int>(row / static_cast<std::size_t>(n));
    const int j = static_cast<int>(row % static_cast<std::size_t>(n));
    std::array<double, M> acc{};
    for (int k = 0; k < n; ++k) {
      if (mask.excluded(i, j, k)) continue;
      f(i, j, k, grid.point(i, j, k), acc);
    }
    partial[row] = acc;
    return 0.0;
  };
  indexed_sum(rows, row_sum, exec, 1);
  std::array<double, M> out{};
  for (int m = 0; m < M; ++m) {
    std::vector<double> col(rows);
    for (std::size_t r = 0; r < rows; ++r) col[r] = partial[r][static_cast<std::size_t>(m)];
    out[static_cast<std::size_t>(m)] = pairwise_combine(col);
  }
  return out;
}

/// Checks that radius-r exclusion balls around the pole set are admissible:
/// metric balls (r below the injectivity radius) and pairwise disjoint.
/// Throws std::domain_error otherwise.
void check_exclusion_radius(const PoleConfig& cfg, const TorusSpec& spec, double r);

/// Integral of f over the torus minus the union of r-balls around the pole
/// set. err_est compares against the half-resolution grid.
template <class F>
QuadResult quad_region(F&& f, const PoleConfig& cfg, const TorusSpec& spec,
                       const QuadratureSpec& qspec, double r, Exec exec = Exec::OpenMP) {
  if (qspec.resolution < 16) throw std::invalid_argument("quadrature: resolution must be >= 16");
  std::vector<Vec3> centers;
  if (r > 0.0) {
    check_exclusion_radius(cfg, spec, r);
    for (const Charge& c : charge_list(cfg, spec)) centers.push_back(c.pos);
  }
  auto fx = [&f](int, int, int, const Vec3& x) { return f(x); };
  if (qspec.scheme == QuadratureSpec::Scheme::QuasiRandom) {
    // Additive-recurrence low-discrepancy estimate; the error estimate
    // compares against the first half of the sequence.
    const std::size_t m = static_cast<std::size_t>(qspec.resolution) * qspec.resolution *
                          qspec.resolution;
    // R3 sequence: fractional parts of n * (1/phi3, 1/phi3^2, 1/phi3^3).
    const double phi3 = 1.2207440846057594753;
    const Vec3 a(1.0 / phi3, 1.0 / (phi3 * phi3), 1.0 / (phi3 * phi3 * phi3));
    auto sample = [&](std::size_t idx) {
      Vec3 u;
      for (int c = 0; c < 3; ++c) {
        double v = std::fmod(0.5 + (static_cast<double>(idx) + 1.0) * a[c], 1.0);
        u[c] = v * spec.box[c];
      }
      double inside = 1.0;
      for (const Vec3& ctr : centers)
        if (torus_distance(u, ctr, spec) < r) {
          inside = 0.0;
          break;
        }
      return inside == 0.0 ? 0.0 : f(u);
    };
    const double full = indexed_sum(m, sample, exec) * spec.volume() / static_cast<double>(m);
    const std::size_t half = m / 2;
    const double part = indexed_sum(half, sample, exec) * spec.volume() / static_cast<double>(half);
    return {full, std::abs(full - part)};
  }
  const MidpointGrid fine{spec, qspec.resolution};
  const MidpointGrid coarse{spec, std::max(8, qspec.resolution / 2)};
  const double v_fine = masked_grid_sum(fine, centers, r, fx, exec) * fine.cell_volume();
  const double v_coarse = masked_grid_sum(coarse, centers, r, fx, exec) * coarse.cell_volume();
  return {v_fine, std::abs(v_fine - v_coarse)};
}

/// Integral of the harmonic field over the whole torus with singularity
/// subtraction: in balls of radius r0 around each pole the charge/rho term
/// is integrated analytically (2 pi q r0^2) and only the smooth remainder is
/// sampled.
QuadResult integrate_h_full(const HarmonicField& field, const QuadratureSpec& qspec,
                            Exec exec = Exec::OpenMP);

struct PowerFit {
  double exponent;
  double coefficient;
  double r2;
};

/// Least-squares line in log-log coordinates: y ~ coefficient * x^exponent.
/// Requires at least 4 points and positive ys.
PowerFit fit_power(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace hkc
