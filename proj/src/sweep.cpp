#include "hkc/sweep.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hkc {

namespace {

constexpr double kPi = std::numbers::pi;

double closed_energy(double eps, std::size_t npoles, double vol) {
  const double r = exclusion_radius(eps);
  return 3.0 * kPi * eps * (vol - static_cast<double>(npoles) * (4.0 * kPi / 3.0) * r * r * r);
}

void append17(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

Vec3 PerturbationField::value(const Vec3& x, const TorusSpec& spec) const {
  Vec3 v = Vec3::Zero();
  for (int c = 0; c < 3; ++c) {
    if (weights[static_cast<std::size_t>(c)] == 0.0) continue;
    double phase = 0.0;
    for (int a = 0; a < 3; ++a)
      phase += 2.0 * kPi * modes[static_cast<std::size_t>(c)][a] * x[a] / spec.box[a];
    v[c] = weights[static_cast<std::size_t>(c)] *
           (cosine[static_cast<std::size_t>(c)] ? std::cos(phase) : std::sin(phase));
  }
  return v;
}

Mat3 PerturbationField::jacobian_offset(const Vec3& x, const TorusSpec& spec) const {
  Mat3 dv = Mat3::Zero();
  for (int c = 0; c < 3; ++c) {
    if (weights[static_cast<std::size_t>(c)] == 0.0) continue;
    double phase = 0.0;
    for (int a = 0; a < 3; ++a)
      phase += 2.0 * kPi * modes[static_cast<std::size_t>(c)][a] * x[a] / spec.box[a];
    const double d = weights[static_cast<std::size_t>(c)] *
                     (cosine[static_cast<std::size_t>(c)] ? -std::sin(phase) : std::cos(phase));
    for (int a = 0; a < 3; ++a)
      dv(c, a) = d * 2.0 * kPi * modes[static_cast<std::size_t>(c)][a] / spec.box[a];
  }
  return dv;
}

void PerturbationField::validate(const TorusSpec& spec) const {
  for (int c = 0; c < 3; ++c)
    if (cosine[static_cast<std::size_t>(c)] && weights[static_cast<std::size_t>(c)] != 0.0)
      throw std::invalid_argument(
          "perturbation: cosine terms are even under x -> -x, not equivariant");
  // sup bound on |delta Dv| from the term amplitudes
  double bound = 0.0;
  for (int c = 0; c < 3; ++c) {
    double row = 0.0;
    for (int a = 0; a < 3; ++a)
      row += std::abs(weights[static_cast<std::size_t>(c)] * 2.0 * kPi *
                      modes[static_cast<std::size_t>(c)][a] / spec.box[a]);
    bound = std::max(bound, row);
  }
  if (std::abs(delta) * bound >= 1.0)
    throw std::invalid_argument("perturbation: |delta Dv| >= 1, not a diffeomorphism");
}

SweepContext::SweepContext(const PoleConfig& cfg, const TorusSpec& spec, const EwaldParams& params,
                           const QuadratureSpec& qspec, Exec exec)
    : cfg_(cfg),
      spec_(spec),
      qspec_(qspec),
      exec_(exec),
      field_(cfg, spec, params),
      fine_{spec, qspec.resolution},
      coarse_{spec, std::max(8, qspec.resolution / 2)} {
  if (qspec.resolution < 16) throw std::invalid_argument("quadrature: resolution must be >= 16");
}

namespace {

std::vector<double> sample_h(const HarmonicField& field, const MidpointGrid& grid, Exec exec) {
  std::vector<double> out(grid.size());
  const int n = grid.n;
  const std::size_t rows = static_cast<std::size_t>(n) * n;
  auto fill_row = [&](std::size_t row) {
    const int i = static_cast<int>(row / static_cast<std::size_t>(n));
    const int j = static_cast<int>(row % static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[grid.index(i, j, k)] = field.value_no_c0(grid.point(i, j, k));
    return 0.0;
  };
  indexed_sum(rows, fill_row, exec, 1);
  return out;
}

}  // namespace

const std::vector<double>& SweepContext::h_fine() const {
  if (h_fine_.empty()) h_fine_ = sample_h(field_, fine_, exec_);
  return h_fine_;
}

const std::vector<double>& SweepContext::h_coarse() const {
  if (h_coarse_.empty()) h_coarse_ = sample_h(field_, coarse_, exec_);
  return h_coarse_;
}

std::vector<Vec3> SweepContext::centers() const {
  std::vector<Vec3> out;
  for (const Charge& c : charge_list(cfg_, spec_)) out.push_back(c.pos);
  return out;
}

std::pair<QuadResult, double> energy_gh(double eps, SweepContext& ctx) {
  const double r = exclusion_radius(eps);
  check_exclusion_radius(ctx.config(), ctx.spec(), r);
  const QuadResult num = quad_region([&](const Vec3& x) { return gh_densities(x, ctx.field(), eps).e; },
                                     ctx.config(), ctx.spec(), ctx.qspec(), r, ctx.exec());
  const std::size_t npoles = charge_list(ctx.config(), ctx.spec()).size();
  return {num, closed_energy(eps, npoles, ctx.spec().volume())};
}

std::pair<Mat3, double> invariant_matrix(double eps, SweepContext& ctx) {
  const double r = exclusion_radius(eps);
  check_exclusion_radius(ctx.config(), ctx.spec(), r);
  const auto centers = ctx.centers();
  const Mat3 jac = Mat3::Identity();

  auto run = [&](const MidpointGrid& grid, const std::vector<double>& h) {
    auto f = [&](int gi, int gj, int gk, const Vec3&, std::array<double, 9>& acc) {
      const double hval = 1.0 / eps + h[grid.index(gi, gj, gk)] + ctx.config().c0;
      const Mat3 d = invariant_density(jac, hval, eps);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc[static_cast<std::size_t>(3 * i + j)] += d(i, j);
    };
    const auto sums = masked_grid_sum_multi<9>(grid, centers, r, f, ctx.exec());
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m(i, j) = sums[static_cast<std::size_t>(3 * i + j)] * grid.cell_volume();
    return m;
  };

  const Mat3 fine = run(ctx.fine(), ctx.h_fine());
  const Mat3 coarse = run(ctx.coarse(), ctx.h_coarse());
  return {fine, (fine - coarse).cwiseAbs().maxCoeff()};
}

std::pair<QuadResult, double> volume_gh(double eps, SweepContext& ctx) {
  const double r = exclusion_radius(eps);
  check_exclusion_radius(ctx.config(), ctx.spec(), r);
  const auto centers = ctx.centers();

  auto run = [&](const MidpointGrid& grid, const std::vector<double>& h) {
    auto f = [&](int gi, int gj, int gk, const Vec3&) {
      const double hval = 1.0 / eps + h[grid.index(gi, gj, gk)] + ctx.config().c0;
      return kPi * eps * eps * hval;
    };
    return masked_grid_sum(grid, centers, r, f, ctx.exec()) * grid.cell_volume();
  };

  const double fine = run(ctx.fine(), ctx.h_fine());
  const double coarse = run(ctx.coarse(), ctx.h_coarse());
  const double vol = ctx.spec().volume();
  const double leading = kPi * eps * (vol + eps * ctx.config().c0 * vol);
  return {{fine, std::abs(fine - coarse)}, leading};
}

PerturbedResult perturbed_energy_and_invariant(double eps, SweepContext& ctx,
                                               const PerturbationField& pert) {
  pert.validate(ctx.spec());
  const double r = exclusion_radius(eps);
  check_exclusion_radius(ctx.config(), ctx.spec(), r);
  const auto centers = ctx.centers();

  struct Sums {
    double energy;
    Mat3 inv;
  };
  auto run = [&](const MidpointGrid& grid, const std::vector<double>& h) {
    auto f = [&](int gi, int gj, int gk, const Vec3& x, std::array<double, 10>& acc) {
      const double hval = 1.0 / eps + h[grid.index(gi, gj, gk)] + ctx.config().c0;
      const Mat3 jac = Mat3::Identity() + pert.delta * pert.jacobian_offset(x, ctx.spec());
      acc[0] += map_energy_density(jac, hval, eps);
      const Mat3 d = invariant_density(jac, hval, eps);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc[static_cast<std::size_t>(1 + 3 * i + j)] += d(i, j);
    };
    const auto sums = masked_grid_sum_multi<10>(grid, centers, r, f, ctx.exec());
    Sums s{};
    s.energy = sums[0] * grid.cell_volume();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        s.inv(i, j) = sums[static_cast<std::size_t>(1 + 3 * i + j)] * grid.cell_volume();
    return s;
  };

  const Sums fine = run(ctx.fine(), ctx.h_fine());
  const Sums coarse = run(ctx.coarse(), ctx.h_coarse());
  const double err = std::max(std::abs(fine.energy - coarse.energy),
                              (fine.inv - coarse.inv).cwiseAbs().maxCoeff());
  return {fine.energy, fine.inv, err};
}

std::vector<SweepRow> sweep(const std::vector<double>& eps_list, SweepContext& ctx) {
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("sweep: eps list must be sorted descending");
  std::vector<SweepRow> rows;
  rows.reserve(eps_list.size());
  for (double eps : eps_list) {
    SweepRow row{};
    row.eps = eps;
    const auto [enum_, eclosed] = energy_gh(eps, ctx);
    row.E_num = enum_.value;
    row.E_closed = eclosed;
    const auto [inum, ierr] = invariant_matrix(eps, ctx);
    row.I_num = inum;
    row.trI_num = inum.trace();
    row.trI_closed = eclosed;  // tr I = E in closed form
    const auto [vnum, vleading] = volume_gh(eps, ctx);
    row.vol_num = vnum.value;
    row.vol_leading = vleading;
    row.ratio_E_trI = row.E_num / row.trI_num;
    row.ratio_vol_trI = row.vol_num / row.trI_num;
    double off = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) off = std::max(off, std::abs(inum(i, j)));
    row.offdiag_max = off;
    row.err_est = std::max({enum_.err_est, ierr, vnum.err_est});
    rows.push_back(row);
  }
  return rows;
}

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "eps,E_num,E_closed,trI_num,trI_closed,vol_num,vol_leading,ratio_E_trI,ratio_vol_trI,"
      "offdiag_max,err_est\n";
  for (const SweepRow& r : rows) {
    const double cols[] = {r.eps,     r.E_num,       r.E_closed,     r.trI_num,
                           r.trI_closed, r.vol_num, r.vol_leading,  r.ratio_E_trI,
                           r.ratio_vol_trI, r.offdiag_max, r.err_est};
    for (std::size_t i = 0; i < 11; ++i) {
      if (i) out += ',';
      append17(out, cols[i]);
    }
    out += '\n';
  }
  return out;
}

SweepSummary summarize(const std::vector<SweepRow>& rows, const TorusSpec& spec) {
  SweepSummary s{};
  std::vector<double> eps, closed_def, num_def, ratio;
  const double top = 3.0 * kPi * spec.volume();
  bool num_ok = true;
  for (const SweepRow& r : rows) {
    eps.push_back(r.eps);
    closed_def.push_back(top - r.E_closed / r.eps);
    const double nd = top - r.E_num / r.eps;
    if (nd <= 0.0) num_ok = false;
    num_def.push_back(nd);
    ratio.push_back(r.ratio_vol_trI - 1.0 / 3.0);
  }
  s.closed_deficit = fit_power(eps, closed_def);
  if (num_ok) s.num_deficit = fit_power(eps, num_def);
  // plain least-squares slope of the vol ratio against eps
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    sx += eps[i];
    sy += ratio[i];
    sxx += eps[i] * eps[i];
    sxy += eps[i] * ratio[i];
  }
  s.vol_ratio_slope = (sxy - sx * sy / n) / (sxx - sx * sx / n);
  return s;
}

}  // namespace hkc
