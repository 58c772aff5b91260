#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hkc/config.hpp"

namespace hkc::cli {

/// Exit code contract: 0 pass, 1 assertion failure, 2 config/usage error.
inline constexpr int kPass = 0;
inline constexpr int kFail = 1;
inline constexpr int kUsage = 2;

/// Random-matrix calibration suite: pointwise inequality, gap identity,
/// wedge-oracle agreement, and the empirical resolution of the factorization
/// scalar. Deterministic for fixed (samples, seed).
int check_calibration(std::int64_t samples, std::uint64_t seed, std::ostream& out);

/// Harmonicity probes, calibration residuals and pole asymptotics for a
/// configuration.
int verify_gh(const RunConfig& cfg, std::ostream& out);

/// Full eps sweep; writes the CSV to `csv_out` and a fit summary to `out`.
int run_sweep(const RunConfig& cfg, std::string& csv_out, std::ostream& out);

/// Green's function diagnostics (symmetry, periodicity, splitting invariance,
/// self-constant cross-check, gradient consistency).
int green_check(const RunConfig& cfg, std::ostream& out);

/// Evaluates h and its gradient at given points.
int green_eval_points(const RunConfig& cfg, const std::vector<Vec3>& points, std::ostream& out);

/// Power-law fits recomputed from a sweep CSV produced by run_sweep.
int fit_csv(const RunConfig& cfg, const std::string& csv_text, std::ostream& out);

}  // namespace hkc::cli
