#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hkc/quadrature.hpp"
#include "hkc/torus.hpp"

namespace hkc {

/// One run = one structured config file; flags only control samples, seed and
/// output. Every sub-invariant is validated before any computation.
struct RunConfig {
  TorusSpec spec;
  PoleConfig poles;
  QuadratureSpec quad;
  std::vector<double> eps_list{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};
  std::uint64_t seed = 42;
  std::string output = "sweep.csv";
  double ewald_tol = 1e-12;
  std::optional<double> ewald_alpha;

  EwaldParams ewald_params() const;
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parses and validates a JSON config. Errors name the offending field or
/// invariant.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);

/// Full validation: pole invariants, quadrature resolution, admissibility of
/// every eps in the list (exclusion balls disjoint and inside the paper's
/// trivialization radius, r(eps) < 2 delta0).
void validate(const RunConfig& cfg);

}  // namespace hkc
