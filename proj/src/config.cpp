#include "hkc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace hkc {

using nlohmann::json;

EwaldParams RunConfig::ewald_params() const {
  if (ewald_alpha) return EwaldParams::with_alpha(spec, *ewald_alpha, ewald_tol);
  return EwaldParams::for_spec(spec, ewald_tol);
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  RunConfig cfg;
  try {
    if (j.contains("box")) {
      const auto b = j.at("box");
      if (!b.is_array() || b.size() != 3) throw ConfigError("config: box must be [L1, L2, L3]");
      for (int a = 0; a < 3; ++a) cfg.spec.box[a] = b.at(static_cast<std::size_t>(a)).get<double>();
    }
    if (j.contains("c0")) cfg.poles.c0 = j.at("c0").get<double>();
    if (j.contains("p")) {
      for (const auto& pt : j.at("p")) {
        if (!pt.is_array() || pt.size() != 3) throw ConfigError("config: each p must be [x, y, z]");
        cfg.poles.p.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>(), pt.at(2).get<double>());
      }
    }
    if (j.contains("k")) cfg.poles.k = j.at("k").get<std::vector<int>>();
    if (j.contains("m")) {
      const auto m = j.at("m").get<std::vector<int>>();
      if (m.size() != 8) throw ConfigError("config: m must have exactly 8 entries");
      for (std::size_t i = 0; i < 8; ++i) cfg.poles.m[i] = m[i];
    }
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("resolution")) cfg.quad.resolution = q.at("resolution").get<int>();
      if (q.contains("scheme")) {
        const std::string s = q.at("scheme").get<std::string>();
        if (s == "tensor-midpoint")
          cfg.quad.scheme = QuadratureSpec::Scheme::TensorMidpoint;
        else if (s == "quasi-random")
          cfg.quad.scheme = QuadratureSpec::Scheme::QuasiRandom;
        else
          throw ConfigError("config: quadrature.scheme must be tensor-midpoint or quasi-random");
      }
    }
    if (j.contains("eps_list")) cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("ewald")) {
      const auto& e = j.at("ewald");
      if (e.contains("tol")) cfg.ewald_tol = e.at("tol").get<double>();
      if (e.contains("alpha")) cfg.ewald_alpha = e.at("alpha").get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
  try {
    hkc::validate(cfg.poles, cfg.spec);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.quad.resolution < 16) throw ConfigError("config: quadrature.resolution must be >= 16");
  if (cfg.eps_list.empty()) throw ConfigError("config: eps_list must not be empty");
  const double d0 = delta0(cfg.poles, cfg.spec);
  for (std::size_t i = 0; i < cfg.eps_list.size(); ++i) {
    const double eps = cfg.eps_list[i];
    if (!(eps > 0.0)) throw ConfigError("config: eps_list entries must be positive");
    if (i > 0 && !(eps < cfg.eps_list[i - 1]))
      throw ConfigError("config: eps_list must be sorted descending");
    const double r = exclusion_radius(eps);
    if (!(r < 2.0 * d0)) {
      std::ostringstream msg;
      msg << "config: eps = " << eps << " inadmissible: exclusion radius " << r
          << " must stay below 2*delta0 = " << 2.0 * d0;
      throw ConfigError(msg.str());
    }
  }
  if (!(cfg.ewald_tol > 0.0 && cfg.ewald_tol < 1e-3))
    throw ConfigError("config: ewald.tol out of range");
}

}  // namespace hkc
