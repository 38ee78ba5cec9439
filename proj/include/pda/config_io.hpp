#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "pda/experiments.hpp"
#include "pda/sim.hpp"

namespace pda {

using json = nlohmann::json;

namespace detail {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

inline MdplcpbsConfig parse_mdp(const json& j, MdplcpbsConfig base) {
  base.min_points = get_or(j, "min_points", base.min_points);
  base.beta = get_or(j, "beta", base.beta);
  base.n_dummy = get_or(j, "n_dummy", base.n_dummy);
  base.fallback_floor = get_or(j, "fallback_floor", base.fallback_floor);
  base.tick = get_or(j, "tick", base.tick);
  base.candidate_grid_points = get_or(j, "candidate_grid_points", base.candidate_grid_points);
  return base;
}

}  // namespace detail

inline SimConfig parse_sim_config(const json& j) {
  SimConfig cfg;
  cfg.horizon_timeslots = detail::get_or<std::int64_t>(j, "horizon_timeslots", cfg.horizon_timeslots);
  cfg.demand_fraction = detail::get_or(j, "demand_fraction", cfg.demand_fraction);
  cfg.seed = detail::get_or<std::uint64_t>(j, "seed", cfg.seed);

  if (j.contains("balancing_price")) {
    const auto& b = j.at("balancing_price");
    if (b.is_string()) {
      if (b.get<std::string>() != "dynamic")
        throw ConfigError("balancing_price must be a number or \"dynamic\"");
      cfg.balancing_dynamic = true;
    } else {
      cfg.balancing_price = b.get<double>();
    }
  }

  if (j.contains("genco")) {
    const auto& g = j.at("genco");
    cfg.genco.enabled = detail::get_or(g, "enabled", cfg.genco.enabled);
    cfg.genco.capacity = detail::get_or(g, "capacity", cfg.genco.capacity);
    cfg.genco.base_cost = detail::get_or(g, "base_cost", cfg.genco.base_cost);
    cfg.genco.noise_std = detail::get_or(g, "noise_std", cfg.genco.noise_std);
    cfg.genco.markup_per_state = detail::get_or(g, "markup_per_state", cfg.genco.markup_per_state);
    cfg.genco.late_premium = detail::get_or(g, "late_premium", cfg.genco.late_premium);
    cfg.genco.first_tranche = detail::get_or(g, "first_tranche", cfg.genco.first_tranche);
  }
  if (j.contains("miso")) {
    const auto& m = j.at("miso");
    cfg.miso.enabled = detail::get_or(m, "enabled", cfg.miso.enabled);
    cfg.miso.price_floor = detail::get_or(m, "price_floor", cfg.miso.price_floor);
    cfg.miso.quantity = detail::get_or(m, "quantity", cfg.miso.quantity);
  }
  if (j.contains("demand")) {
    const auto& d = j.at("demand");
    const std::string model = detail::get_or<std::string>(d, "model", "sinusoidal");
    if (model == "sinusoidal") {
      cfg.demand.model = DemandConfig::Model::Sinusoidal;
      cfg.demand.mean = detail::get_or(d, "mean", cfg.demand.mean);
      cfg.demand.amplitude = detail::get_or(d, "amplitude", cfg.demand.amplitude);
      cfg.demand.noise_std = detail::get_or(d, "noise_std", cfg.demand.noise_std);
    } else if (model == "file") {
      cfg.demand.model = DemandConfig::Model::File;
      const std::string path = d.at("path").get<std::string>();
      std::ifstream is(path);
      if (!is) throw ConfigError("cannot open demand file: " + path);
      double v = 0.0;
      while (is >> v) cfg.demand.file_values.push_back(v);
    } else {
      throw ConfigError("unknown demand model: " + model);
    }
  }
  if (j.contains("brokers")) {
    for (const auto& b : j.at("brokers")) {
      BrokerConfig bc;
      bc.name = b.at("name").get<std::string>();
      bc.strategy = b.at("strategy").get<std::string>();
      if (b.contains("params")) {
        const auto& p = b.at("params");
        bc.params.seller = detail::get_or(p, "seller", bc.params.seller);
        bc.params.fixed_alpha = detail::get_or(p, "alpha", bc.params.fixed_alpha);
        bc.params.theta_lo = detail::get_or(p, "theta_lo", bc.params.theta_lo);
        bc.params.theta_hi = detail::get_or(p, "theta_hi", bc.params.theta_hi);
        bc.params.validation_mode = detail::get_or(p, "validation_mode", bc.params.validation_mode);
        bc.params.balancing_prior = detail::get_or(p, "balancing_prior", bc.params.balancing_prior);
        bc.params.mdp = detail::parse_mdp(p, bc.params.mdp);
      }
      cfg.brokers.push_back(bc);
    }
  }
  return cfg;
}

inline json load_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return j;
}

}  // namespace pda
