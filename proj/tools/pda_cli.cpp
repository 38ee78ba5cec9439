// pdalab command-line driver: equilibrium queries and the three experiment
// families (OBOS validation sweep, strategy benchmark, LCP error report).
//
// Exit codes: 0 success, 2 usage/config error, 3 numerical failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pda/config_io.hpp"
#include "pda/csv.hpp"
#include "pda/equilibrium.hpp"
#include "pda/experiments.hpp"
#include "pda/version.hpp"

namespace {

using pda::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed{0};
  bool seed_set{false};
  bool json_mirror{false};
  bool events{false};
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--seed", o.seed, "master seed (overrides config)")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_flag("--json", o.json_mirror, "also write a JSON mirror of each CSV");
  cmd->add_flag("--events", o.events, "write per-auction event logs");
}

void write_manifest(const CommonOpts& o, const std::string& command) {
  if (o.out_dir.empty()) return;
  std::filesystem::create_directories(o.out_dir);
  json m;
  m["command"] = command;
  m["config"] = o.config_path;
  m["seed"] = o.seed;
  m["out"] = o.out_dir;
  m["version"] = pda::kVersion;
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  m["timestamp"] = buf;
  std::ofstream os(std::filesystem::path(o.out_dir) / "manifest.json");
  os << m.dump(2) << '\n';
}

void save_report(const pda::CsvWriter& csv, const CommonOpts& o, const std::string& name) {
  if (o.out_dir.empty()) {
    std::cout << csv.str();
    return;
  }
  std::filesystem::create_directories(o.out_dir);
  const auto base = std::filesystem::path(o.out_dir) / name;
  csv.save(base.string() + ".csv");
  if (o.json_mirror) {
    json rows = json::array();
    for (const auto& r : csv.rows()) {
      json row;
      for (std::size_t i = 0; i < csv.header().size() && i < r.size(); ++i)
        row[csv.header()[i]] = r[i];
      rows.push_back(row);
    }
    std::ofstream os(base.string() + ".json");
    os << rows.dump(2) << '\n';
  }
}

void save_events(const std::vector<pda::GameResult>& games, const CommonOpts& o,
                 const std::string& tag) {
  if (!o.events || o.out_dir.empty()) return;
  for (std::size_t g = 0; g < games.size(); ++g) {
    pda::CsvWriter csv({"timeslot", "state", "cp", "volume", "lcb_price", "lca_price"});
    for (const auto& a : games[g].auctions) {
      csv.row()
          .add(a.timeslot)
          .add(a.state)
          .add(a.cp ? pda::format_number(*a.cp) : std::string("nan"))
          .add(a.volume)
          .add(a.lcb_price)
          .add(a.lca_price);
    }
    save_report(csv, o, "events_" + tag + "_g" + std::to_string(g));
  }
}

pda::UniformBounds parse_bounds(const std::string& text) {
  pda::UniformBounds b;
  std::istringstream is(text);
  char c1 = 0, c2 = 0, c3 = 0;
  if (!(is >> b.l_b >> c1 >> b.h_b >> c2 >> b.l_s >> c3 >> b.h_s) || c1 != ',' || c2 != ',' ||
      c3 != ',')
    throw pda::ConfigError("bounds must be lB,hB,lS,hS");
  if (!b.valid()) throw pda::ConfigError("degenerate bounds: need 0 <= l < h on both sides");
  return b;
}

int cmd_equilibrium(const std::string& setting, const std::string& bounds_text,
                    const std::string& init_text, const CommonOpts& opts) {
  const pda::UniformBounds bounds = parse_bounds(bounds_text);
  pda::ScaleProfile profile;
  pda::SolveMethod method = pda::SolveMethod::ClosedForm;
  double res_b = 0.0, res_s = 0.0;
  pda::Setting set = setting == "obos" ? pda::Setting::Obos : pda::Setting::Tbos;

  if (set == pda::Setting::Obos) {
    profile = pda::obos_closed_form(bounds);
    res_b = profile.alpha_b - pda::obos_buyer_reaction(bounds, profile.alpha_s);
    res_s = profile.alpha_s - pda::obos_seller_reaction(bounds, profile.alpha_b);
  } else {
    const bool unit = bounds.l_b == 0.0 && bounds.h_b == 1.0 && bounds.l_s == 0.0 && bounds.h_s == 1.0;
    if (unit) {
      profile = pda::tbos_unit_closed_form();
      const auto r = pda::tbos_foc_residuals(bounds, profile);
      res_b = r.buyer;
      res_s = r.seller;
    } else {
      pda::ScaleProfile init{0.75, 1.04};
      if (!init_text.empty()) {
        std::istringstream is(init_text);
        char c = 0;
        if (!(is >> init.alpha_b >> c >> init.alpha_s) || c != ',')
          throw pda::ConfigError("init must be alphaB,alphaS");
      }
      const auto result = pda::tbos_general_solve(bounds, init);
      profile = result.profile;
      method = pda::SolveMethod::RootFind;
      res_b = result.residual_buyer;
      res_s = result.residual_seller;
    }
  }

  const bool feasible = pda::feasibility_check(bounds, profile, set);
  std::cout << "setting=" << setting << " alpha_B=" << pda::format_number(profile.alpha_b)
            << " alpha_S=" << pda::format_number(profile.alpha_s)
            << " residuals=(" << pda::format_number(res_b) << "," << pda::format_number(res_s)
            << ") feasible=" << (feasible ? "true" : "false")
            << " method=" << (method == pda::SolveMethod::ClosedForm ? "closed_form" : "root_find")
            << '\n';

  if (!opts.out_dir.empty()) {
    pda::CsvWriter csv({"setting", "alpha_b", "alpha_s", "feasible", "method", "residual_buyer",
                        "residual_seller"});
    csv.row()
        .add(setting)
        .add(profile.alpha_b)
        .add(profile.alpha_s)
        .add(std::string(feasible ? "true" : "false"))
        .add(std::string(method == pda::SolveMethod::ClosedForm ? "closed_form" : "root_find"))
        .add(res_b)
        .add(res_s);
    save_report(csv, opts, "equilibrium");
    write_manifest(opts, "equilibrium");
  }
  return kExitOk;
}

int cmd_obos_validate(const CommonOpts& opts) {
  pda::ObosValidationConfig base;
  if (!opts.config_path.empty()) {
    const json j = pda::load_json_file(opts.config_path);
    base.n_games = pda::detail::get_or(j, "n_games", base.n_games);
    base.horizon = pda::detail::get_or<std::int64_t>(j, "horizon_timeslots", base.horizon);
    base.seed = pda::detail::get_or<std::uint64_t>(j, "seed", base.seed);
    base.demand_mean = pda::detail::get_or(j, "demand_mean", base.demand_mean);
    base.demand_amplitude = pda::detail::get_or(j, "demand_amplitude", base.demand_amplitude);
    base.demand_noise = pda::detail::get_or(j, "demand_noise", base.demand_noise);
    base.balancing_price = pda::detail::get_or(j, "balancing_price", base.balancing_price);
    if (j.contains("bounds")) {
      const auto& b = j.at("bounds");
      base.bounds = pda::UniformBounds{b.at(0).get<double>(), b.at(1).get<double>(),
                                       b.at(2).get<double>(), b.at(3).get<double>()};
    }
    if (j.contains("mdp")) base.mdp = pda::detail::parse_mdp(j.at("mdp"), base.mdp);
  }
  if (opts.seed_set) base.seed = opts.seed;
  if (!base.bounds.valid()) throw pda::ConfigError("degenerate bounds");

  const pda::ScaleProfile theory = pda::obos_closed_form(base.bounds);

  pda::CsvWriter csv({"batch", "fixed_alpha", "mean_scale", "std_scale", "n_cleared_bids"});
  for (int batch = 1; batch <= 2; ++batch) {
    const bool fixed_seller = batch == 1;
    const double center = fixed_seller ? theory.alpha_s : theory.alpha_b;
    for (double alpha : pda::obos_sweep_alphas(center)) {
      pda::ObosValidationConfig cfg = base;
      cfg.fixed_role = fixed_seller ? pda::Role::Seller : pda::Role::Buyer;
      cfg.fixed_alpha = alpha;
      cfg.seed = pda::mix_seed(base.seed, static_cast<std::uint64_t>(batch * 100) +
                                              static_cast<std::uint64_t>(alpha * 1e6));
      const pda::ScaleReport rep = pda::obos_validation(cfg);
      csv.row()
          .add(batch)
          .add(alpha)
          .add(rep.mean_scale)
          .add(rep.std_scale)
          .add(rep.n_cleared);
    }
  }
  save_report(csv, opts, "obos_validate");
  write_manifest(opts, "obos-validate");
  return kExitOk;
}

// Desk-scale market defaults: a cheap first tranche turns the earliest
// auction into a race for supply, later auctions carry a flat premium, the
// balancing price sits above every ask.
pda::SimConfig default_benchmark_sim() {
  pda::SimConfig sim;
  sim.horizon_timeslots = 168;
  sim.balancing_price = 80.0;
  sim.genco = pda::GencoConfig{true, 3600.0, 50.0, 0.5, 0.010, 0.10, 0.30};
  sim.miso = pda::MisoConfig{true, 1.0, 20.0};
  sim.seed = 1;

  const auto broker = [](const std::string& name, const std::string& strategy) {
    pda::BrokerConfig b;
    b.name = name;
    b.strategy = strategy;
    b.params.balancing_prior = 70.0;
    b.params.mdp.min_points = 16;
    return b;
  };
  pda::BrokerConfig mdp = broker("mdplcpbs", "mdplcpbs");
  mdp.params.mdp.n_dummy = 8;
  mdp.params.mdp.beta = 0.65;
  sim.brokers = {broker("zi", "zi"), broker("zip", "zip"), broker("tactex", "tactex"), mdp};
  return sim;
}

int cmd_benchmark(const CommonOpts& opts) {
  pda::BenchmarkConfig cfg;
  cfg.base = default_benchmark_sim();
  if (!opts.config_path.empty()) {
    const json j = pda::load_json_file(opts.config_path);
    if (j.contains("sim")) cfg.base = pda::parse_sim_config(j.at("sim"));
    cfg.n_games = pda::detail::get_or(j, "n_games", cfg.n_games);
    if (j.contains("fractions")) cfg.fractions = j.at("fractions").get<std::vector<double>>();
  }
  if (opts.seed_set) cfg.base.seed = opts.seed;
  cfg.base.validate();

  const pda::CostReport report = pda::benchmark(cfg);
  pda::CsvWriter csv(
      {"fraction", "game", "broker", "strategy", "net_cost", "market_cost", "balancing_cost"});
  for (const auto& r : report.rows)
    csv.row()
        .add(r.fraction)
        .add(r.game)
        .add(r.broker)
        .add(r.strategy)
        .add(r.net_cost)
        .add(r.market_cost)
        .add(r.balancing_cost);
  save_report(csv, opts, "benchmark");
  write_manifest(opts, "benchmark");
  return kExitOk;
}

pda::SimConfig default_lcp_sim() {
  pda::SimConfig sim = default_benchmark_sim();
  pda::BrokerConfig mdp = sim.brokers[3];
  mdp.params.mdp.n_dummy = 10;
  mdp.params.mdp.beta = 0.5;
  sim.brokers = {mdp};
  return sim;
}

int cmd_lcp_error(const CommonOpts& opts) {
  pda::SimConfig sim = default_lcp_sim();
  int n_games = 8;
  std::string broker_name = "mdplcpbs";
  if (!opts.config_path.empty()) {
    const json j = pda::load_json_file(opts.config_path);
    if (j.contains("sim")) sim = pda::parse_sim_config(j.at("sim"));
    n_games = pda::detail::get_or(j, "n_games", n_games);
    broker_name = pda::detail::get_or<std::string>(j, "broker", broker_name);
  }
  if (opts.seed_set) sim.seed = opts.seed;
  sim.validate();

  const auto games = pda::run_indexed(static_cast<std::size_t>(n_games), [&](std::size_t g) {
    pda::SimConfig game_cfg = sim;
    game_cfg.seed = pda::mix_seed(sim.seed, g);
    return pda::run_game(game_cfg);
  });
  const pda::ErrorTable table = pda::lcp_error_report(games, broker_name);

  pda::CsvWriter csv({"state", "weighted_rel_error_pct", "std_rel_error_pct", "mean_cleared_mwh",
                      "n_auctions", "first_auction_share"});
  for (const auto& r : table.rows)
    csv.row()
        .add(r.state)
        .add(r.weighted_rel_error_pct)
        .add(r.std_rel_error_pct)
        .add(r.mean_cleared)
        .add(r.n_auctions)
        .add(table.first_auction_share);
  save_report(csv, opts, "lcp_error");
  save_events(games, opts, "lcp");
  write_manifest(opts, "lcp-error");

  // stats snapshots for post-hoc analysis
  if (!opts.out_dir.empty()) {
    for (std::size_t g = 0; g < games.size(); ++g) {
      pda::MarketStats stats(1, 0.0);
      for (const auto& b : games[g].brokers)
        for (const auto& rec : b.lcp_log)
          if (broker_name.empty() || b.name == broker_name)
            stats.record(rec.state, rec.estimate, rec.cleared);
      std::ofstream os(std::filesystem::path(opts.out_dir) /
                       ("stats_g" + std::to_string(g) + ".txt"));
      stats.save(os);
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pdalab: periodic double auction laboratory"};
  app.set_version_flag("--version", pda::kVersion);
  app.require_subcommand(1);

  CommonOpts eq_opts, val_opts, bench_opts, lcp_opts;
  std::string setting = "obos", bounds_text = "0,1,0,1", init_text;

  auto* eq = app.add_subcommand("equilibrium", "closed-form / root-found scale equilibrium");
  eq->add_option("--setting", setting, "obos | tbos")
      ->check(CLI::IsMember({"obos", "tbos"}))
      ->required();
  eq->add_option("--bounds", bounds_text, "lB,hB,lS,hS")->required();
  eq->add_option("--init", init_text, "alphaB,alphaS starting point (tbos root find)");
  add_common(eq, eq_opts);

  auto* val = app.add_subcommand("obos-validate", "Table-1 style fixed-vs-adaptive sweep");
  add_common(val, val_opts);

  auto* bench = app.add_subcommand("benchmark", "net-cost comparison across strategies");
  add_common(bench, bench_opts);

  auto* lcp = app.add_subcommand("lcp-error", "LCP prediction error report");
  add_common(lcp, lcp_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (eq->parsed()) return cmd_equilibrium(setting, bounds_text, init_text, eq_opts);
    if (val->parsed()) return cmd_obos_validate(val_opts);
    if (bench->parsed()) return cmd_benchmark(bench_opts);
    if (lcp->parsed()) return cmd_lcp_error(lcp_opts);
  } catch (const pda::NoConvergenceError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const pda::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const pda::DegenerateError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
