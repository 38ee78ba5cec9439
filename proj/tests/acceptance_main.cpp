// Acceptance suite: one line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pda/clearing.hpp"
#include "pda/config_io.hpp"
#include "pda/equilibrium.hpp"
#include "pda/equilibrium_mc.hpp"
#include "pda/experiments.hpp"
#include "pda/sim.hpp"

#include "test_util.hpp"

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Criterion {
  int id;
  std::string label;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<Criterion> g_results;

void run(int id, const std::string& label, const std::function<bool(std::string&)>& body) {
  std::string detail;
  const auto start = Clock::now();
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  g_results.push_back(Criterion{id, label, pass, detail, secs});
  std::printf("[%s] criterion %2d (%s): %s  [%.1fs]\n", pass ? "PASS" : "FAIL", id, label.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// --------------------------------------------------------------------------
// 1. closed-form equilibria
// --------------------------------------------------------------------------
bool criterion1(std::string& detail) {
  const auto unit = pda::obos_closed_form(pda::UniformBounds{0, 1, 0, 1});
  const bool a = near(unit.alpha_b, 2.0 / 3.0, 1e-12) && near(unit.alpha_s, 1.0, 1e-12);
  const auto forty = pda::obos_closed_form(pda::UniformBounds{40, 80, 40, 80});
  const bool b = near(forty.alpha_b, 0.891386, 1e-5) && near(forty.alpha_s, 1.048689, 1e-5);
  const auto tbos = pda::tbos_unit_closed_form();
  // 1.04056942 is the rounded rendering of (1 + sqrt(10)) / 4
  const bool c = near(tbos.alpha_b, 0.75, 1e-9) &&
                 near(tbos.alpha_s, (1.0 + std::sqrt(10.0)) / 4.0, 1e-9) &&
                 near(tbos.alpha_s, 1.04056942, 1e-8);
  detail = "obos unit (" + fmt(unit.alpha_b) + "," + fmt(unit.alpha_s) + ") obos 40-80 (" +
           fmt(forty.alpha_b) + "," + fmt(forty.alpha_s) + ") tbos (" + fmt(tbos.alpha_b) + "," +
           fmt(tbos.alpha_s) + ")";
  return a && b && c;
}

// --------------------------------------------------------------------------
// 2. FOC consistency
// --------------------------------------------------------------------------
bool criterion2(std::string& detail) {
  const auto r = pda::tbos_foc_residuals(pda::UniformBounds{0, 1, 0, 1}, pda::tbos_unit_closed_form());
  const bool tbos_ok = std::abs(r.buyer) < 1e-10 && std::abs(r.seller) < 1e-10;

  bool obos_ok = true;
  pda::SplitMix64 rng(1001);
  for (int i = 0; i < 50 && obos_ok; ++i) {
    pda::UniformBounds b;
    b.l_b = rng.uniform(0.0, 40.0);
    b.h_b = b.l_b + rng.uniform(1.0, 60.0);
    b.l_s = rng.uniform(0.0, 40.0);
    b.h_s = b.l_s + rng.uniform(1.0, 60.0);
    const auto p = pda::obos_closed_form(b);
    obos_ok = near(p.alpha_b, pda::obos_buyer_reaction(b, p.alpha_s), 1e-12 * (1 + p.alpha_b)) &&
              near(p.alpha_s, pda::obos_seller_reaction(b, p.alpha_b), 1e-12 * (1 + p.alpha_s));
  }
  detail = "tbos residuals (" + fmt(r.buyer) + "," + fmt(r.seller) + "), obos reactions " +
           (obos_ok ? "hold" : "violated");
  return tbos_ok && obos_ok;
}

// --------------------------------------------------------------------------
// 3. equilibrium fixed point via the MC oracle
// --------------------------------------------------------------------------
bool criterion3(std::string& detail) {
  constexpr std::uint64_t kSamples = 1000000;
  const pda::UniformBounds unit{0, 1, 0, 1};
  const pda::GridSpec grid{0.30, 1.80, 0.01};
  const auto tbos = pda::tbos_unit_closed_form();

  struct Combo {
    const char* name;
    pda::Role role;
    pda::Setting setting;
    pda::ScaleProfile opponent;
    double target;
  };
  const std::vector<Combo> combos = {
      {"obos-buyer", pda::Role::Buyer, pda::Setting::Obos, {0.0, 1.0}, 2.0 / 3.0},
      {"obos-seller", pda::Role::Seller, pda::Setting::Obos, {2.0 / 3.0, 0.0}, 1.0},
      {"tbos-buyer", pda::Role::Buyer, pda::Setting::Tbos, {0.75, tbos.alpha_s}, 0.75},
      {"tbos-seller", pda::Role::Seller, pda::Setting::Tbos, {0.75, 0.0}, tbos.alpha_s},
  };

  bool all = true;
  std::ostringstream os;
  for (const auto& c : combos) {
    const auto t0 = Clock::now();
    const double br =
        pda::best_response_scale(unit, c.opponent, c.role, c.setting, grid, kSamples, 90210);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool ok = near(br, c.target, 0.05) && secs <= 60.0;
    all = all && ok;
    os << c.name << " br=" << fmt(br) << " (target " << fmt(c.target) << ", " << fmt(secs)
       << "s) ";
  }
  detail = os.str();
  return all;
}

// --------------------------------------------------------------------------
// 4. expected utilities at the unit OBOS equilibrium
// --------------------------------------------------------------------------
bool criterion4(std::string& detail) {
  constexpr std::uint64_t kSamples = 1000000;
  const pda::UniformBounds unit{0, 1, 0, 1};
  const pda::ScaleProfile eq{2.0 / 3.0, 1.0};
  const auto buyer =
      pda::expected_utility_mc(unit, eq, pda::Role::Buyer, pda::Setting::Obos, kSamples, 555);
  const auto seller =
      pda::expected_utility_mc(unit, eq, pda::Role::Seller, pda::Setting::Obos, kSamples, 556);
  const bool buyer_ok = near(buyer.mean, 1.0 / 9.0, 3.0 * buyer.std_error);
  const bool seller_ok = near(seller.mean, 1.0 / 24.0, 3.0 * seller.std_error);
  detail = "buyer " + fmt(buyer.mean) + " vs 1/9 (se " + fmt(buyer.std_error) + "), seller " +
           fmt(seller.mean) + " vs 1/24 (se " + fmt(seller.std_error) + ")";
  return buyer_ok && seller_ok;
}

// --------------------------------------------------------------------------
// 5. clearing invariants against the brute-force oracle
// --------------------------------------------------------------------------
bool criterion5(std::string& detail) {
  pda::SplitMix64 rng(424242);
  int checked = 0;
  for (int iter = 0; iter < 10000; ++iter) {
    const pda::OrderBook book = pda::testing::random_book(rng);
    const auto res = pda::clear_acpr(book);
    if (std::min(res.q_a, res.q_b) != 0.0) {
      detail = "residual invariant violated at iteration " + std::to_string(iter);
      return false;
    }
    const auto oracle = pda::testing::brute_force_max_volume(book);
    if (!near(res.total_cleared, oracle.max_volume, 1e-9)) {
      detail = "volume mismatch at iteration " + std::to_string(iter) + ": engine " +
               fmt(res.total_cleared) + " oracle " + fmt(oracle.max_volume);
      return false;
    }
    if (!res.clearing_price) continue;
    ++checked;
    const double cp = *res.clearing_price;
    double lcb_price = 0.0, lca_price = 0.0;
    for (const auto& o : book.bids)
      if (o.id == *res.lcb) lcb_price = o.price;
    for (const auto& o : book.asks)
      if (o.id == *res.lca) lca_price = o.price;
    if (lcb_price < cp - 1e-9 || lca_price > cp + 1e-9) {
      detail = "LCB >= CP >= LCA violated at iteration " + std::to_string(iter);
      return false;
    }
  }
  detail = std::to_string(checked) + " cleared books of 10000 match the oracle";
  return true;
}

// --------------------------------------------------------------------------
// 6. complete-information best response equals exhaustive grid search
// --------------------------------------------------------------------------
bool criterion6(std::string& detail) {
  pda::SplitMix64 rng(515151);
  const auto t0 = Clock::now();
  int feasible = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    const pda::OrderBook others = pda::testing::random_book(rng, 5);
    const pda::Side side = (rng.next() & 1) ? pda::Side::Buy : pda::Side::Sell;
    const double qty = 0.5 + 8.0 * rng.uniform01();
    const double tick = 0.25;
    double lo = 1e300, hi = -1e300;
    for (const auto& o : others.bids) lo = std::min(lo, o.price), hi = std::max(hi, o.price);
    for (const auto& o : others.asks) lo = std::min(lo, o.price), hi = std::max(hi, o.price);
    const auto oracle = pda::testing::exhaustive_best_response(others, side, qty, tick, lo, hi);
    if (!oracle) {
      try {
        (void)pda::best_response_price(others, side, qty, tick);
        detail = "engine found a fill where the oracle says infeasible, iteration " +
                 std::to_string(iter);
        return false;
      } catch (const pda::InfeasibleError&) {
        continue;
      }
    }
    const double p = pda::best_response_price(others, side, qty, tick);
    if (!near(p, *oracle, 1e-9)) {
      detail = "mismatch at iteration " + std::to_string(iter) + ": engine " + fmt(p) +
               " oracle " + fmt(*oracle);
      return false;
    }
    ++feasible;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  detail = std::to_string(feasible) + " feasible instances matched in " + fmt(secs) + "s";
  return secs <= 30.0;
}

// --------------------------------------------------------------------------
// 7. OBOS simulation validation sweep
// --------------------------------------------------------------------------
bool criterion7(std::string& detail) {
  const auto t0 = Clock::now();
  const pda::UniformBounds bounds{40, 80, 40, 80};
  const auto theory = pda::obos_closed_form(bounds);

  std::vector<double> means;
  for (double alpha : pda::obos_sweep_alphas(theory.alpha_s)) {
    pda::ObosValidationConfig cfg;
    cfg.bounds = bounds;
    cfg.fixed_role = pda::Role::Seller;
    cfg.fixed_alpha = alpha;
    cfg.n_games = 30;
    cfg.horizon = 168;
    cfg.seed = pda::mix_seed(2025, static_cast<std::uint64_t>(alpha * 1e6));
    means.push_back(pda::obos_validation(cfg).mean_scale);
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();

  bool monotone = true;
  for (std::size_t i = 1; i < means.size(); ++i)
    if (means[i] < means[i - 1]) monotone = false;
  const bool centered = near(means[2], theory.alpha_b, 0.15);

  std::ostringstream os;
  os << "buyer means [";
  for (double m : means) os << fmt(m) << " ";
  os << "] theory " << fmt(theory.alpha_b) << ", monotone=" << (monotone ? "yes" : "no") << ", "
     << fmt(secs) << "s";
  detail = os.str();
  return monotone && centered && secs <= 600.0;
}

// Desk-scale market: a cheap first tranche makes the earliest auction a real
// race for supply, later auctions carry a flat premium, balancing sits above
// every ask.
pda::SimConfig acceptance_benchmark_sim() {
  pda::SimConfig sim;
  sim.horizon_timeslots = 168;
  sim.balancing_price = 80.0;
  sim.genco = pda::GencoConfig{true, 3600.0, 50.0, 0.5, 0.010, 0.10, 0.30};
  sim.miso = pda::MisoConfig{true, 1.0, 20.0};
  sim.seed = 20250809;
  const auto broker = [](const char* name, const char* strategy) {
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

// --------------------------------------------------------------------------
// 8. benchmark cost ordering
// --------------------------------------------------------------------------
bool criterion8(std::string& detail) {
  pda::BenchmarkConfig cfg;
  cfg.base = acceptance_benchmark_sim();
  cfg.fractions = {0.25, 0.5, 0.75, 1.0};
  cfg.n_games = 10;
  const pda::CostReport report = pda::benchmark(cfg);

  bool all = true;
  std::ostringstream os;
  for (double f : cfg.fractions) {
    std::map<std::string, double> mean;
    std::map<std::string, int> count;
    for (const auto& row : report.rows) {
      if (row.fraction != f) continue;
      mean[row.strategy] += row.net_cost;
      ++count[row.strategy];
    }
    for (auto& [k, v] : mean) v /= count[k];

    // worst case: every MWh of the shared requirement bought at balancing
    pda::SimConfig probe = cfg.base;
    probe.demand_fraction = f;
    probe.seed = pda::mix_seed(cfg.base.seed, static_cast<std::uint64_t>(f * 1000.0) * 1000 + 0);
    double total_req = 0.0;
    for (double d : pda::detail::build_demand(probe)) total_req += f * d;
    const double bound = total_req * cfg.base.balancing_price;

    bool cost_bound = true;
    for (const auto& row : report.rows)
      if (row.fraction == f && row.net_cost > bound * 1.0001) cost_bound = false;

    const bool beats_zi = mean["mdplcpbs"] <= mean["zi"];
    const bool beats_tactex = mean["mdplcpbs"] <= mean["tactex"];
    const bool beats_zip = f != 1.0 || mean["mdplcpbs"] <= mean["zip"];
    all = all && beats_zi && beats_tactex && beats_zip && cost_bound;
    os << "f=" << fmt(f) << " {mdp " << fmt(mean["mdplcpbs"]) << ", zi " << fmt(mean["zi"])
       << ", zip " << fmt(mean["zip"]) << ", tactex " << fmt(mean["tactex"]) << "}"
       << (cost_bound ? "" : " COST-BOUND-VIOLATED") << "; ";
  }
  detail = os.str();
  return all;
}

// --------------------------------------------------------------------------
// 9. LCP prediction error and first-auction volume share
// --------------------------------------------------------------------------
bool criterion9(std::string& detail) {
  pda::SimConfig sim = acceptance_benchmark_sim();
  pda::BrokerConfig mdp = sim.brokers[3];
  mdp.params.mdp.n_dummy = 10;
  mdp.params.mdp.beta = 0.5;
  sim.brokers = {mdp};
  sim.demand_fraction = 1.0;

  const auto games = pda::run_indexed(8, [&](std::size_t g) {
    pda::SimConfig game_cfg = sim;
    game_cfg.seed = pda::mix_seed(sim.seed, 7000 + g);
    return pda::run_game(game_cfg);
  });
  const pda::ErrorTable table = pda::lcp_error_report(games, "mdplcpbs");

  double state24_err = -1.0;
  for (const auto& row : table.rows)
    if (row.state == 24) state24_err = row.weighted_rel_error_pct;

  detail = "state-24 weighted error " + fmt(state24_err) + "% (<=25), first-auction share " +
           fmt(100.0 * table.first_auction_share) + "% (>=70)";
  return state24_err >= 0.0 && state24_err <= 25.0 && table.first_auction_share >= 0.70;
}

// --------------------------------------------------------------------------
// 10. CLI determinism: identical config + seed => byte-identical CSVs
// --------------------------------------------------------------------------
bool criterion10(std::string& detail) {
  const fs::path dir = fs::temp_directory_path() / "pdalab_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);

  std::ofstream cfg(dir / "cfg.json");
  cfg << R"({"n_games": 2, "fractions": [0.5, 1.0], "sim": {
    "horizon_timeslots": 64, "seed": 99, "balancing_price": 100.0,
    "genco": {"capacity": 3000, "base_cost": 50, "noise_std": 3, "markup_per_state": 0.02},
    "demand": {"model": "sinusoidal", "mean": 400, "amplitude": 100, "noise_std": 20},
    "brokers": [
      {"name": "zi", "strategy": "zi"},
      {"name": "mdplcpbs", "strategy": "mdplcpbs", "params": {"n_dummy": 5, "beta": 0.6}}
    ]}})";
  cfg.close();

  const auto run_cmd = [&](const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(PDA_CLI_BIN) + " " + args + " > " + log.string() + " 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  const auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
  };

  const std::string cfg_arg = " --config " + (dir / "cfg.json").string();
  if (run_cmd("benchmark" + cfg_arg + " --out " + (dir / "a").string(), dir / "log1") != 0 ||
      run_cmd("benchmark" + cfg_arg + " --out " + (dir / "b").string(), dir / "log2") != 0) {
    detail = "benchmark command failed";
    return false;
  }
  const bool bench_ok = slurp(dir / "a" / "benchmark.csv") == slurp(dir / "b" / "benchmark.csv") &&
                        !slurp(dir / "a" / "benchmark.csv").empty();

  if (run_cmd("equilibrium --setting obos --bounds 40,80,40,80 --out " + (dir / "e1").string(),
              dir / "log3") != 0 ||
      run_cmd("equilibrium --setting obos --bounds 40,80,40,80 --out " + (dir / "e2").string(),
              dir / "log4") != 0) {
    detail = "equilibrium command failed";
    return false;
  }
  const bool eq_ok =
      slurp(dir / "e1" / "equilibrium.csv") == slurp(dir / "e2" / "equilibrium.csv");

  detail = std::string("benchmark csv ") + (bench_ok ? "identical" : "DIFFERS") +
           ", equilibrium csv " + (eq_ok ? "identical" : "DIFFERS");
  return bench_ok && eq_ok;
}

}  // namespace

int main() {
  std::printf("pdalab acceptance suite\n");
  run(1, "closed-form equilibria", criterion1);
  run(2, "FOC consistency", criterion2);
  run(3, "MC best-response fixed points", criterion3);
  run(4, "expected utilities at unit OBOS equilibrium", criterion4);
  run(5, "clearing invariants vs brute-force oracle", criterion5);
  run(6, "best response vs exhaustive grid search", criterion6);
  run(7, "OBOS validation sweep", criterion7);
  run(8, "benchmark cost ordering", criterion8);
  run(9, "LCP error and first-auction share", criterion9);
  run(10, "CLI determinism", criterion10);

  int failures = 0;
  for (const auto& c : g_results)
    if (!c.pass) ++failures;
  std::printf("%d/%zu criteria passed\n", static_cast<int>(g_results.size()) - failures,
              g_results.size());
  return failures == 0 ? 0 : 1;
}
