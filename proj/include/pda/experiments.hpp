#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <future>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pda/equilibrium.hpp"
#include "pda/sim.hpp"

namespace pda {

inline int thread_count_from_env() {
  const char* env = std::getenv("PDALAB_THREADS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

// Deterministic map over game indices: results land by index no matter how
// many workers run.
template <typename F>
auto run_indexed(std::size_t n, F&& fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<R> out(n);
  const int threads = std::min<int>(thread_count_from_env(), static_cast<int>(n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::future<void>> futs;
  futs.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    futs.push_back(std::async(std::launch::async, [&, w]() {
      for (std::size_t i = static_cast<std::size_t>(w); i < n; i += static_cast<std::size_t>(threads))
        out[i] = fn(i);
    }));
  }
  for (auto& f : futs) f.get();
  return out;
}

// ---------------------------------------------------------------------------
// OBOS validation (Table-1 style): isolated market, one fixed-scale agent,
// one adaptive MDPLCPBS agent anchored on its drawn valuation.
// ---------------------------------------------------------------------------

struct ObosValidationConfig {
  UniformBounds bounds{40.0, 80.0, 40.0, 80.0};
  Role fixed_role{Role::Seller};  // which side is pinned to fixed_alpha
  double fixed_alpha{1.0};
  int n_games{30};
  std::int64_t horizon{168};
  double demand_mean{800.0};
  double demand_amplitude{200.0};
  double demand_noise{40.0};
  double balancing_price{90.0};
  MdplcpbsConfig mdp{};
  std::uint64_t seed{1};
};

struct ScaleReport {
  double mean_scale{0.0};  // mean over per-game means of limit/theta on cleared orders
  double std_scale{0.0};
  std::int64_t n_cleared{0};
};

inline SimConfig make_obos_sim_config(const ObosValidationConfig& cfg, std::uint64_t game_seed) {
  SimConfig sim;
  sim.horizon_timeslots = cfg.horizon;
  sim.seed = game_seed;
  sim.genco.enabled = false;
  sim.miso.enabled = false;
  sim.balancing_price = cfg.balancing_price;
  sim.demand.mean = cfg.demand_mean;
  sim.demand.amplitude = cfg.demand_amplitude;
  sim.demand.noise_std = cfg.demand_noise;

  BrokerConfig fixed;
  fixed.name = "fixed";
  fixed.strategy = "fixed_scale";
  fixed.params.fixed_alpha = cfg.fixed_alpha;
  BrokerConfig adaptive;
  adaptive.name = "adaptive";
  adaptive.strategy = "mdplcpbs";
  adaptive.params.validation_mode = true;
  adaptive.params.mdp = cfg.mdp;

  if (cfg.fixed_role == Role::Seller) {
    fixed.params.seller = true;
    fixed.params.theta_lo = cfg.bounds.l_s;
    fixed.params.theta_hi = cfg.bounds.h_s;
    adaptive.params.seller = false;
    adaptive.params.theta_lo = cfg.bounds.l_b;
    adaptive.params.theta_hi = cfg.bounds.h_b;
  } else {
    fixed.params.seller = false;
    fixed.params.theta_lo = cfg.bounds.l_b;
    fixed.params.theta_hi = cfg.bounds.h_b;
    adaptive.params.seller = true;
    adaptive.params.theta_lo = cfg.bounds.l_s;
    adaptive.params.theta_hi = cfg.bounds.h_s;
  }
  sim.brokers = {fixed, adaptive};
  return sim;
}

inline ScaleReport obos_validation(const ObosValidationConfig& cfg) {
  const auto games = run_indexed(static_cast<std::size_t>(cfg.n_games), [&](std::size_t g) {
    return run_game(make_obos_sim_config(cfg, mix_seed(cfg.seed, g)));
  });

  std::vector<double> game_means;
  std::int64_t n_cleared = 0;
  for (const auto& game : games) {
    for (const auto& b : game.brokers) {
      if (b.strategy != "mdplcpbs") continue;
      if (b.scale_log.empty()) continue;
      double sum = 0.0;
      for (const auto& s : b.scale_log) sum += s.limit_price / s.theta;
      game_means.push_back(sum / static_cast<double>(b.scale_log.size()));
      n_cleared += static_cast<std::int64_t>(b.scale_log.size());
    }
  }

  ScaleReport rep;
  rep.n_cleared = n_cleared;
  if (game_means.empty()) return rep;
  double sum = 0.0;
  for (double m : game_means) sum += m;
  rep.mean_scale = sum / static_cast<double>(game_means.size());
  double ss = 0.0;
  for (double m : game_means) ss += (m - rep.mean_scale) * (m - rep.mean_scale);
  rep.std_scale = game_means.size() > 1
                      ? std::sqrt(ss / static_cast<double>(game_means.size() - 1))
                      : 0.0;
  return rep;
}

// The Table-1 sweep: fixed factor at the closed-form value and +/-0.05,
// +/-0.10 around it, per batch.
inline std::vector<double> obos_sweep_alphas(double center) {
  return {center - 0.10, center - 0.05, center, center + 0.05, center + 0.10};
}

// ---------------------------------------------------------------------------
// Benchmark (Figure-2 style): identical requirement stream for every broker,
// GenCos and Miso active, net cost per broker per game.
// ---------------------------------------------------------------------------

struct BenchmarkConfig {
  SimConfig base;  // brokers + market participants
  std::vector<double> fractions{0.25, 0.5, 0.75, 1.0};
  int n_games{10};
};

struct CostRow {
  double fraction{0.0};
  int game{0};
  std::string broker;
  std::string strategy;
  double net_cost{0.0};
  double market_cost{0.0};
  double balancing_cost{0.0};
};

struct CostReport {
  std::vector<CostRow> rows;
};

inline CostReport benchmark(const BenchmarkConfig& cfg) {
  CostReport report;
  for (double f : cfg.fractions) {
    const auto games = run_indexed(static_cast<std::size_t>(cfg.n_games), [&](std::size_t g) {
      SimConfig sim = cfg.base;
      sim.demand_fraction = f;
      sim.seed = mix_seed(cfg.base.seed, static_cast<std::uint64_t>(f * 1000.0) * 1000 + g);
      return run_game(sim);
    });
    for (int g = 0; g < cfg.n_games; ++g) {
      for (const auto& b : games[static_cast<std::size_t>(g)].brokers)
        report.rows.push_back(
            CostRow{f, g, b.name, b.strategy, b.net_cost, b.market_cost, b.balancing_cost});
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// LCP prediction error (Table-2 style).
// ---------------------------------------------------------------------------

struct ErrorRow {
  int state{0};
  double weighted_rel_error_pct{0.0};
  double std_rel_error_pct{0.0};
  double mean_cleared{0.0};
  std::int64_t n_auctions{0};
};

struct ErrorTable {
  std::vector<ErrorRow> rows;          // states 24 down to 20
  double first_auction_share{0.0};     // share of cleared volume at state 24
};

// Weighted relative LCP error per state, the estimates matched to the
// per-auction ground truth (bid side: the true LCB price).
inline ErrorTable lcp_error_report(const std::vector<GameResult>& games,
                                   const std::string& broker_name) {
  struct Acc {
    double werr_sum{0.0};
    double weight_sum{0.0};
    std::vector<double> errors_pct;
    double cleared_sum{0.0};
    std::int64_t n{0};
  };
  std::array<Acc, kNumStates + 1> acc{};
  double volume_first = 0.0, volume_total = 0.0;

  for (const auto& game : games) {
    // ground truth per (timeslot, state)
    std::map<std::pair<std::int64_t, int>, const AuctionRecord*> truth;
    for (const auto& a : game.auctions) {
      truth[{a.timeslot, a.state}] = &a;
      volume_total += a.volume;
      if (a.state == kNumStates) volume_first += a.volume;
    }
    for (const auto& b : game.brokers) {
      if (!broker_name.empty() && b.name != broker_name) continue;
      for (const auto& rec : b.lcp_log) {
        const auto it = truth.find({rec.timeslot, rec.state});
        if (it == truth.end()) continue;
        const double true_lcp = it->second->lcb_price;
        if (true_lcp <= 0.0) continue;
        const double err_pct = std::abs(rec.estimate - true_lcp) / true_lcp * 100.0;
        Acc& a = acc[rec.state];
        a.werr_sum += err_pct * rec.cleared;
        a.weight_sum += rec.cleared;
        a.errors_pct.push_back(err_pct);
        a.cleared_sum += rec.cleared;
        ++a.n;
      }
    }
  }

  ErrorTable table;
  for (int s = kNumStates; s >= 20; --s) {
    const Acc& a = acc[s];
    ErrorRow row;
    row.state = s;
    row.n_auctions = a.n;
    if (a.weight_sum > 0.0) row.weighted_rel_error_pct = a.werr_sum / a.weight_sum;
    if (a.n > 0) {
      row.mean_cleared = a.cleared_sum / static_cast<double>(a.n);
      double mean = 0.0;
      for (double e : a.errors_pct) mean += e;
      mean /= static_cast<double>(a.n);
      double ss = 0.0;
      for (double e : a.errors_pct) ss += (e - mean) * (e - mean);
      row.std_rel_error_pct = a.n > 1 ? std::sqrt(ss / static_cast<double>(a.n - 1)) : 0.0;
    }
    table.rows.push_back(row);
  }
  table.first_auction_share = volume_total > 0.0 ? volume_first / volume_total : 0.0;
  return table;
}

}  // namespace pda
