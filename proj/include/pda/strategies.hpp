#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>

#include "pda/market_view.hpp"
#include "pda/mdp_bidding.hpp"
#include "pda/rng.hpp"

namespace pda {

// (timeslot, state, estimate, cleared amount) rows for post-hoc LCP error
// analysis.
struct LcpEstimateRecord {
  std::int64_t timeslot{0};
  int state{0};
  double estimate{0.0};
  double cleared{0.0};
};

// (limit price, valuation) of a cleared real bid/ask in validation mode.
struct ScaleSample {
  double limit_price{0.0};
  double theta{0.0};
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual StrategyDecision decide(const StrategyContext& ctx) = 0;
  virtual void observe(const BrokerView& view) {}
  virtual std::string name() const = 0;

  virtual const std::vector<LcpEstimateRecord>* lcp_log() const { return nullptr; }
  virtual const std::vector<ScaleSample>* scale_log() const { return nullptr; }
};

namespace detail {

// CP-driven limit-price predictor shared by the TacTex baseline and, as the
// mu source, by ZI and ZIP: per-state statistics keyed on public clearing
// prices, solved with the same dynamic program.
class CpPricePredictor {
 public:
  explicit CpPricePredictor(const MdplcpbsConfig& cfg, std::uint64_t seed)
      : cfg_(cfg), stats_(cfg.min_points, 90.0), rng_(mix_seed(seed, 0x7ac7e)) {}

  void observe(const BrokerView& view) {
    for (int s = 1; s <= kNumStates; ++s)
      if (view.clearing_price[s] && view.cleared_volume[s] > 0.0)
        stats_.record(s, *view.clearing_price[s], view.cleared_volume[s]);
    if (view.balancing_price) stats_.record_balancing(*view.balancing_price);
    table_valid_ = false;
  }

  bool warm(int state) const { return stats_.ready(state); }

  // Limit price for one state; cold states draw from the sample policy.
  double price(int state) {
    if (!warm(state)) return rng_.uniform(cfg_.fallback_floor, estimate_balancing_price(stats_));
    refresh();
    return table_.limit_price[state];
  }

  const MarketStats& stats() const { return stats_; }
  MarketStats& stats() { return stats_; }

 private:
  void refresh() {
    if (table_valid_) return;
    const double balancing = estimate_balancing_price(stats_);
    table_ = solve_value_function(
        stats_, balancing, build_candidate_prices(stats_, balancing, cfg_.tick, cfg_.candidate_grid_points));
    table_valid_ = true;
  }

  MdplcpbsConfig cfg_;
  MarketStats stats_;
  SplitMix64 rng_;
  ValueTable table_{};
  bool table_valid_{false};
};

}  // namespace detail

// Zero intelligence: price uniform with mean mu (the TacTex-predicted limit
// price) and standard deviation 10, full remaining requirement as quantity.
class ZiStrategy : public Strategy {
 public:
  ZiStrategy(const MdplcpbsConfig& cfg, std::uint64_t seed)
      : mu_(cfg, seed), rng_(mix_seed(seed, 0x21)) {}

  static constexpr double kHalfWidth = 17.320508075688772;  // 10 * sqrt(3)

  StrategyDecision decide(const StrategyContext& ctx) override {
    StrategyDecision d;
    for (int s = 1; s <= kNumStates; ++s) {
      if (ctx.energy_req[s] == 0.0) continue;
      const double mu = mu_.price(s);
      const double price = rng_.uniform(mu - kHalfWidth, mu + kHalfWidth);
      d.orders.push_back(OrderRequest{s, ctx.energy_req[s], price});
    }
    return d;
  }

  void observe(const BrokerView& view) override { mu_.observe(view); }
  std::string name() const override { return "zi"; }

 private:
  detail::CpPricePredictor mu_;
  SplitMix64 rng_;
};

// Zero intelligence plus: p = mu * (1.01 + 0.10 * fail_count), failures
// counted per target timeslot and reset by any fill.
class ZipStrategy : public Strategy {
 public:
  ZipStrategy(const MdplcpbsConfig& cfg, std::uint64_t seed) : mu_(cfg, seed) {}

  static double bid_price(double mu, int fail_count) {
    return mu * (1.01 + 0.10 * static_cast<double>(fail_count));
  }

  // Sell-side mirror: margin moves the ask down after failed trades.
  static double ask_price(double mu, int fail_count) {
    return mu * std::max(0.01, 0.99 - 0.10 * static_cast<double>(fail_count));
  }

  StrategyDecision decide(const StrategyContext& ctx) override {
    StrategyDecision d;
    for (int s = 1; s <= kNumStates; ++s) {
      if (ctx.energy_req[s] == 0.0) continue;
      const std::int64_t target = ctx.timeslot + s;
      const double mu = mu_.price(s);
      const double price = ctx.energy_req[s] < 0.0 ? bid_price(mu, fail_count_[target])
                                                   : ask_price(mu, fail_count_[target]);
      d.orders.push_back(OrderRequest{s, ctx.energy_req[s], price});
    }
    return d;
  }

  void observe(const BrokerView& view) override {
    mu_.observe(view);
    for (const auto& o : view.own_orders) {
      if (o.dummy) continue;
      const std::int64_t target = view.timeslot + o.state;
      if (o.filled > kQuantityEps)
        fail_count_[target] = 0;  // partial fill counts as success
      else
        ++fail_count_[target];
    }
  }

  std::string name() const override { return "zip"; }

 private:
  detail::CpPricePredictor mu_;
  std::map<std::int64_t, int> fail_count_;
};

// TacTex-style baseline: the same dynamic program, but the clearing
// probability comes from public clearing prices and the full remaining
// requirement is bid in every open auction (no spreading, no probes).
class TactexStrategy : public Strategy {
 public:
  TactexStrategy(const MdplcpbsConfig& cfg, std::uint64_t seed) : core_(cfg, seed) {}

  StrategyDecision decide(const StrategyContext& ctx) override {
    StrategyDecision d;
    for (int s = 1; s <= kNumStates; ++s) {
      if (ctx.energy_req[s] == 0.0) continue;
      d.orders.push_back(OrderRequest{s, ctx.energy_req[s], core_.price(s)});
    }
    return d;
  }

  void observe(const BrokerView& view) override { core_.observe(view); }
  std::string name() const override { return "tactex"; }

  const MarketStats& cp_stats() const { return core_.stats(); }

 private:
  detail::CpPricePredictor core_;
};

// Fixed scale-based agent: one order per open auction at alpha * theta, where
// theta is drawn per delivery slot from the configured support.
class FixedScaleStrategy : public Strategy {
 public:
  FixedScaleStrategy(double alpha, double theta_lo, double theta_hi, std::uint64_t seed)
      : alpha_(alpha), theta_lo_(theta_lo), theta_hi_(theta_hi), seed_(seed) {
    if (alpha <= 0.0) throw std::invalid_argument("fixed_scale: alpha must be > 0");
  }

  double theta_for_slot(std::int64_t slot) const {
    SplitMix64 g = counter_stream(seed_, static_cast<std::uint64_t>(slot));
    return g.uniform(theta_lo_, theta_hi_);
  }

  StrategyDecision decide(const StrategyContext& ctx) override {
    StrategyDecision d;
    for (int s = 1; s <= kNumStates; ++s) {
      if (ctx.energy_req[s] == 0.0) continue;
      const double theta = theta_for_slot(ctx.timeslot + s);
      d.orders.push_back(OrderRequest{s, ctx.energy_req[s], alpha_ * theta});
    }
    return d;
  }

  std::string name() const override { return "fixed_scale"; }

 private:
  double alpha_;
  double theta_lo_, theta_hi_;
  std::uint64_t seed_;
};

struct MdplcpbsStrategyConfig {
  MdplcpbsConfig mdp;
  bool validation_mode{false};  // draw theta per slot and anchor the MDP on it
  double theta_lo{40.0};
  double theta_hi{80.0};
  double balancing_prior{90.0};
};

// The full MDP + LCP-prediction strategy (Algorithm-1 driver around
// mdplcpbs_step), with probe bookkeeping and the per-auction LCP estimate log.
class MdplcpbsStrategy : public Strategy {
 public:
  MdplcpbsStrategy(const MdplcpbsStrategyConfig& cfg, std::uint64_t seed)
      : cfg_(cfg),
        bid_stats_(cfg.mdp.min_points, cfg.balancing_prior),
        ask_stats_(cfg.mdp.min_points, cfg.balancing_prior),
        rng_(mix_seed(seed, 0x3d9)),
        seed_(seed) {}

  double theta_for_slot(std::int64_t slot) const {
    SplitMix64 g = counter_stream(seed_ ^ 0x5eedULL, static_cast<std::uint64_t>(slot));
    return g.uniform(cfg_.theta_lo, cfg_.theta_hi);
  }

  StrategyDecision decide(const StrategyContext& ctx) override {
    std::array<double, kNumStates + 1> anchor{};
    for (int s = 1; s <= kNumStates; ++s)
      anchor[s] = cfg_.validation_mode ? theta_for_slot(ctx.timeslot + s)
                                       : estimate_balancing_price(bid_stats_);
    const BidPlan plan = mdplcpbs_step(ctx.energy_req, bid_stats_, ask_stats_, anchor, cfg_.mdp, rng_);
    last_plan_ = plan;

    StrategyDecision d;
    for (const auto& o : plan.orders) {
      d.orders.push_back(OrderRequest{o.state, o.quantity, o.limit_price});
      if (cfg_.validation_mode) theta_by_state_[o.state] = anchor[o.state];
    }
    for (const auto& o : plan.dummy_orders)
      d.probes.push_back(OrderRequest{o.state, o.quantity, o.limit_price, true});
    return d;
  }

  void observe(const BrokerView& view) override {
    if (view.balancing_price) {
      bid_stats_.record_balancing(*view.balancing_price);
      ask_stats_.record_balancing(*view.balancing_price);
    }
    // group own orders per state
    std::array<AuctionObservation, kNumStates + 1> obs{};
    std::array<bool, kNumStates + 1> touched{};
    std::array<bool, kNumStates + 1> is_buy{};
    for (const auto& o : view.own_orders) {
      const int s = o.state;
      touched[s] = true;
      obs[s].state = s;
      obs[s].public_cp = view.clearing_price[s];
      obs[s].public_volume = view.cleared_volume[s];
      is_buy[s] = o.quantity < 0.0;
      if (o.dummy) {
        if (o.filled > kQuantityEps) obs[s].cleared_dummy_prices.push_back(o.limit_price);
      } else {
        obs[s].own_final_limit_price = o.limit_price;
        obs[s].own_final_cleared = o.filled > kQuantityEps;
        if (obs[s].own_final_cleared && cfg_.validation_mode) {
          const auto it = theta_by_state_.find(s);
          if (it != theta_by_state_.end())
            scale_log_.push_back(ScaleSample{o.limit_price, it->second});
        }
      }
    }
    for (int s = 1; s <= kNumStates; ++s) {
      if (!touched[s]) continue;
      MarketStats& stats = is_buy[s] ? bid_stats_ : ask_stats_;
      const int before = stats.count(s);
      update_lcp_estimates(stats, obs[s], is_buy[s] ? Side::Buy : Side::Sell);
      if (stats.count(s) > before) {
        const auto& rec = stats.observations(s).back();
        lcp_log_.push_back(LcpEstimateRecord{view.timeslot, s, rec.lcp, rec.cleared});
      }
    }
    theta_by_state_.clear();
  }

  std::string name() const override { return "mdplcpbs"; }
  const std::vector<LcpEstimateRecord>* lcp_log() const override { return &lcp_log_; }
  const std::vector<ScaleSample>* scale_log() const override { return &scale_log_; }

  const MarketStats& bid_stats() const { return bid_stats_; }
  const MarketStats& ask_stats() const { return ask_stats_; }
  const BidPlan& last_plan() const { return last_plan_; }

 private:
  MdplcpbsStrategyConfig cfg_;
  MarketStats bid_stats_;
  MarketStats ask_stats_;
  SplitMix64 rng_;
  std::uint64_t seed_;
  std::map<int, double> theta_by_state_;
  std::vector<LcpEstimateRecord> lcp_log_;
  std::vector<ScaleSample> scale_log_;
  BidPlan last_plan_;
};

}  // namespace pda
