#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "pda/market_stats.hpp"
#include "pda/order.hpp"
#include "pda/rng.hpp"

namespace pda {

struct DegeneratePricesError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyRangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Value of bidding states 0..24; v[0] is the estimated balancing price and
// limit_price[s] the argmin price for state s.
struct ValueTable {
  std::array<double, kNumStates + 1> value{};
  std::array<double, kNumStates + 1> limit_price{};
};

using CandidateSet = std::array<std::vector<double>, kNumStates + 1>;

// Sorted per-state view of the statistics with cumulative cleared amounts, so
// one p_cleared evaluation is a binary search instead of a scan.
class PreparedStats {
 public:
  static PreparedStats build(const MarketStats& stats) {
    PreparedStats out;
    for (int s = 1; s <= kNumStates; ++s) {
      auto obs = stats.observations(s);
      std::sort(obs.begin(), obs.end(),
                [](const LcpObservation& a, const LcpObservation& b) { return a.lcp < b.lcp; });
      auto& st = out.states_[s];
      st.lcp.reserve(obs.size());
      st.cum.reserve(obs.size());
      double running = 0.0;
      for (const auto& o : obs) {
        running += o.cleared;
        st.lcp.push_back(o.lcp);
        st.cum.push_back(running);
      }
      st.total = running;
    }
    return out;
  }

  // share of cleared amount with lcp strictly below the limit price;
  // nullopt when the state has no cleared amount
  std::optional<double> p_cleared(int state, double limit_price) const {
    const auto& st = states_[state];
    if (st.total <= 0.0) return std::nullopt;
    const auto it = std::lower_bound(st.lcp.begin(), st.lcp.end(), limit_price);
    if (it == st.lcp.begin()) return 0.0;
    const auto idx = static_cast<std::size_t>(it - st.lcp.begin());
    return st.cum[idx - 1] / st.total;
  }

  double total(int state) const { return states_[state].total; }
  double min_lcp(int state) const { return states_[state].lcp.empty() ? 0.0 : states_[state].lcp.front(); }

 private:
  struct State {
    std::vector<double> lcp;
    std::vector<double> cum;
    double total{0.0};
  };
  std::array<State, kNumStates + 1> states_{};
};

// Candidate limit prices per state: the distinct recorded LCPs plus an evenly
// spaced grid up to the balancing estimate, everything offset by one tick so
// the strict inequality in p_cleared counts the anchor observation, plus one
// floor candidate below every recorded LCP (a deliberate never-clears "wait"
// price).
inline CandidateSet build_candidate_prices(const MarketStats& stats, double balancing_price,
                                           double tick = 0.01, int grid_points = 50) {
  CandidateSet out;
  for (int s = 1; s <= kNumStates; ++s) {
    auto& cand = out[s];
    const auto& obs = stats.observations(s);
    if (obs.empty()) {
      cand.push_back(balancing_price);
      continue;
    }
    std::set<double> lcps;
    double lo = obs.front().lcp;
    for (const auto& o : obs) {
      lcps.insert(o.lcp);
      lo = std::min(lo, o.lcp);
    }
    cand.push_back(lo - tick);  // wait candidate, p_cleared = 0
    for (double lcp : lcps) cand.push_back(lcp + tick);
    if (grid_points > 1 && balancing_price > lo) {
      const double step = (balancing_price - lo) / static_cast<double>(grid_points - 1);
      for (int k = 0; k < grid_points; ++k) cand.push_back(lo + step * k + tick);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  }
  return out;
}

// Bid-side dynamic program:
//   v[0] = balancing_price
//   v[s] = min over candidates { p_cleared * price + (1 - p_cleared) * v[s-1] }
// Ties pick the lowest price. A state with no recorded cleared amount cannot
// clear under the empirical estimator, so it passes v[s-1] through and keeps
// the lowest candidate. The ask side is solved by negation.
inline ValueTable solve_value_function(const PreparedStats& stats, double balancing_price,
                                       const CandidateSet& candidates) {
  if (!std::isfinite(balancing_price))
    throw std::invalid_argument("solve_value_function: balancing price must be finite");
  ValueTable table;
  table.value[0] = balancing_price;
  table.limit_price[0] = balancing_price;
  for (int s = 1; s <= kNumStates; ++s) {
    const auto& cand = candidates[s];
    if (cand.empty()) throw std::invalid_argument("solve_value_function: empty candidate set");
    double best_value = std::numeric_limits<double>::infinity();
    double best_price = 0.0;
    bool found = false;
    for (double price : cand) {
      const double p = stats.p_cleared(s, price).value_or(0.0);
      const double v = p * price + (1.0 - p) * table.value[s - 1];
      if (!found || v < best_value - 1e-12 ||
          (std::abs(v - best_value) <= 1e-12 && price < best_price)) {
        best_value = v;
        best_price = price;
        found = true;
      }
    }
    table.value[s] = best_value;
    table.limit_price[s] = best_price;
  }
  return table;
}

inline ValueTable solve_value_function(const MarketStats& stats, double balancing_price,
                                       const CandidateSet& candidates) {
  return solve_value_function(PreparedStats::build(stats), balancing_price, candidates);
}

// Quantity for state s given the requirement for its delivery slot and the
// planned limit prices: sell more / buy more where prices favour it.
//   e > 0 (sell): q = e / sum_{j=s..24} lp[j]/lp[s]
//   e < 0 (buy):  q = e / sum_{j=s..24} lp[s]/lp[j]
inline double spread_quantity(double energy_req, const std::array<double, kNumStates + 1>& limit_prices,
                              int state) {
  if (state < 1 || state > kNumStates) throw std::out_of_range("spread_quantity: state not in 1..24");
  if (energy_req == 0.0) return 0.0;
  for (int j = state; j <= kNumStates; ++j)
    if (std::abs(limit_prices[j]) <= 0.0)
      throw DegeneratePricesError("spread_quantity: zero limit price in range");
  double denom = 0.0;
  const double lp_s = std::abs(limit_prices[state]);
  for (int j = state; j <= kNumStates; ++j) {
    const double lp_j = std::abs(limit_prices[j]);
    denom += energy_req > 0.0 ? lp_j / lp_s : lp_s / lp_j;
  }
  return energy_req / denom;
}

inline constexpr double kDummyQuantity = 0.01;  // minimum tradeable energy, MWh

// Probe prices: bid side spans [beta * limit, balancing]; the ask side mirrors
// upward as [limit, limit / beta]. Inclusive equal spacing, n_dummy >= 2.
inline std::vector<double> dummy_order_prices(Side side, double limit_price,
                                              double balancing_price, int n_dummy, double beta) {
  if (n_dummy < 2) throw std::invalid_argument("dummy_order_prices: n_dummy must be >= 2");
  double lo = 0.0, hi = 0.0;
  if (side == Side::Buy) {
    lo = beta * limit_price;
    hi = balancing_price;
  } else {
    lo = limit_price;
    hi = limit_price / beta;
  }
  if (lo >= hi) throw EmptyRangeError("dummy_order_prices: empty probe range");
  std::vector<double> prices(static_cast<std::size_t>(n_dummy));
  const double step = (hi - lo) / static_cast<double>(n_dummy - 1);
  for (int k = 0; k < n_dummy; ++k) prices[static_cast<std::size_t>(k)] = lo + step * k;
  return prices;
}

// What the broker saw from one auction it participated in.
struct AuctionObservation {
  int state{0};
  std::optional<double> own_final_limit_price;
  bool own_final_cleared{false};
  std::vector<double> cleared_dummy_prices;
  std::optional<double> public_cp;
  double public_volume{0.0};
};

// LCP(s) = min over cleared dummy-bid prices and the own cleared final-bid
// price (max on the ask side); nothing is recorded when nothing of ours
// cleared.
inline void update_lcp_estimates(MarketStats& stats, const AuctionObservation& obs, Side side) {
  std::optional<double> lcp;
  const auto better = [side](double a, double b) {
    return side == Side::Buy ? std::min(a, b) : std::max(a, b);
  };
  for (double p : obs.cleared_dummy_prices) lcp = lcp ? better(*lcp, p) : p;
  if (obs.own_final_cleared && obs.own_final_limit_price)
    lcp = lcp ? better(*lcp, *obs.own_final_limit_price) : *obs.own_final_limit_price;
  if (!lcp) return;
  stats.record(obs.state, *lcp, obs.public_volume);
}

struct MdplcpbsConfig {
  int min_points{24};
  double beta{0.5};
  int n_dummy{10};
  double fallback_floor{1.0};
  double tick{0.01};
  int candidate_grid_points{50};
};

struct PlannedOrder {
  int state{0};
  double quantity{0.0};  // signed: negative buys, positive sells
  double limit_price{0.0};
};

struct BidPlan {
  std::vector<PlannedOrder> orders;
  std::vector<PlannedOrder> dummy_orders;
  bool used_fallback{false};
  ValueTable bid_table;  // the table behind the plan's highest solved state
  ValueTable ask_table;
  bool bid_table_valid{false};
  bool ask_table_valid{false};
};

namespace detail {

inline MarketStats negated(const MarketStats& stats) {
  MarketStats out(stats.min_points(), -stats.balancing_prior());
  for (int s = 1; s <= kNumStates; ++s)
    for (const auto& o : stats.observations(s)) out.record(s, -o.lcp, o.cleared);
  return out;
}

// Table cache for one step: anchors repeat across states (always, outside
// validation mode), so each distinct anchor is solved once.
class AnchoredTables {
 public:
  AnchoredTables(const MarketStats& stats, const MdplcpbsConfig& cfg, bool negate)
      : source_(negate ? negated(stats) : stats),
        prepared_(PreparedStats::build(source_)),
        cfg_(cfg),
        negate_(negate) {}

  const ValueTable& table_for(double anchor) {
    const double key = negate_ ? -anchor : anchor;
    for (auto& [k, t] : cache_)
      if (k == key) return t;
    const CandidateSet cand =
        build_candidate_prices(source_, key, cfg_.tick, cfg_.candidate_grid_points);
    cache_.emplace_back(key, solve_value_function(prepared_, key, cand));
    return cache_.back().second;
  }

  bool negated_side() const { return negate_; }

 private:
  MarketStats source_;
  PreparedStats prepared_;
  MdplcpbsConfig cfg_;
  bool negate_;
  std::vector<std::pair<double, ValueTable>> cache_;
};

}  // namespace detail

// One Algorithm-1 pass: requirement states whose statistics are warm get
// solver prices and spread quantities; a state short of min_points falls back
// to a sample-policy price with its full remaining requirement (per state, so
// one starved residual state cannot poison the whole plan); dummy probes
// accompany every real order. Requirements are signed (negative = buy);
// anchors give the per-state terminal value v[0] (the balancing estimate, or
// the drawn valuation in validation mode).
inline BidPlan mdplcpbs_step(const std::array<double, kNumStates + 1>& energy_req,
                             MarketStats& bid_stats, MarketStats& ask_stats,
                             const std::array<double, kNumStates + 1>& anchor,
                             const MdplcpbsConfig& cfg, SplitMix64& rng) {
  BidPlan plan;
  detail::AnchoredTables bid_tables(bid_stats, cfg, false);
  detail::AnchoredTables ask_tables(ask_stats, cfg, true);
  for (int s = 1; s <= kNumStates; ++s) {
    if (energy_req[s] == 0.0) continue;
    const bool buy = energy_req[s] < 0.0;
    const MarketStats& side_stats = buy ? bid_stats : ask_stats;
    if (side_stats.count(s) < cfg.min_points) {
      plan.used_fallback = true;
      const double price = rng.uniform(cfg.fallback_floor, std::max(cfg.fallback_floor, anchor[s]));
      plan.orders.push_back(PlannedOrder{s, energy_req[s], price});
      continue;
    }
    const ValueTable& table = buy ? bid_tables.table_for(anchor[s]) : ask_tables.table_for(anchor[s]);
    std::array<double, kNumStates + 1> prices{};
    for (int j = 0; j <= kNumStates; ++j)
      prices[j] = buy ? table.limit_price[j] : -table.limit_price[j];
    const double qty = spread_quantity(energy_req[s], prices, s);
    if (buy) {
      plan.bid_table = table;
      plan.bid_table_valid = true;
    } else {
      for (int j = 0; j <= kNumStates; ++j) {
        plan.ask_table.value[j] = -table.value[j];
        plan.ask_table.limit_price[j] = -table.limit_price[j];
      }
      plan.ask_table_valid = true;
    }
    if (std::abs(qty) <= kQuantityEps) continue;
    plan.orders.push_back(PlannedOrder{s, qty, prices[s]});
  }

  for (const auto& o : plan.orders) {
    const Side side = o.quantity < 0.0 ? Side::Buy : Side::Sell;
    std::vector<double> probes;
    try {
      probes = dummy_order_prices(side, o.limit_price, anchor[o.state], cfg.n_dummy, cfg.beta);
    } catch (const EmptyRangeError&) {
      continue;  // probe range collapsed (limit at or above the anchor)
    }
    for (double p : probes)
      plan.dummy_orders.push_back(
          PlannedOrder{o.state, side == Side::Buy ? -kDummyQuantity : kDummyQuantity, p});
  }
  return plan;
}

// Convenience overload with one shared balancing estimate.
inline BidPlan mdplcpbs_step(const std::array<double, kNumStates + 1>& energy_req,
                             MarketStats& bid_stats, MarketStats& ask_stats,
                             double balancing_estimate, const MdplcpbsConfig& cfg,
                             SplitMix64& rng) {
  std::array<double, kNumStates + 1> anchor{};
  anchor.fill(balancing_estimate);
  return mdplcpbs_step(energy_req, bid_stats, ask_stats, anchor, cfg, rng);
}

}  // namespace pda
