#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pda/clearing.hpp"
#include "pda/market_view.hpp"
#include "pda/strategies.hpp"

namespace pda {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GencoConfig {
  bool enabled{true};
  double capacity{5000.0};   // MWh offered per delivery slot
  double base_cost{50.0};    // currency/MWh at the earliest auction
  double noise_std{2.0};
  double markup_per_state{0.005};  // asks get dearer as delivery approaches
  double late_premium{0.0};   // extra markup on every auction after the first
  double first_tranche{1.0};  // share of capacity offered in the first auction
};

struct MisoConfig {
  bool enabled{true};
  double price_floor{1.0};
  double quantity{20.0};  // MWh bid per auction
};

struct DemandConfig {
  enum class Model : std::uint8_t { Sinusoidal, File };
  Model model{Model::Sinusoidal};
  double mean{800.0};
  double amplitude{200.0};
  double noise_std{40.0};
  std::vector<double> file_values;  // used when model == File
};

struct BrokerParams {
  bool seller{false};  // seller brokers hold +demand (energy to sell)
  double fixed_alpha{1.0};
  double theta_lo{40.0};
  double theta_hi{80.0};
  bool validation_mode{false};
  MdplcpbsConfig mdp{};
  double balancing_prior{90.0};
};

struct BrokerConfig {
  std::string name;
  std::string strategy;  // zi | zip | tactex | fixed_scale | mdplcpbs
  BrokerParams params{};
};

struct SimConfig {
  std::int64_t horizon_timeslots{168};
  std::vector<BrokerConfig> brokers;
  GencoConfig genco{};
  MisoConfig miso{};
  double balancing_price{90.0};
  bool balancing_dynamic{false};  // 1.5x trailing mean clearing price
  DemandConfig demand{};
  double demand_fraction{1.0};
  std::uint64_t seed{1};

  void validate() const {
    if (horizon_timeslots < 25) throw ConfigError("horizon_timeslots must be >= 25");
    if (demand_fraction <= 0.0 || demand_fraction > 1.0)
      throw ConfigError("demand_fraction must be in (0, 1]");
    if (genco.enabled && genco.capacity <= 0.0) throw ConfigError("genco capacity must be > 0");
    if (brokers.empty()) throw ConfigError("at least one broker required");
    for (const auto& b : brokers) {
      if (b.strategy != "zi" && b.strategy != "zip" && b.strategy != "tactex" &&
          b.strategy != "fixed_scale" && b.strategy != "mdplcpbs")
        throw ConfigError("unknown strategy: " + b.strategy);
    }
  }
};

// Per-auction ground-truth log row. LCB/LCA prices are result-log data only,
// never shown to strategies.
struct AuctionRecord {
  std::int64_t timeslot{0};
  int state{0};
  std::optional<double> cp;
  double volume{0.0};
  double lcb_price{0.0};
  double lca_price{0.0};
};

struct BrokerResult {
  std::string name;
  std::string strategy;
  double market_cost{0.0};     // payments minus sales revenue
  double balancing_cost{0.0};
  double net_cost{0.0};
  double dummy_cost{0.0};
  double dummy_volume_signed{0.0};
  std::array<double, kNumStates + 1> cleared_by_state{};  // own real fills, MWh
  std::vector<double> fills_by_slot;                      // signed, per delivery slot
  std::vector<LcpEstimateRecord> lcp_log;
  std::vector<ScaleSample> scale_log;
};

struct GameResult {
  std::uint64_t seed{0};
  std::vector<BrokerResult> brokers;
  std::vector<AuctionRecord> auctions;
  std::vector<double> demand;  // physical MWh per delivery slot
};

inline std::unique_ptr<Strategy> make_strategy(const BrokerConfig& cfg, std::uint64_t seed) {
  const auto& p = cfg.params;
  MdplcpbsConfig mdp = p.mdp;
  if (cfg.strategy == "zi") return std::make_unique<ZiStrategy>(mdp, seed);
  if (cfg.strategy == "zip") return std::make_unique<ZipStrategy>(mdp, seed);
  if (cfg.strategy == "tactex") return std::make_unique<TactexStrategy>(mdp, seed);
  if (cfg.strategy == "fixed_scale")
    return std::make_unique<FixedScaleStrategy>(p.fixed_alpha, p.theta_lo, p.theta_hi, seed);
  if (cfg.strategy == "mdplcpbs") {
    MdplcpbsStrategyConfig mc;
    mc.mdp = mdp;
    mc.validation_mode = p.validation_mode;
    mc.theta_lo = p.theta_lo;
    mc.theta_hi = p.theta_hi;
    mc.balancing_prior = p.balancing_prior;
    return std::make_unique<MdplcpbsStrategy>(mc, seed);
  }
  throw ConfigError("unknown strategy: " + cfg.strategy);
}

namespace detail {

inline std::vector<double> build_demand(const SimConfig& cfg) {
  std::vector<double> demand(static_cast<std::size_t>(cfg.horizon_timeslots), 0.0);
  if (cfg.demand.model == DemandConfig::Model::File) {
    for (std::int64_t t = 25; t < cfg.horizon_timeslots; ++t) {
      const auto idx = static_cast<std::size_t>(t);
      demand[idx] = idx < cfg.demand.file_values.size() ? cfg.demand.file_values[idx] : 0.0;
    }
    return demand;
  }
  SplitMix64 rng(mix_seed(cfg.seed, 0xd03a));
  std::normal_distribution<double> noise(0.0, cfg.demand.noise_std);
  std::mt19937_64 gauss(mix_seed(cfg.seed, 0xd03b));
  // first 24 delivery slots stay zero: their auction horizons are truncated
  for (std::int64_t t = 25; t < cfg.horizon_timeslots; ++t) {
    const double base = cfg.demand.mean +
                        cfg.demand.amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / 24.0);
    demand[static_cast<std::size_t>(t)] = std::max(0.0, base + noise(gauss));
  }
  return demand;
}

struct SubmittedOrder {
  OrderId id{0};
  std::size_t broker{0};  // index; simulator participants use sentinels
  int state{0};
  double signed_qty{0.0};
  double price{0.0};
  bool dummy{false};
};

}  // namespace detail

// Rolling-horizon wholesale market: each timeslot clears 24 simultaneous
// sealed-bid auctions (one per future delivery slot) with clear_acpr,
// delivers filtered views, and settles imbalances at the balancing price.
inline GameResult run_game(const SimConfig& cfg) {
  cfg.validate();
  constexpr std::size_t kGenco = static_cast<std::size_t>(-1);
  constexpr std::size_t kMiso = static_cast<std::size_t>(-2);

  const std::int64_t horizon = cfg.horizon_timeslots;
  const std::size_t n_brokers = cfg.brokers.size();

  GameResult result;
  result.seed = cfg.seed;
  result.demand = detail::build_demand(cfg);

  std::vector<std::unique_ptr<Strategy>> strategies;
  strategies.reserve(n_brokers);
  for (std::size_t i = 0; i < n_brokers; ++i)
    strategies.push_back(make_strategy(cfg.brokers[i], mix_seed(cfg.seed, 100 + i)));

  // signed net demand per broker per delivery slot (PowerTAC convention:
  // buyers carry negative requirements)
  std::vector<std::vector<double>> net_demand(n_brokers,
                                              std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
  for (std::size_t i = 0; i < n_brokers; ++i) {
    const double sign = cfg.brokers[i].params.seller ? 1.0 : -1.0;
    for (std::int64_t t = 0; t < horizon; ++t)
      net_demand[i][static_cast<std::size_t>(t)] =
          sign * cfg.demand_fraction * result.demand[static_cast<std::size_t>(t)];
  }

  std::vector<std::vector<double>> procured(n_brokers,
                                            std::vector<double>(static_cast<std::size_t>(horizon), 0.0));
  std::vector<BrokerResult> brokers(n_brokers);
  for (std::size_t i = 0; i < n_brokers; ++i) {
    brokers[i].name = cfg.brokers[i].name;
    brokers[i].strategy = cfg.brokers[i].strategy;
    brokers[i].fills_by_slot.assign(static_cast<std::size_t>(horizon), 0.0);
  }

  std::vector<double> genco_remaining(static_cast<std::size_t>(horizon), cfg.genco.capacity);
  std::mt19937_64 genco_rng(mix_seed(cfg.seed, 0x6e0));
  std::normal_distribution<double> genco_noise(0.0, cfg.genco.noise_std);

  std::vector<BrokerView> views(n_brokers);
  std::vector<bool> views_fresh(n_brokers, false);

  double cp_trailing_sum = 0.0;
  std::int64_t cp_trailing_count = 0;

  OrderId next_order_id = 1;
  ClearScratch scratch;
  ClearingResult clearing;

  for (std::int64_t t = 0; t < horizon; ++t) {
    const double balancing_now =
        cfg.balancing_dynamic && cp_trailing_count > 0
            ? 1.5 * cp_trailing_sum / static_cast<double>(cp_trailing_count)
            : cfg.balancing_price;

    // settle delivery slot t (its last auction ran at t-1)
    for (std::size_t i = 0; i < n_brokers; ++i) {
      const auto ts = static_cast<std::size_t>(t);
      const bool had_position = net_demand[i][ts] != 0.0 || procured[i][ts] != 0.0;
      if (!had_position) continue;
      const double imbalance = net_demand[i][ts] - procured[i][ts];
      const double charge = std::abs(imbalance) * balancing_now;
      brokers[i].balancing_cost += charge;
      views[i].balancing_price = balancing_now;
      views[i].balancing_charges_to_date = brokers[i].balancing_cost;
    }

    // deliver last round's filtered views
    for (std::size_t i = 0; i < n_brokers; ++i) {
      if (views_fresh[i] || views[i].balancing_price) {
        strategies[i]->observe(views[i]);
        views_fresh[i] = false;
      }
      views[i] = BrokerView{};
      views[i].timeslot = t;
    }

    // collect decisions
    const OrderId round_first_id = next_order_id;
    std::vector<detail::SubmittedOrder> submitted;
    for (std::size_t i = 0; i < n_brokers; ++i) {
      StrategyContext ctx;
      ctx.timeslot = t;
      ctx.rng_seed = mix_seed(cfg.seed, 500 + i);
      for (int s = 1; s <= kNumStates; ++s) {
        const std::int64_t target = t + s;
        ctx.energy_req[s] = target < horizon
                                ? net_demand[i][static_cast<std::size_t>(target)] -
                                      procured[i][static_cast<std::size_t>(target)]
                                : 0.0;
        if (std::abs(ctx.energy_req[s]) <= kQuantityEps) ctx.energy_req[s] = 0.0;
      }
      StrategyDecision dec = strategies[i]->decide(ctx);
      for (const auto& o : dec.orders)
        if (std::abs(o.quantity) > kQuantityEps)
          submitted.push_back({next_order_id++, i, o.state, o.quantity, o.limit_price, false});
      for (const auto& o : dec.probes)
        if (std::abs(o.quantity) > kQuantityEps)
          submitted.push_back({next_order_id++, i, o.state, o.quantity, o.limit_price, true});
    }

    // run the 24 open auctions independently
    for (int s = 1; s <= kNumStates; ++s) {
      const std::int64_t target = t + s;
      if (target >= horizon) continue;
      OrderBook book;
      std::uint64_t seq = 1;
      for (const auto& o : submitted) {
        if (o.state != s) continue;
        Order ord;
        ord.id = o.id;
        ord.owner = static_cast<std::uint32_t>(o.broker);
        ord.side = o.signed_qty < 0.0 ? Side::Buy : Side::Sell;
        ord.quantity = std::abs(o.signed_qty);
        ord.price = o.price;
        ord.seq = seq++;
        book.push(ord);
      }
      const auto tgt = static_cast<std::size_t>(target);
      if (cfg.genco.enabled && genco_remaining[tgt] > kQuantityEps) {
        Order ord;
        ord.id = next_order_id++;
        ord.owner = 0xFFFFFFF0u;
        ord.side = Side::Sell;
        // part of the capacity may be withheld from the earliest auction
        ord.quantity = s == kNumStates
                           ? std::min(genco_remaining[tgt], cfg.genco.first_tranche * cfg.genco.capacity)
                           : genco_remaining[tgt];
        const double markup = 1.0 + (kNumStates - s) * cfg.genco.markup_per_state +
                              (s == kNumStates ? 0.0 : cfg.genco.late_premium);
        ord.price = std::max(0.1, cfg.genco.base_cost * markup + genco_noise(genco_rng));
        ord.seq = seq++;
        book.push(ord);
        submitted.push_back({ord.id, kGenco, s, ord.quantity, ord.price, false});
      }
      if (cfg.miso.enabled) {
        Order ord;
        ord.id = next_order_id++;
        ord.owner = 0xFFFFFFF1u;
        ord.side = Side::Buy;
        ord.quantity = cfg.miso.quantity;
        ord.price = cfg.miso.price_floor;
        ord.seq = seq++;
        book.push(ord);
        submitted.push_back({ord.id, kMiso, s, -ord.quantity, ord.price, false});
      }

      clear_acpr(book, scratch, clearing);

      AuctionRecord rec;
      rec.timeslot = t;
      rec.state = s;
      rec.cp = clearing.clearing_price;
      rec.volume = clearing.total_cleared;
      if (clearing.lcb && clearing.lca) {
        for (const auto& o : book.bids)
          if (o.id == *clearing.lcb) rec.lcb_price = o.price;
        for (const auto& o : book.asks)
          if (o.id == *clearing.lca) rec.lca_price = o.price;
      }
      result.auctions.push_back(rec);
      if (clearing.clearing_price) {
        cp_trailing_sum += *clearing.clearing_price;
        ++cp_trailing_count;
      }

      // attribute fills (this round's ids start at round_first_id)
      std::vector<double> filled_by_id(static_cast<std::size_t>(next_order_id - round_first_id), 0.0);
      for (const auto& tr : clearing.trades) {
        filled_by_id[static_cast<std::size_t>(tr.bid_id - round_first_id)] += tr.quantity;
        filled_by_id[static_cast<std::size_t>(tr.ask_id - round_first_id)] += tr.quantity;
      }
      const double cp = clearing.clearing_price.value_or(0.0);

      for (const auto& o : submitted) {
        if (o.state != s) continue;
        const double filled = filled_by_id[static_cast<std::size_t>(o.id - round_first_id)];
        if (o.broker == kGenco) {
          if (filled > 0.0) genco_remaining[tgt] -= filled;
          continue;
        }
        if (o.broker == kMiso) continue;

        BrokerResult& br = brokers[o.broker];
        const bool buy = o.signed_qty < 0.0;
        if (filled > 0.0) {
          const double money = filled * cp;
          if (o.dummy) {
            // probes: real money, but their energy never enters the broker's
            // requirement bookkeeping or the delivery position
            br.dummy_cost += buy ? money : -money;
            br.market_cost += buy ? money : -money;
            br.dummy_volume_signed += buy ? -filled : filled;
          } else {
            br.market_cost += buy ? money : -money;
            procured[o.broker][tgt] += buy ? -filled : filled;
            br.fills_by_slot[tgt] += buy ? -filled : filled;
            br.cleared_by_state[s] += filled;
          }
        }
        BrokerView& view = views[o.broker];
        view.own_orders.push_back(OwnOrderOutcome{s, o.price, o.signed_qty, filled, o.dummy});
        views_fresh[o.broker] = true;
      }

      // public information for every broker
      for (std::size_t i = 0; i < n_brokers; ++i) {
        BrokerView& view = views[i];
        view.clearing_price[s] = clearing.clearing_price;
        view.cleared_volume[s] = clearing.total_cleared;
        const auto push_residuals = [&](const std::vector<Order>& side_orders,
                                        std::vector<AnonymousOrder>& out) {
          for (const auto& o : side_orders) {
            double rem = o.quantity;
            for (const auto& tr : clearing.trades)
              if (tr.bid_id == o.id || tr.ask_id == o.id) rem -= tr.quantity;
            if (rem > kQuantityEps) out.push_back(AnonymousOrder{rem, o.price});
          }
        };
        push_residuals(book.bids, view.residual_bids[s]);
        push_residuals(book.asks, view.residual_asks[s]);
        views_fresh[i] = true;
      }
    }
  }

  // final observe so the last round's fills reach the strategies' logs
  for (std::size_t i = 0; i < n_brokers; ++i)
    if (views_fresh[i]) strategies[i]->observe(views[i]);

  for (std::size_t i = 0; i < n_brokers; ++i) {
    brokers[i].net_cost = brokers[i].market_cost + brokers[i].balancing_cost;
    if (const auto* log = strategies[i]->lcp_log()) brokers[i].lcp_log = *log;
    if (const auto* log = strategies[i]->scale_log()) brokers[i].scale_log = *log;
  }
  result.brokers = std::move(brokers);
  return result;
}

}  // namespace pda
