#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "pda/market_stats.hpp"

namespace pda {

// An order as a strategy emits it: PowerTAC-signed quantity (negative buys,
// positive sells) with a natural positive limit price. The signed convention
// stays in this adapter layer; the auction core sees side + positive size.
struct OrderRequest {
  int state{0};
  double quantity{0.0};
  double limit_price{0.0};
  bool dummy{false};
};

struct StrategyDecision {
  std::vector<OrderRequest> orders;  // at most one real order per state
  std::vector<OrderRequest> probes;
};

// Outcome of one of the broker's own orders after the auction cleared.
struct OwnOrderOutcome {
  int state{0};
  double limit_price{0.0};
  double quantity{0.0};  // signed, as submitted
  double filled{0.0};    // MWh, unsigned
  bool dummy{false};
};

struct AnonymousOrder {
  double quantity{0.0};
  double price{0.0};
};

// Everything a broker legally sees from one timeslot: public per-auction
// clearing info plus its own fills. No other broker's identity or fills.
struct BrokerView {
  std::int64_t timeslot{0};
  std::array<std::optional<double>, kNumStates + 1> clearing_price{};
  std::array<double, kNumStates + 1> cleared_volume{};
  std::array<std::vector<AnonymousOrder>, kNumStates + 1> residual_bids{};
  std::array<std::vector<AnonymousOrder>, kNumStates + 1> residual_asks{};
  std::vector<OwnOrderOutcome> own_orders;
  std::optional<double> balancing_price;  // observed at a delivery this slot
  double balancing_charges_to_date{0.0};
};

struct StrategyContext {
  std::int64_t timeslot{0};
  // energy_req[s]: signed requirement for delivery slot timeslot + s
  std::array<double, kNumStates + 1> energy_req{};
  std::uint64_t rng_seed{0};
};

}  // namespace pda
