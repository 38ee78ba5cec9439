#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace pda {

using OrderId = std::uint64_t;

// Quantities below this are treated as fully executed (MWh; far below the
// 0.01 MWh minimum order).
inline constexpr double kQuantityEps = 1e-9;

// k-double-auction price weight: CP = k * bid + (1 - k) * ask. Only the
// average rule (k = 0.5) is implemented; the constant documents the family.
inline constexpr double kClearingPriceWeight = 0.5;

enum class Side : std::uint8_t { Buy, Sell };

inline Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

struct Order {
  OrderId id{0};
  std::uint32_t owner{0};
  Side side{Side::Buy};
  double quantity{0.0};  // MWh, strictly positive
  double price{0.0};     // currency/MWh, any finite real
  std::uint64_t seq{0};  // submission counter, breaks price ties
};

struct OrderBook {
  std::vector<Order> bids;
  std::vector<Order> asks;

  void push(const Order& o) { (o.side == Side::Buy ? bids : asks).push_back(o); }

  std::uint64_t max_seq() const {
    std::uint64_t m = 0;
    for (const auto& o : bids) m = o.seq > m ? o.seq : m;
    for (const auto& o : asks) m = o.seq > m ? o.seq : m;
    return m;
  }

  OrderId max_id() const {
    OrderId m = 0;
    for (const auto& o : bids) m = o.id > m ? o.id : m;
    for (const auto& o : asks) m = o.id > m ? o.id : m;
    return m;
  }
};

struct Trade {
  OrderId bid_id{0};
  OrderId ask_id{0};
  double quantity{0.0};
  double price{0.0};  // the uniform clearing price
};

struct ClearingResult {
  std::optional<double> clearing_price;  // absent when no cross
  std::vector<Trade> trades;
  std::optional<OrderId> lcb;  // last clearing bid
  std::optional<OrderId> lca;  // last clearing ask
  double q_b{0.0};             // residual MWh of the LCB
  double q_a{0.0};             // residual MWh of the LCA
  double total_cleared{0.0};

  void reset() {
    clearing_price.reset();
    trades.clear();
    lcb.reset();
    lca.reset();
    q_b = q_a = total_cleared = 0.0;
  }

  // Quantity filled for a given order id (either side).
  double filled_for(OrderId id) const {
    double q = 0.0;
    for (const auto& t : trades)
      if (t.bid_id == id || t.ask_id == id) q += t.quantity;
    return q;
  }
};

}  // namespace pda
