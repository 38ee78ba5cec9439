#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "pda/order.hpp"

namespace pda {

// No tick-grid price achieves a full fill.
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Reusable buffers for the hot clearing path (Monte-Carlo evaluation clears
// millions of tiny books).
struct ClearScratch {
  std::vector<const Order*> bids;
  std::vector<const Order*> asks;
};

// Uniform-price clearing under the average clearing price rule: bids sorted
// by price descending, asks ascending (price-time priority on ties), marginal
// units matched greedily while the marginal bid price >= marginal ask price
// (ties match), every executed unit trades at
//   CP = (price of last executed bid + price of last executed ask) / 2.
inline void clear_acpr(const OrderBook& book, ClearScratch& scratch, ClearingResult& out) {
  out.reset();
  auto& bids = scratch.bids;
  auto& asks = scratch.asks;
  bids.clear();
  asks.clear();
  for (const auto& o : book.bids) bids.push_back(&o);
  for (const auto& o : book.asks) asks.push_back(&o);
  if (bids.empty() || asks.empty()) return;

  std::sort(bids.begin(), bids.end(), [](const Order* a, const Order* b) {
    return a->price != b->price ? a->price > b->price : a->seq < b->seq;
  });
  std::sort(asks.begin(), asks.end(), [](const Order* a, const Order* b) {
    return a->price != b->price ? a->price < b->price : a->seq < b->seq;
  });

  std::size_t i = 0, j = 0;
  double rem_bid = bids[0]->quantity;
  double rem_ask = asks[0]->quantity;
  const Order* lcb = nullptr;
  const Order* lca = nullptr;
  double lcb_rem = 0.0, lca_rem = 0.0;

  while (i < bids.size() && j < asks.size() && bids[i]->price >= asks[j]->price) {
    const double q = std::min(rem_bid, rem_ask);
    out.trades.push_back(Trade{bids[i]->id, asks[j]->id, q, 0.0});
    out.total_cleared += q;
    rem_bid -= q;
    rem_ask -= q;
    lcb = bids[i];
    lca = asks[j];
    lcb_rem = rem_bid;
    lca_rem = rem_ask;
    if (rem_bid <= kQuantityEps) {
      if (++i < bids.size()) rem_bid = bids[i]->quantity;
    }
    if (rem_ask <= kQuantityEps) {
      if (++j < asks.size()) rem_ask = asks[j]->quantity;
    }
  }

  if (out.trades.empty()) return;
  const double cp = kClearingPriceWeight * lcb->price + (1.0 - kClearingPriceWeight) * lca->price;
  out.clearing_price = cp;
  for (auto& t : out.trades) t.price = cp;
  out.lcb = lcb->id;
  out.lca = lca->id;
  out.q_b = lcb_rem <= kQuantityEps ? 0.0 : lcb_rem;
  out.q_a = lca_rem <= kQuantityEps ? 0.0 : lca_rem;
}

inline ClearingResult clear_acpr(const OrderBook& book) {
  ClearScratch scratch;
  ClearingResult out;
  clear_acpr(book, scratch, out);
  return out;
}

// What-if clearing of book + order; the input book is not mutated. The new
// order is sequenced after everything already present.
inline ClearingResult insert_and_clear(const OrderBook& book, Order order) {
  OrderBook copy = book;
  if (order.id == 0 || order.id <= copy.max_id()) order.id = copy.max_id() + 1;
  order.seq = copy.max_seq() + 1;
  copy.push(order);
  return clear_acpr(copy);
}

namespace detail {

inline double fill_at_price(const OrderBook& others, Side side, double quantity, double price) {
  Order probe;
  probe.id = others.max_id() + 1;
  probe.owner = 0xFFFFFFFFu;
  probe.side = side;
  probe.quantity = quantity;
  probe.price = price;
  const ClearingResult res = insert_and_clear(others, probe);
  double filled = 0.0;
  for (const auto& t : res.trades)
    if ((side == Side::Buy ? t.bid_id : t.ask_id) == probe.id) filled += t.quantity;
  return filled;
}

}  // namespace detail

// Complete-information best response: the lowest tick-grid price (highest for
// Sell) at which inserting (quantity, price) into the book fills the full
// quantity. Filled quantity is monotone in own price aggressiveness, so a
// binary search over the grid matches the exhaustive scan.
inline double best_response_price(const OrderBook& others, Side side, double quantity,
                                  double tick) {
  if (quantity <= 0.0) throw std::invalid_argument("best_response_price: quantity must be > 0");
  if (tick <= 0.0) throw std::invalid_argument("best_response_price: tick must be > 0");
  const auto& opp = side == Side::Buy ? others.asks : others.bids;
  if (opp.empty()) throw InfeasibleError("no opposite-side volume");

  double lo_price = std::numeric_limits<double>::infinity();
  double hi_price = -std::numeric_limits<double>::infinity();
  for (const auto& o : others.bids) {
    lo_price = std::min(lo_price, o.price);
    hi_price = std::max(hi_price, o.price);
  }
  for (const auto& o : others.asks) {
    lo_price = std::min(lo_price, o.price);
    hi_price = std::max(hi_price, o.price);
  }

  const auto grid = [tick](long long k) { return static_cast<double>(k) * tick; };
  long long k_lo = static_cast<long long>(std::floor(lo_price / tick)) - 1;
  long long k_hi = static_cast<long long>(std::ceil(hi_price / tick)) + 1;

  const auto full = [&](long long k) {
    return detail::fill_at_price(others, side, quantity, grid(k)) >= quantity - kQuantityEps;
  };

  if (side == Side::Buy) {
    if (!full(k_hi)) throw InfeasibleError("no full fill at any price");
    // smallest k with a full fill
    while (k_lo < k_hi) {
      const long long mid = k_lo + (k_hi - k_lo) / 2;
      if (full(mid))
        k_hi = mid;
      else
        k_lo = mid + 1;
    }
    return grid(k_hi);
  }
  if (!full(k_lo)) throw InfeasibleError("no full fill at any price");
  // largest k with a full fill
  while (k_lo < k_hi) {
    const long long mid = k_lo + (k_hi - k_lo + 1) / 2;
    if (full(mid))
      k_lo = mid;
    else
      k_hi = mid - 1;
  }
  return grid(k_lo);
}

}  // namespace pda
