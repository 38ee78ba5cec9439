#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "pda/clearing.hpp"
#include "pda/equilibrium.hpp"
#include "pda/order.hpp"
#include "pda/rng.hpp"

namespace pda {

struct McEstimate {
  double mean{0.0};
  double std_error{0.0};
};

namespace detail {

// Single-unit ACPR auction drawn with the sample's own counter stream. Buyer
// utility is credited only when buyer 1's own bid executes.
inline double mc_utility_sample(const UniformBounds& b, double alpha_b1, double alpha_b2,
                                double alpha_s, Role role, Setting setting, std::uint64_t seed,
                                std::uint64_t index, OrderBook& book, ClearScratch& scratch,
                                ClearingResult& res) {
  SplitMix64 rng = counter_stream(seed, index);
  const double theta_b1 = rng.uniform(b.l_b, b.h_b);
  const double theta_b2 = setting == Setting::Tbos ? rng.uniform(b.l_b, b.h_b) : 0.0;
  const double theta_s = rng.uniform(b.l_s, b.h_s);

  book.bids.clear();
  book.asks.clear();
  book.bids.push_back(Order{1, 1, Side::Buy, 1.0, alpha_b1 * theta_b1, 1});
  if (setting == Setting::Tbos)
    book.bids.push_back(Order{2, 2, Side::Buy, 1.0, alpha_b2 * theta_b2, 2});
  book.asks.push_back(Order{3, 3, Side::Sell, 1.0, alpha_s * theta_s, 3});

  clear_acpr(book, scratch, res);
  if (!res.clearing_price) return 0.0;
  const double cp = *res.clearing_price;
  if (role == Role::Buyer) {
    for (const auto& t : res.trades)
      if (t.bid_id == 1) return theta_b1 - cp;
    return 0.0;
  }
  return cp - theta_s;  // the single ask traded whenever anything cleared
}

inline McEstimate mc_expected_utility(const UniformBounds& b, double alpha_b1, double alpha_b2,
                                      double alpha_s, Role role, Setting setting,
                                      std::uint64_t n_samples, std::uint64_t seed) {
  if (n_samples == 0) throw std::invalid_argument("expected_utility_mc: n_samples must be >= 1");
  OrderBook book;
  ClearScratch scratch;
  ClearingResult res;
  double sum = 0.0, sum_sq = 0.0;
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    const double u =
        mc_utility_sample(b, alpha_b1, alpha_b2, alpha_s, role, setting, seed, i, book, scratch, res);
    sum += u;
    sum_sq += u * u;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return McEstimate{mean, std::sqrt(var / n)};
}

}  // namespace detail

// Monte-Carlo expected utility of the role player under a scale profile,
// with the auction cleared by clear_acpr. Reproducible for a given
// (seed, n_samples); sample #i draws from its own counter stream.
inline McEstimate expected_utility_mc(const UniformBounds& b, const ScaleProfile& p, Role role,
                                      Setting setting, std::uint64_t n_samples,
                                      std::uint64_t seed) {
  return detail::mc_expected_utility(b, p.alpha_b, p.alpha_b, p.alpha_s, role, setting, n_samples,
                                     seed);
}

struct GridSpec {
  double lo{0.05};
  double hi{2.0};
  double step{0.01};
};

// Grid argmax of expected_utility_mc for the role player's scale factor, the
// opponents pinned at `opponent` (alpha_b = opposing buyer(s), alpha_s =
// seller). Common random numbers: every grid point reuses the same seed, so
// all points see identical type draws.
inline double best_response_scale(const UniformBounds& b, const ScaleProfile& opponent, Role role,
                                  Setting setting, const GridSpec& grid, std::uint64_t n_samples,
                                  std::uint64_t seed) {
  if (grid.step <= 0.0 || grid.hi < grid.lo)
    throw std::invalid_argument("best_response_scale: empty grid");
  double best_alpha = grid.lo;
  double best_value = -std::numeric_limits<double>::infinity();
  const long long n_points = static_cast<long long>(std::floor((grid.hi - grid.lo) / grid.step + 0.5)) + 1;
  for (long long k = 0; k < n_points; ++k) {
    const double alpha = grid.lo + static_cast<double>(k) * grid.step;
    McEstimate est;
    if (role == Role::Buyer) {
      est = detail::mc_expected_utility(b, alpha, opponent.alpha_b, opponent.alpha_s, role,
                                        setting, n_samples, seed);
    } else {
      est = detail::mc_expected_utility(b, opponent.alpha_b, opponent.alpha_b, alpha, role,
                                        setting, n_samples, seed);
    }
    if (est.mean > best_value) {
      best_value = est.mean;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace pda
