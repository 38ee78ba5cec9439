#pragma once

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pda {

inline constexpr int kNumStates = 24;  // bidding opportunities count down 24 -> 1

// One per-auction data point: the estimated last clearing price and the
// auction's public cleared amount.
struct LcpObservation {
  double lcp{0.0};
  double cleared{0.0};
};

// Past-auction statistics for one side of the market (a broker keeps separate
// bid-side and ask-side instances).
class MarketStats {
 public:
  explicit MarketStats(int min_points = 24, double balancing_prior = 90.0)
      : min_points_(min_points), balancing_prior_(balancing_prior) {}

  void record(int state, double lcp, double cleared) {
    check_state(state);
    if (cleared < 0.0) throw std::invalid_argument("MarketStats: cleared must be >= 0");
    per_state_[state].push_back(LcpObservation{lcp, cleared});
  }

  void record_balancing(double price) { balancing_prices_.push_back(price); }

  const std::vector<LcpObservation>& observations(int state) const {
    check_state(state);
    return per_state_[state];
  }

  int count(int state) const {
    check_state(state);
    return static_cast<int>(per_state_[state].size());
  }

  double total_cleared(int state) const {
    check_state(state);
    double sum = 0.0;
    for (const auto& o : per_state_[state]) sum += o.cleared;
    return sum;
  }

  bool ready(int state) const { return count(state) >= min_points_; }

  int min_points() const { return min_points_; }
  double balancing_prior() const { return balancing_prior_; }
  const std::vector<double>& balancing_prices() const { return balancing_prices_; }

  // Line-oriented snapshot: "state lcp cleared_amount" per observation.
  void save(std::ostream& os) const {
    const auto prec = os.precision(17);
    for (int s = 1; s <= kNumStates; ++s)
      for (const auto& o : per_state_[s]) os << s << ' ' << o.lcp << ' ' << o.cleared << '\n';
    os.precision(prec);
  }

  static MarketStats load(std::istream& is, int min_points = 24, double prior = 90.0) {
    MarketStats stats(min_points, prior);
    int s = 0;
    double lcp = 0.0, cleared = 0.0;
    while (is >> s >> lcp >> cleared) stats.record(s, lcp, cleared);
    return stats;
  }

 private:
  static void check_state(int state) {
    if (state < 1 || state > kNumStates) throw std::out_of_range("MarketStats: state not in 1..24");
  }

  std::array<std::vector<LcpObservation>, kNumStates + 1> per_state_{};
  std::vector<double> balancing_prices_;
  int min_points_;
  double balancing_prior_;
};

// Empirical clearing probability: share of cleared amount recorded strictly
// below the limit price. Empty when state s has no cleared amount at all
// (NoData; the caller falls back).
inline std::optional<double> p_cleared(const MarketStats& stats, int state, double limit_price) {
  double below = 0.0, total = 0.0;
  for (const auto& o : stats.observations(state)) {
    total += o.cleared;
    if (o.lcp < limit_price) below += o.cleared;
  }
  if (total <= 0.0) return std::nullopt;
  return below / total;
}

// Mean of observed balancing prices; the configured prior before the first
// observation.
inline double estimate_balancing_price(const MarketStats& stats) {
  const auto& prices = stats.balancing_prices();
  if (prices.empty()) return stats.balancing_prior();
  double sum = 0.0;
  for (double p : prices) sum += p;
  return sum / static_cast<double>(prices.size());
}

}  // namespace pda
