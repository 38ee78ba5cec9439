#include <gtest/gtest.h>

#include <sstream>

#include "pda/market_stats.hpp"
#include "pda/mdp_bidding.hpp"
#include "pda/rng.hpp"

namespace pda {
namespace {

TEST(PCleared, RatioOfClearedAmounts) {
  MarketStats stats;
  stats.record(1, 10.0, 5.0);
  stats.record(1, 20.0, 5.0);
  EXPECT_DOUBLE_EQ(p_cleared(stats, 1, 15.0).value(), 0.5);
  EXPECT_DOUBLE_EQ(p_cleared(stats, 1, 5.0).value(), 0.0);
  EXPECT_DOUBLE_EQ(p_cleared(stats, 1, 25.0).value(), 1.0);
}

TEST(PCleared, StrictInequality) {
  MarketStats stats;
  stats.record(3, 10.0, 2.0);
  EXPECT_DOUBLE_EQ(p_cleared(stats, 3, 10.0).value(), 0.0);
  EXPECT_DOUBLE_EQ(p_cleared(stats, 3, 10.0 + 1e-9).value(), 1.0);
}

TEST(PCleared, NoDataOnEmptyHistory) {
  MarketStats stats;
  EXPECT_FALSE(p_cleared(stats, 1, 10.0).has_value());
  stats.record(2, 10.0, 0.0);  // zero cleared amount carries no evidence
  EXPECT_FALSE(p_cleared(stats, 2, 15.0).has_value());
}

TEST(PCleared, MonotoneInLimitPrice) {
  SplitMix64 rng(191);
  MarketStats stats;
  for (int i = 0; i < 60; ++i)
    stats.record(1 + static_cast<int>(rng.next() % 24), rng.uniform(1.0, 100.0),
                 rng.uniform(0.1, 50.0));
  for (int s = 1; s <= 24; ++s) {
    if (stats.count(s) == 0) continue;
    double prev = 0.0;
    for (double p = 0.0; p <= 110.0; p += 1.3) {
      const double cur = p_cleared(stats, s, p).value();
      EXPECT_GE(cur, prev - 1e-15);
      EXPECT_GE(cur, 0.0);
      EXPECT_LE(cur, 1.0);
      prev = cur;
    }
    EXPECT_DOUBLE_EQ(prev, 1.0);
  }
}

TEST(PCleared, PreparedPathAgreesWithScan) {
  SplitMix64 rng(192);
  MarketStats stats;
  for (int i = 0; i < 200; ++i)
    stats.record(1 + static_cast<int>(rng.next() % 24), rng.uniform(1.0, 100.0),
                 rng.uniform(0.0, 10.0));
  const PreparedStats prepared = PreparedStats::build(stats);
  for (int s = 1; s <= 24; ++s)
    for (double p = -5.0; p <= 110.0; p += 0.7) {
      const auto a = p_cleared(stats, s, p);
      const auto b = prepared.p_cleared(s, p);
      ASSERT_EQ(a.has_value(), b.has_value());
      if (a) EXPECT_NEAR(*a, *b, 1e-12);
    }
}

TEST(EstimateBalancingPrice, MeanAndPrior) {
  MarketStats stats(24, 90.0);
  EXPECT_DOUBLE_EQ(estimate_balancing_price(stats), 90.0);
  stats.record_balancing(100.0);
  EXPECT_DOUBLE_EQ(estimate_balancing_price(stats), 100.0);
  stats.record_balancing(80.0);
  stats.record_balancing(120.0);
  EXPECT_DOUBLE_EQ(estimate_balancing_price(stats), 100.0);
}

TEST(MarketStats, ReadinessThreshold) {
  MarketStats stats(3, 90.0);
  EXPECT_FALSE(stats.ready(5));
  stats.record(5, 10.0, 1.0);
  stats.record(5, 11.0, 1.0);
  EXPECT_FALSE(stats.ready(5));
  stats.record(5, 12.0, 1.0);
  EXPECT_TRUE(stats.ready(5));
}

TEST(MarketStats, RejectsBadInput) {
  MarketStats stats;
  EXPECT_THROW(stats.record(0, 1.0, 1.0), std::out_of_range);
  EXPECT_THROW(stats.record(25, 1.0, 1.0), std::out_of_range);
  EXPECT_THROW(stats.record(1, 1.0, -1.0), std::invalid_argument);
}

TEST(MarketStats, SaveLoadRoundTrip) {
  SplitMix64 rng(3333);
  MarketStats stats;
  for (int i = 0; i < 100; ++i)
    stats.record(1 + static_cast<int>(rng.next() % 24),
                 std::round(rng.uniform(1.0, 99.0) * 64.0) / 64.0,
                 std::round(rng.uniform(0.0, 50.0) * 64.0) / 64.0);
  std::stringstream ss;
  stats.save(ss);
  const MarketStats loaded = MarketStats::load(ss);
  for (int s = 1; s <= 24; ++s) {
    ASSERT_EQ(loaded.count(s), stats.count(s));
    for (int i = 0; i < stats.count(s); ++i) {
      EXPECT_DOUBLE_EQ(loaded.observations(s)[i].lcp, stats.observations(s)[i].lcp);
      EXPECT_DOUBLE_EQ(loaded.observations(s)[i].cleared, stats.observations(s)[i].cleared);
    }
  }
}

}  // namespace
}  // namespace pda
