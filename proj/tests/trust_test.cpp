#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "iiot/errors.hpp"
#include "iiot/trust.hpp"

namespace iiot {
namespace {

DeviceStats counters(std::uint64_t wrong, std::uint64_t interactions) {
  DeviceStats s;
  s.wrong_info_count = wrong;
  s.interactions = interactions;
  return s;
}

// compute_energy

TEST(Energy, SumOfSquares) {
  const std::vector<double> a{3.0, 4.0};
  EXPECT_DOUBLE_EQ(compute_energy(a), 25.0);
  EXPECT_DOUBLE_EQ(compute_energy(std::vector<double>{}), 0.0);
  EXPECT_DOUBLE_EQ(compute_energy(std::vector<double>{1.0, 1.0, 1.0}), 3.0);
  EXPECT_DOUBLE_EQ(compute_energy(std::vector<double>{-2.0}), 4.0);
}

TEST(Energy, NonFiniteSampleRejected) {
  const std::vector<double> nan{1.0, std::numeric_limits<double>::quiet_NaN()};
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  EXPECT_THROW(compute_energy(nan), DomainError);
  EXPECT_THROW(compute_energy(inf), DomainError);
}

TEST(Energy, NonNegativeMonotonePermutationInvariant) {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(1 + rng.index(20));
    for (auto& x : xs) x = rng.uniform(-5.0, 5.0);
    const double e = compute_energy(xs);
    ASSERT_GE(e, 0.0);

    auto ys = xs;
    ys.push_back(rng.uniform(-5.0, 5.0));
    ASSERT_GE(compute_energy(ys), e);

    // squares of integers sum exactly, so any order gives the same value
    std::vector<double> ints(xs.size());
    for (auto& v : ints) v = static_cast<double>(rng.index(100)) - 50.0;
    const double ref = compute_energy(ints);
    std::sort(ints.begin(), ints.end());
    do {
      ASSERT_EQ(compute_energy(ints), ref);
    } while (ints.size() <= 6 && std::next_permutation(ints.begin(), ints.end()));
    std::reverse(ints.begin(), ints.end());
    ASSERT_EQ(compute_energy(ints), ref);
  }
}

// classify_presence

TEST(Presence, ThresholdInclusive) {
  EXPECT_EQ(classify_presence(3.0, 2.0), Presence::Present);
  EXPECT_EQ(classify_presence(1.0, 2.0), Presence::Absent);
  EXPECT_EQ(classify_presence(2.0, 2.0), Presence::Present);
}

TEST(Presence, MatchesComparisonEverywhere) {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double e = rng.uniform(0.0, 10.0);
    const double g = rng.uniform(0.0, 10.0);
    ASSERT_EQ(classify_presence(e, g) == Presence::Present, e >= g);
  }
}

TEST(Presence, DefaultGammaIsHalfTheMean) {
  const std::vector<double> e{2.0, 4.0, 6.0};
  EXPECT_DOUBLE_EQ(presence_threshold(e), 2.0);
  EXPECT_DOUBLE_EQ(presence_threshold(e, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(presence_threshold(std::vector<double>{}), 0.0);
}

// monitoring capability

TEST(MonitoringCapability, ExtremesAndMidpoint) {
  DeviceStats lo;
  lo.pdr = 0.2;
  lo.energy = 1.0;
  lo.activeness = 10.0;
  DeviceStats hi;
  hi.pdr = 1.0;
  hi.energy = 9.0;
  hi.activeness = 50.0;
  DeviceStats mid;
  mid.pdr = 0.6;
  mid.energy = 5.0;
  mid.activeness = 30.0;

  const std::vector<DeviceStats> others{lo, mid};
  EXPECT_DOUBLE_EQ(compute_monitoring_capability(hi, others), 3.0);
  EXPECT_DOUBLE_EQ(compute_monitoring_capability(lo, std::vector<DeviceStats>{hi, mid}), 0.0);
  EXPECT_DOUBLE_EQ(compute_monitoring_capability(mid, std::vector<DeviceStats>{lo, hi}), 1.5);
}

TEST(MonitoringCapability, ConstantComponentNormalizesToOne) {
  DeviceStats a;
  a.pdr = 0.5;
  a.energy = 2.0;
  a.activeness = 1.0;
  DeviceStats b = a;
  b.activeness = 3.0;
  const std::vector<DeviceStats> pop{a, b};
  const auto mc = monitoring_capabilities(pop);
  EXPECT_DOUBLE_EQ(mc[0], 2.0);  // pdr 1 + energy 1 + activeness 0
  EXPECT_DOUBLE_EQ(mc[1], 3.0);
  EXPECT_DOUBLE_EQ(compute_monitoring_capability(a, std::vector<DeviceStats>{}), 3.0);
}

TEST(MonitoringCapability, AlwaysWithinZeroToThree) {
  Rng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<DeviceStats> pop(1 + rng.index(30));
    for (auto& s : pop) {
      s.pdr = rng.uniform();
      s.energy = rng.uniform(0.0, 100.0);
      s.activeness = static_cast<double>(rng.index(80));
    }
    for (double mc : monitoring_capabilities(pop)) {
      ASSERT_GE(mc, 0.0);
      ASSERT_LE(mc, 3.0);
    }
  }
}

TEST(MonitoringCapability, RejectsInvalidStats) {
  DeviceStats bad;
  bad.pdr = 1.5;
  EXPECT_THROW(compute_monitoring_capability(bad, std::vector<DeviceStats>{}), DomainError);
  DeviceStats bad2 = counters(3, 2);
  EXPECT_THROW(check_stats(bad2), DomainError);
}

// classify_health

TEST(Health, Colors) {
  DeviceStats s;
  TrustState untrusted{0.8, false, Role::LID};
  TrustState trusted{0.8, true, Role::LID};
  TrustState md{0.8, true, Role::MD};
  EXPECT_EQ(classify_health(s, untrusted, false), HealthColor::Black);
  EXPECT_EQ(classify_health(s, untrusted, true), HealthColor::Black);
  EXPECT_EQ(classify_health(s, md, false), HealthColor::Black);
  EXPECT_EQ(classify_health(s, trusted, true), HealthColor::Grey);
  EXPECT_EQ(classify_health(s, trusted, false), HealthColor::Green);
}

TEST(Health, BurstThresholdIsFactorTimesMedian) {
  std::vector<DeviceStats> pop(4);
  pop[0].message_rate = 1.0;
  pop[1].message_rate = 1.0;
  pop[2].message_rate = 2.0;
  pop[3].message_rate = 4.0;
  EXPECT_DOUBLE_EQ(burst_threshold(pop, 3.0), 4.5);
  pop.pop_back();
  EXPECT_DOUBLE_EQ(burst_threshold(pop, 3.0), 3.0);
}

// update_misbehavior / evaluate_mc

TEST(Misbehavior, CounterUpdates) {
  auto s = update_misbehavior(counters(0, 0), true);
  EXPECT_EQ(s.wrong_info_count, 1u);
  EXPECT_EQ(s.interactions, 1u);
  s = update_misbehavior(counters(5, 10), false);
  EXPECT_EQ(s.wrong_info_count, 5u);
  EXPECT_EQ(s.interactions, 11u);
  s = update_misbehavior(counters(0, 0), false);
  EXPECT_EQ(s.wrong_info_count, 0u);
  EXPECT_EQ(s.interactions, 1u);
}

TEST(Misbehavior, VerdictUsesStrictRatio) {
  const Thresholds t;
  EXPECT_EQ(evaluate_mc(counters(6, 10), t), McVerdict::Malicious);
  EXPECT_EQ(evaluate_mc(counters(0, 10), t), McVerdict::Legitimate);
  EXPECT_EQ(evaluate_mc(counters(5, 10), t), McVerdict::Legitimate);
  EXPECT_EQ(evaluate_mc(counters(1, 2), t), McVerdict::Legitimate);
  EXPECT_EQ(evaluate_mc(counters(3, 5), t), McVerdict::Malicious);
}

TEST(Misbehavior, VerdictNeedsInteractions) {
  EXPECT_THROW(evaluate_mc(counters(0, 0), Thresholds{}), PreconditionError);
}

// trust factor

TEST(TrustFactor, Examples) {
  const Thresholds t;
  const auto stats = counters(0, 5);
  auto r = compute_trust_factor({0.8, true, Role::LID}, stats, McVerdict::Legitimate, t);
  EXPECT_TRUE(r.tf);
  EXPECT_EQ(r.role, Role::LID);

  r = compute_trust_factor({0.8, true, Role::LID}, stats, McVerdict::Malicious, t);
  EXPECT_FALSE(r.tf);
  EXPECT_EQ(r.role, Role::MD);

  r = compute_trust_factor({0.2, true, Role::LID}, stats, McVerdict::Legitimate, t);
  EXPECT_FALSE(r.tf);
  EXPECT_EQ(r.role, Role::MD);

  r = compute_trust_factor({0.3, true, Role::NID}, stats, McVerdict::Legitimate, t);
  EXPECT_TRUE(r.tf);
  EXPECT_EQ(r.role, Role::NID);
}

TEST(TrustFactor, BeforeGraceIsPrecondition) {
  EXPECT_THROW(compute_trust_factor({0.8, true, Role::NID}, counters(0, 4), McVerdict::Legitimate,
                                    Thresholds{}),
               PreconditionError);
}

TEST(TrustFactor, MaliciousNeverYieldsTrust) {
  Rng rng(23);
  const Thresholds t;
  for (int i = 0; i < 10000; ++i) {
    const TrustState in{rng.uniform(), rng.bernoulli(0.5),
                        static_cast<Role>(rng.index(3))};
    const auto out = compute_trust_factor(in, counters(0, 5 + rng.index(50)), McVerdict::Malicious, t);
    ASSERT_FALSE(out.tf);
    ASSERT_EQ(out.role, Role::MD);
  }
}

TEST(TrustFactor, MdNeverRegainsTrust) {
  const Thresholds t;
  TrustState s{0.8, true, Role::NID};
  s = compute_trust_factor(s, counters(4, 5), McVerdict::Malicious, t);
  ASSERT_EQ(classify_new_device(s, 5, t), NewDeviceClass::MaliciousDevice);
  for (int i = 0; i < 50; ++i) {
    s = adjust_score(s, true, t.score_step);
    s = compute_trust_factor(s, counters(4, 100 + i), McVerdict::Legitimate, t);
    ASSERT_FALSE(s.tf);
  }
  EXPECT_DOUBLE_EQ(s.score, 1.0);
}

TEST(TrustScore, StepsAndClamps) {
  TrustState s{0.5, true, Role::LID};
  s = adjust_score(s, true, 0.05);
  EXPECT_NEAR(s.score, 0.55, 1e-15);
  s = adjust_score(s, false, 0.05);
  s = adjust_score(s, false, 0.05);
  EXPECT_NEAR(s.score, 0.45, 1e-15);
  EXPECT_DOUBLE_EQ(adjust_score({0.98, true, Role::LID}, true, 0.05).score, 1.0);
  EXPECT_DOUBLE_EQ(adjust_score({0.01, true, Role::LID}, false, 0.05).score, 0.0);
}

// device classification

TEST(Classification, ExistingDevice) {
  EXPECT_EQ(classify_existing_device(50, 10, true), Role::LID);
  EXPECT_EQ(classify_existing_device(5, 10, false), Role::MD);
  EXPECT_EQ(classify_existing_device(10, 10, true), Role::MD);
  EXPECT_EQ(classify_existing_device(50, 10, false), Role::MD);
}

TEST(Classification, NewDevice) {
  const Thresholds t;
  EXPECT_EQ(classify_new_device({0.8, true, Role::NID}, 5, t), NewDeviceClass::LegitimateID);
  EXPECT_EQ(classify_new_device({0.8, false, Role::MD}, 5, t), NewDeviceClass::MaliciousDevice);
  EXPECT_THROW(classify_new_device({0.8, true, Role::NID}, 4, t), PreconditionError);
}

// init_trust

TEST(InitTrust, RangeAndDeterminism) {
  Rng a(42), b(42);
  const auto ta = init_trust(a);
  const auto tb = init_trust(b);
  EXPECT_EQ(ta, tb);
  EXPECT_TRUE(ta.tf);
  EXPECT_EQ(ta.role, Role::NID);

  Rng rng(42);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double s = init_trust(rng).score;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  EXPECT_GE(lo, kInitialTrustMin);
  EXPECT_LE(hi, kInitialTrustMax);
  EXPECT_LT(lo, 0.71);
  EXPECT_GT(hi, 0.94);
}

TEST(InitTrust, AnySeedInRange) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const double s = init_trust(rng).score;
    ASSERT_GE(s, kInitialTrustMin);
    ASSERT_LE(s, kInitialTrustMax);
  }
}

TEST(Thresholds, Validation) {
  EXPECT_NO_THROW(check_thresholds(Thresholds{}));
  Thresholds t;
  t.trust_threshold = 0.8;
  EXPECT_THROW(check_thresholds(t), DomainError);
  t = {};
  t.grace_transmissions = 0;
  EXPECT_THROW(check_thresholds(t), DomainError);
  t = {};
  t.count_threshold_fraction = 0.0;
  EXPECT_THROW(check_thresholds(t), DomainError);
}

}  // namespace
}  // namespace iiot
