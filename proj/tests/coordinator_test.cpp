#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "iiot/coordinator.hpp"
#include "iiot/errors.hpp"

namespace iiot {
namespace {

ElectionCandidate candidate(std::uint64_t id, double e, double mc, std::uint64_t st) {
  return {DeviceId{id}, e, mc, st};
}

DeviceStats with_energy(double e) {
  DeviceStats s;
  s.energy = e;
  return s;
}

const TrustState kMember{0.9, true, Role::LID};
const TrustState kNewcomer{0.8, true, Role::NID};

// Reference comparator, written independently of elect_cid.
bool better(const ElectionCandidate& a, const ElectionCandidate& b, double sa, double sb) {
  if (sa != sb) return sa > sb;
  if (a.survival_time != b.survival_time) return a.survival_time > b.survival_time;
  return a.id < b.id;
}

// elect_cid

TEST(Election, SurvivalTimeBreaksTie) {
  const std::vector<ElectionCandidate> c{candidate(1, 10, 2, 5), candidate(2, 10, 2, 9)};
  EXPECT_EQ(elect_cid(c), DeviceId{2});
}

TEST(Election, SingleDevice) {
  const std::vector<ElectionCandidate> c{candidate(8, 1, 1, 1)};
  EXPECT_EQ(elect_cid(c), DeviceId{8});
}

TEST(Election, SmallestIdOnFullTie) {
  std::vector<ElectionCandidate> c{candidate(7, 4, 1, 3), candidate(3, 4, 1, 3)};
  EXPECT_EQ(elect_cid(c), DeviceId{3});
  std::reverse(c.begin(), c.end());
  EXPECT_EQ(elect_cid(c), DeviceId{3});
}

TEST(Election, EmptyIsError) {
  EXPECT_THROW(elect_cid(std::vector<ElectionCandidate>{}), ElectionError);
}

TEST(Election, CompositeBeatsSurvivalTime) {
  const std::vector<ElectionCandidate> c{candidate(1, 10, 3, 1), candidate(2, 2, 1, 100)};
  EXPECT_EQ(elect_cid(c), DeviceId{1});
}

TEST(Election, PermutationInvariantAndMatchesBruteForce) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<ElectionCandidate> c(1 + rng.index(6));
    for (std::size_t i = 0; i < c.size(); ++i) {
      // few distinct values so that ties happen
      c[i] = candidate(1 + rng.index(50), static_cast<double>(rng.index(3)),
                       static_cast<double>(rng.index(3)), rng.index(3));
    }
    // ids unique
    std::sort(c.begin(), c.end(), [](auto& a, auto& b) { return a.id < b.id; });
    c.erase(std::unique(c.begin(), c.end(), [](auto& a, auto& b) { return a.id == b.id; }),
            c.end());

    double emin = 1e300, emax = -1e300, mmin = 1e300, mmax = -1e300;
    for (const auto& x : c) {
      emin = std::min(emin, x.energy);
      emax = std::max(emax, x.energy);
      mmin = std::min(mmin, x.monitoring_capability);
      mmax = std::max(mmax, x.monitoring_capability);
    }
    const auto score = [&](const ElectionCandidate& x) {
      const double ne = emax > emin ? (x.energy - emin) / (emax - emin) : 1.0;
      const double nm = mmax > mmin ? (x.monitoring_capability - mmin) / (mmax - mmin) : 1.0;
      return ne + nm;
    };
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (better(c[i], c[best], score(c[i]), score(c[best]))) best = i;
    }
    const DeviceId expected = c[best].id;

    do {
      ASSERT_EQ(elect_cid(c), expected);
    } while (std::next_permutation(c.begin(), c.end(),
                                   [](auto& a, auto& b) { return a.id < b.id; }));
  }
}

TEST(Election, EligibilityRequiresPresence) {
  Thresholds t;
  t.gamma = 5.0;
  const std::vector<DeviceRecord> devices{{DeviceId{1}, with_energy(4.0)},
                                          {DeviceId{2}, with_energy(5.0)},
                                          {DeviceId{3}, with_energy(9.0)}};
  const auto c = eligible_candidates(devices, t);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, DeviceId{2});
  EXPECT_EQ(c[1].id, DeviceId{3});

  t.mc_threshold = 1.5;  // energy is the only varying component: MC = 2 + normalized energy
  const auto strict = eligible_candidates(devices, t);
  ASSERT_EQ(strict.size(), 2u);
  t.mc_threshold = 2.9;
  const auto top = eligible_candidates(devices, t);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].id, DeviceId{3});
}

// registry

TEST(Registry, RegisterAndDuplicate) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, {});
  EXPECT_EQ(r.size(), 1u);
  r.register_device(DeviceId{2}, kNewcomer, {});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_THROW(r.register_device(DeviceId{2}, kMember, {}), RegistrationError);
  EXPECT_EQ(r.size(), 2u);

  const auto& e = r.entry(DeviceId{2});
  EXPECT_EQ(e.cid_id, DeviceId{1});
  EXPECT_EQ(e.device_address, "dev-0002");
  EXPECT_EQ(e.cid_address, "dev-0001");
  EXPECT_EQ(e.admission, Admission::Pending);
  EXPECT_EQ(r.entry(DeviceId{1}).admission, Admission::Admitted);
  EXPECT_THROW(r.entry(DeviceId{9}), LookupError);
}

TEST(Registry, SetCidRewritesEveryRow) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  for (std::uint64_t i = 1; i <= 4; ++i) r.register_device(DeviceId{i}, kMember, {});
  r.set_cid(DeviceId{3});
  for (const auto& [id, e] : r.entries()) {
    EXPECT_EQ(e.cid_id, DeviceId{3});
    EXPECT_EQ(e.cid_address, "dev-0003");
  }
}

TEST(Admission, GracePeriod) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, {});
  r.register_device(DeviceId{2}, kNewcomer, {});
  r.register_device(DeviceId{3}, kNewcomer, {});

  EXPECT_EQ(r.admit_new_device(DeviceId{2}, 3, kNewcomer), Admission::Pending);
  EXPECT_EQ(r.admit_new_device(DeviceId{2}, 5, kNewcomer), Admission::Admitted);
  EXPECT_EQ(r.entry(DeviceId{2}).trust.role, Role::LID);

  const TrustState bad{0.8, false, Role::MD};
  EXPECT_EQ(r.admit_new_device(DeviceId{3}, 5, bad), Admission::Blocked);
  EXPECT_EQ(r.admit_new_device(DeviceId{3}, 6, kNewcomer), Admission::Blocked);
  EXPECT_EQ(r.admit_new_device(DeviceId{3}, 0, kNewcomer), Admission::Blocked);
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(r.process_transmission(DeviceId{3}, false), TransmissionOutcome::Rejected);
  }
  EXPECT_THROW(r.admit_new_device(DeviceId{9}, 5, kNewcomer), LookupError);
}

TEST(Transmission, CleanAndBlocked) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, {});
  r.register_device(DeviceId{2}, {0.9, false, Role::MD}, {});
  EXPECT_EQ(r.process_transmission(DeviceId{1}, false), TransmissionOutcome::Accepted);
  EXPECT_EQ(r.entry(DeviceId{1}).stats.interactions, 1u);
  EXPECT_EQ(r.entry(DeviceId{2}).admission, Admission::Blocked);
  EXPECT_EQ(r.process_transmission(DeviceId{2}, false), TransmissionOutcome::Rejected);
  EXPECT_EQ(r.entry(DeviceId{2}).stats.interactions, 0u);
  EXPECT_THROW(r.process_transmission(DeviceId{7}, false), LookupError);
}

TEST(Transmission, RatioCrossingHandTrace) {
  // clean x4 then wrong: ratios after messages 5..9 are 1/5, 2/6, 3/7, 4/8, 5/9.
  // 4/8 sits on the threshold (legitimate), 5/9 crosses it.
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, {});
  r.register_device(DeviceId{2}, kMember, {});
  const bool wrong[10] = {false, false, false, false, true, true, true, true, true, true};
  for (int m = 0; m < 8; ++m) {
    ASSERT_EQ(r.process_transmission(DeviceId{2}, wrong[m]), TransmissionOutcome::Accepted);
    ASSERT_TRUE(r.entry(DeviceId{2}).tf) << "message " << m + 1;
  }
  EXPECT_EQ(r.process_transmission(DeviceId{2}, wrong[8]), TransmissionOutcome::Accepted);
  EXPECT_FALSE(r.entry(DeviceId{2}).tf);
  EXPECT_EQ(r.entry(DeviceId{2}).trust.role, Role::MD);
  EXPECT_EQ(r.entry(DeviceId{2}).admission, Admission::Blocked);
  EXPECT_NEAR(r.entry(DeviceId{2}).trust.score, 0.75, 1e-12);
  EXPECT_EQ(r.process_transmission(DeviceId{2}, wrong[9]), TransmissionOutcome::Rejected);
  EXPECT_EQ(r.entry(DeviceId{2}).stats.interactions, 9u);
}

TEST(Transmission, LowScoreBlocks) {
  // ratio rule off: only the score can block. 0.70 reaches 0.30 after 8 wrong
  // messages (still trusted) and 0.25 after the 9th.
  Thresholds t;
  t.count_threshold_fraction = 1.0;  // disable the ratio rule
  CoordinatorRegistry r(DeviceId{1}, t);
  r.register_device(DeviceId{1}, kMember, {});
  r.register_device(DeviceId{2}, {0.7, true, Role::LID}, {});
  int sent = 0;
  while (r.process_transmission(DeviceId{2}, true) == TransmissionOutcome::Accepted) ++sent;
  EXPECT_EQ(sent, 9);
  EXPECT_LT(r.entry(DeviceId{2}).trust.score, 0.3);
}

TEST(Transmission, NewcomerAdmittedOrBlockedAtGrace) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, {});
  r.register_device(DeviceId{2}, kNewcomer, {});
  r.register_device(DeviceId{3}, kNewcomer, {});
  for (int m = 0; m < 4; ++m) {
    r.process_transmission(DeviceId{2}, false);
    r.process_transmission(DeviceId{3}, true);
    ASSERT_EQ(r.entry(DeviceId{2}).admission, Admission::Pending);
    ASSERT_EQ(r.entry(DeviceId{3}).admission, Admission::Pending);
  }
  r.process_transmission(DeviceId{2}, false);
  r.process_transmission(DeviceId{3}, true);
  EXPECT_EQ(r.entry(DeviceId{2}).admission, Admission::Admitted);
  EXPECT_EQ(r.entry(DeviceId{3}).admission, Admission::Blocked);
  EXPECT_EQ(r.process_transmission(DeviceId{3}, false), TransmissionOutcome::Rejected);
}

TEST(Transmission, BlockedCidIsReplaced) {
  CoordinatorRegistry r(DeviceId{1}, Thresholds{});
  r.register_device(DeviceId{1}, kMember, with_energy(5.0));
  r.register_device(DeviceId{2}, kMember, with_energy(3.0));
  r.register_device(DeviceId{3}, kMember, with_energy(4.0));
  for (int m = 0; m < 5; ++m) r.process_transmission(DeviceId{1}, true);
  EXPECT_EQ(r.entry(DeviceId{1}).admission, Admission::Blocked);
  EXPECT_EQ(r.elected_cid(), DeviceId{3});
  for (const auto& [id, e] : r.entries()) EXPECT_EQ(e.cid_id, DeviceId{3});
}

TEST(Registry, BlockedIsAbsorbingUnderRandomSequences) {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    CoordinatorRegistry r(DeviceId{1}, Thresholds{});
    for (std::uint64_t i = 1; i <= 6; ++i) {
      r.register_device(DeviceId{i}, i % 2 ? kMember : kNewcomer, with_energy(1.0 + i));
    }
    r.register_device(DeviceId{7}, kMember, with_energy(0.5));  // silent, keeps an election possible
    std::vector<bool> blocked(8, false);
    for (int op = 0; op < 200; ++op) {
      const DeviceId id{1 + rng.index(6)};
      if (rng.bernoulli(0.1)) {
        const TrustState t{0.8, rng.bernoulli(0.8), Role::NID};
        const auto a = r.admit_new_device(id, rng.index(8), t);
        if (blocked[id.value]) ASSERT_EQ(a, Admission::Blocked);
      } else {
        const auto out = r.process_transmission(id, rng.bernoulli(0.4));
        if (blocked[id.value]) ASSERT_EQ(out, TransmissionOutcome::Rejected);
      }
      for (const auto& [eid, e] : r.entries()) {
        if (e.admission == Admission::Blocked) blocked[eid.value] = true;
      }
      ASSERT_NE(r.entry(r.elected_cid()).admission, Admission::Blocked);
      for (const auto& [eid, e] : r.entries()) {
        ASSERT_EQ(eid, e.device_id);
        ASSERT_EQ(e.cid_id, r.elected_cid());
      }
    }
  }
}

// reelect_on_failure

TEST(Reelection, CidFailure) {
  Thresholds t;
  t.gamma = 2.0;
  CoordinatorRegistry r(DeviceId{1}, t);
  std::vector<DeviceRecord> devices{{DeviceId{1}, with_energy(9.0)},
                                    {DeviceId{2}, with_energy(3.0)},
                                    {DeviceId{3}, with_energy(6.0)}};
  for (const auto& d : devices) r.register_device(d.id, kMember, d.stats);

  const CoordinatorRegistry before = r;
  EXPECT_FALSE(reelect_on_failure(r, devices));
  EXPECT_EQ(r, before);

  devices[0].stats.energy = 1.0;  // below gamma
  EXPECT_TRUE(reelect_on_failure(r, devices));
  EXPECT_EQ(r.elected_cid(), DeviceId{3});
}

TEST(Reelection, TwoDeviceNetwork) {
  Thresholds t;
  t.gamma = 2.0;
  CoordinatorRegistry r(DeviceId{1}, t);
  std::vector<DeviceRecord> devices{{DeviceId{1}, with_energy(9.0)},
                                    {DeviceId{2}, with_energy(3.0)}};
  for (const auto& d : devices) r.register_device(d.id, kMember, d.stats);
  devices[0].stats.energy = 0.0;
  EXPECT_TRUE(reelect_on_failure(r, devices));
  EXPECT_EQ(r.elected_cid(), DeviceId{2});

  devices[1].stats.energy = 0.0;
  EXPECT_THROW(reelect_on_failure(r, devices), ElectionError);
}

}  // namespace
}  // namespace iiot
