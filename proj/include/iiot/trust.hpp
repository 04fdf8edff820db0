#pragma once

// Device-level trust: energy, monitoring capability, misbehavior counting,
// trust factor and device classification. Everything here is a pure function
// over value types.

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "iiot/rng.hpp"

namespace iiot {

struct DeviceId {
  std::uint64_t value = 0;

  friend auto operator<=>(const DeviceId&, const DeviceId&) = default;
};

enum class Presence { Present, Absent };

enum class HealthColor { Black, Green, Grey };

enum class Role { LID, MD, NID };

enum class McVerdict { Legitimate, Malicious };

enum class NewDeviceClass { LegitimateID, MaliciousDevice };

/// Observed behaviour of one device as seen by the coordinator.
struct DeviceStats {
  double pdr = 1.0;                    // packet delivery ratio, [0,1]
  double energy = 0.0;                 // E_i
  double activeness = 0.0;             // ticks active
  double message_rate = 0.0;           // messages per tick
  std::uint64_t wrong_info_count = 0;  // misbehavior counter C
  std::uint64_t interactions = 0;
  std::uint64_t survival_time = 0;     // ticks

  friend bool operator==(const DeviceStats&, const DeviceStats&) = default;
};

/// Throws DomainError when `stats` breaks the DeviceStats invariants.
void check_stats(const DeviceStats& stats);

struct TrustState {
  double score = 1.0;  // continuous trust, [0,1]
  bool tf = true;      // binary trust factor
  Role role = Role::NID;

  friend bool operator==(const TrustState&, const TrustState&) = default;
};

struct Thresholds {
  double gamma = 0.0;  // presence energy threshold
  double trust_threshold = 0.3;
  double count_threshold_fraction = 0.5;
  double mc_threshold = 0.0;  // minimum monitoring capability to stand for CID
  std::uint64_t grace_transmissions = 5;
  double score_step = 0.05;
  double burst_factor = 3.0;  // Grey when rate > burst_factor * median rate

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Throws DomainError when a threshold is outside its domain.
void check_thresholds(const Thresholds& thresholds);

inline constexpr double kInitialTrustMin = 0.70;
inline constexpr double kInitialTrustMax = 0.95;

/// Sum of squared sample magnitudes. Throws DomainError on a non-finite sample.
double compute_energy(std::span<const double> samples);

/// Present iff energy >= gamma.
Presence classify_presence(double energy, double gamma);

/// Default gamma: `factor` times the mean of `energies` (0 for an empty set).
double presence_threshold(std::span<const double> energies, double factor = 0.5);

/// Monitoring capability of every device in `population`, index-aligned.
///
/// PDR, energy and activeness are each min-max normalized over the population
/// before being summed, so every value lies in [0, 3]. A component whose
/// values are all equal normalizes to 1 for every device.
std::vector<double> monitoring_capabilities(std::span<const DeviceStats> population);

/// Monitoring capability of `stats` measured against `population`. `stats`
/// is treated as a member of the population for the normalization.
double compute_monitoring_capability(const DeviceStats& stats,
                                     std::span<const DeviceStats> population);

/// Message rate above which a device counts as bursty.
double burst_threshold(std::span<const DeviceStats> population, double factor);

HealthColor classify_health(const DeviceStats& stats, const TrustState& trust,
                            bool is_new_or_bursty);

/// One more interaction; the counter C grows iff wrong information was traced.
DeviceStats update_misbehavior(DeviceStats stats, bool traced_wrong_info);

/// Malicious iff wrong_info_count / interactions > count_threshold_fraction.
/// Throws PreconditionError when no interaction has been observed yet.
McVerdict evaluate_mc(const DeviceStats& stats, const Thresholds& thresholds);

/// Moves the continuous score one step up (good outcome) or down, clamped to [0,1].
TrustState adjust_score(TrustState trust, bool good_outcome, double step);

/// Binary trust factor. tf stays 1 only while the score is at or above the
/// trust threshold and the MC verdict is Legitimate; otherwise tf = 0 and the
/// device is marked MD. An MD never regains tf = 1.
/// Throws PreconditionError before the grace transmissions are complete.
TrustState compute_trust_factor(TrustState trust, const DeviceStats& stats, McVerdict mc_result,
                                const Thresholds& thresholds);

/// Existing device: LID iff it outlived the MD reference and transmitted.
Role classify_existing_device(std::uint64_t st_device, std::uint64_t st_md_reference,
                              bool transmitted);

/// New device after its grace period. Throws PreconditionError when fewer than
/// `thresholds.grace_transmissions` transmissions have been observed.
NewDeviceClass classify_new_device(const TrustState& trust, std::uint64_t transmissions_observed,
                                   const Thresholds& thresholds);

/// Fresh NID trust: score uniform on [0.70, 0.95], tf = 1.
TrustState init_trust(Rng& rng);

}  // namespace iiot
