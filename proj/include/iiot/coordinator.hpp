#pragma once

// Coordinator (CID) election, the coordinator's registry table, admission of
// new devices through a grace period, and per-transmission trust evaluation.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "iiot/trust.hpp"

namespace iiot {

enum class Admission { Pending, Admitted, Blocked };

enum class TransmissionOutcome { Accepted, Rejected };

/// One row of the coordinator's table. Addresses and routing info are opaque.
struct RegistryEntry {
  DeviceId cid_id;
  DeviceId device_id;
  std::string cid_address;
  std::string device_address;
  std::string routing_info;
  bool tf = true;
  std::uint64_t survival_time = 0;

  // Coordinator-side view of the device.
  TrustState trust;
  DeviceStats stats;
  Admission admission = Admission::Admitted;

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

/// A device as seen by the election: identity plus observed stats.
struct DeviceRecord {
  DeviceId id;
  DeviceStats stats;
};

struct ElectionCandidate {
  DeviceId id;
  double energy = 0.0;
  double monitoring_capability = 0.0;
  std::uint64_t survival_time = 0;
};

/// Opaque address token for a device, e.g. "dev-0007".
std::string address_token(DeviceId id);

/// Winner of a CID election: maximizes normalized energy + normalized MC, then
/// survival time, then prefers the smaller id. Deterministic and independent
/// of the input order. Throws ElectionError on an empty set.
DeviceId elect_cid(std::span<const ElectionCandidate> candidates);

/// Candidates drawn from `devices`: only Present devices (energy >= gamma)
/// whose monitoring capability reaches mc_threshold. MC is measured over all
/// of `devices`.
std::vector<ElectionCandidate> eligible_candidates(std::span<const DeviceRecord> devices,
                                                   const Thresholds& thresholds);

class CoordinatorRegistry {
 public:
  CoordinatorRegistry(DeviceId elected_cid, Thresholds thresholds);

  DeviceId elected_cid() const { return elected_cid_; }
  const Thresholds& thresholds() const { return thresholds_; }
  const std::map<DeviceId, RegistryEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(DeviceId id) const { return entries_.contains(id); }

  /// Throws LookupError for an unregistered id.
  const RegistryEntry& entry(DeviceId id) const;

  /// Adds a row. A device whose role is NID starts Pending (grace period),
  /// any other device starts Admitted. Throws RegistrationError on duplicates.
  void register_device(DeviceId id, const TrustState& trust, const DeviceStats& stats);

  /// Grace-period gate for a new device. Pending until the grace
  /// transmissions have been observed, then Admitted iff tf == 1. Blocked is
  /// absorbing. Throws LookupError for an unregistered id.
  Admission admit_new_device(DeviceId id, std::uint64_t transmissions_observed,
                             const TrustState& trust);

  /// One message from `sender`. Rejected when the sender is Blocked or has
  /// tf == 0; otherwise Accepted, after which the sender's counters and score
  /// are updated and, past the grace period, its trust factor re-evaluated.
  /// A sender whose trust factor drops to 0 becomes Blocked. If that sender
  /// was the CID, a new CID is elected among the remaining devices.
  TransmissionOutcome process_transmission(DeviceId sender, bool traced_wrong_info);

  /// Replaces the observational part of a device's stats (pdr, energy,
  /// activeness, rate, survival time). Counters owned by the registry are kept.
  void observe(DeviceId id, const DeviceStats& observed);

  /// Makes `cid` the coordinator and rewrites cid_id in every row.
  void set_cid(DeviceId cid);

  /// Registered devices that are not Blocked, as election input.
  std::vector<DeviceRecord> unblocked_devices() const;

  friend bool operator==(const CoordinatorRegistry&, const CoordinatorRegistry&) = default;

 private:
  RegistryEntry& mutable_entry(DeviceId id);
  void reelect_from_table();

  std::map<DeviceId, RegistryEntry> entries_;
  DeviceId elected_cid_;
  Thresholds thresholds_;
};

/// Re-elects when the current CID is Absent (per `devices` energy and
/// gamma), Blocked, or missing from `devices`. The failed CID and Blocked
/// devices are excluded. Returns true when the CID changed. Throws
/// ElectionError when no Present device remains.
bool reelect_on_failure(CoordinatorRegistry& registry, std::span<const DeviceRecord> devices);

}  // namespace iiot
