#include "iiot/coordinator.hpp"

#include <algorithm>
#include <cstdio>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

std::vector<double> min_max(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 1.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / (*hi - *lo);
  return out;
}

}  // namespace

std::string address_token(DeviceId id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dev-%04llu", static_cast<unsigned long long>(id.value));
  return buf;
}

DeviceId elect_cid(std::span<const ElectionCandidate> candidates) {
  if (candidates.empty()) throw ElectionError("no eligible device to elect as CID");

  std::vector<double> energy, mc;
  for (const auto& c : candidates) {
    energy.push_back(c.energy);
    mc.push_back(c.monitoring_capability);
  }
  const auto ne = min_max(energy);
  const auto nmc = min_max(mc);

  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const double score_i = ne[i] + nmc[i];
    const double score_b = ne[best] + nmc[best];
    const auto& ci = candidates[i];
    const auto& cb = candidates[best];
    if (score_i != score_b) {
      if (score_i > score_b) best = i;
    } else if (ci.survival_time != cb.survival_time) {
      if (ci.survival_time > cb.survival_time) best = i;
    } else if (ci.id < cb.id) {
      best = i;
    }
  }
  return candidates[best].id;
}

std::vector<ElectionCandidate> eligible_candidates(std::span<const DeviceRecord> devices,
                                                   const Thresholds& thresholds) {
  std::vector<DeviceStats> population;
  population.reserve(devices.size());
  for (const auto& d : devices) population.push_back(d.stats);
  const auto mc = monitoring_capabilities(population);

  std::vector<ElectionCandidate> out;
  for (std::size_t i = 0; i < devices.size(); ++i) {
    const auto& s = devices[i].stats;
    if (classify_presence(s.energy, thresholds.gamma) != Presence::Present) continue;
    if (mc[i] < thresholds.mc_threshold) continue;
    out.push_back({devices[i].id, s.energy, mc[i], s.survival_time});
  }
  return out;
}

CoordinatorRegistry::CoordinatorRegistry(DeviceId elected_cid, Thresholds thresholds)
    : elected_cid_(elected_cid), thresholds_(thresholds) {
  check_thresholds(thresholds_);
}

const RegistryEntry& CoordinatorRegistry::entry(DeviceId id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw LookupError("device " + address_token(id) + " is not registered");
  return it->second;
}

RegistryEntry& CoordinatorRegistry::mutable_entry(DeviceId id) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw LookupError("device " + address_token(id) + " is not registered");
  return it->second;
}

void CoordinatorRegistry::register_device(DeviceId id, const TrustState& trust,
                                          const DeviceStats& stats) {
  if (entries_.contains(id)) {
    throw RegistrationError("device " + address_token(id) + " is already registered");
  }
  check_stats(stats);
  RegistryEntry e;
  e.cid_id = elected_cid_;
  e.device_id = id;
  e.cid_address = address_token(elected_cid_);
  e.device_address = address_token(id);
  e.routing_info = "via:" + address_token(elected_cid_);
  e.tf = trust.tf;
  e.survival_time = stats.survival_time;
  e.trust = trust;
  e.stats = stats;
  e.admission = trust.role == Role::NID ? Admission::Pending : Admission::Admitted;
  if (!trust.tf || trust.role == Role::MD) e.admission = Admission::Blocked;
  entries_.emplace(id, std::move(e));
}

Admission CoordinatorRegistry::admit_new_device(DeviceId id, std::uint64_t transmissions_observed,
                                                const TrustState& trust) {
  auto& e = mutable_entry(id);
  if (e.admission == Admission::Blocked) return Admission::Blocked;
  if (transmissions_observed < thresholds_.grace_transmissions) {
    e.admission = Admission::Pending;
    return Admission::Pending;
  }
  if (classify_new_device(trust, transmissions_observed, thresholds_) ==
      NewDeviceClass::LegitimateID) {
    e.admission = Admission::Admitted;
    if (e.trust.role == Role::NID) e.trust.role = Role::LID;
  } else {
    e.admission = Admission::Blocked;
    e.trust.tf = false;
    e.trust.role = Role::MD;
    e.tf = false;
    if (id == elected_cid_) reelect_from_table();
  }
  return e.admission;
}

TransmissionOutcome CoordinatorRegistry::process_transmission(DeviceId sender,
                                                              bool traced_wrong_info) {
  auto& e = mutable_entry(sender);
  if (e.admission == Admission::Blocked || !e.trust.tf) return TransmissionOutcome::Rejected;

  e.stats = update_misbehavior(e.stats, traced_wrong_info);
  e.trust = adjust_score(e.trust, !traced_wrong_info, thresholds_.score_step);

  if (e.stats.interactions >= thresholds_.grace_transmissions) {
    const McVerdict verdict = evaluate_mc(e.stats, thresholds_);
    e.trust = compute_trust_factor(e.trust, e.stats, verdict, thresholds_);
    e.tf = e.trust.tf;
    if (e.admission == Admission::Pending) {
      admit_new_device(sender, e.stats.interactions, e.trust);
    } else if (!e.trust.tf) {
      e.admission = Admission::Blocked;
      if (sender == elected_cid_) reelect_from_table();
    }
  }
  return TransmissionOutcome::Accepted;
}

void CoordinatorRegistry::observe(DeviceId id, const DeviceStats& observed) {
  auto& e = mutable_entry(id);
  DeviceStats next = observed;
  next.wrong_info_count = e.stats.wrong_info_count;
  next.interactions = e.stats.interactions;
  check_stats(next);
  e.stats = next;
  e.survival_time = next.survival_time;
}

void CoordinatorRegistry::set_cid(DeviceId cid) {
  elected_cid_ = cid;
  for (auto& [id, e] : entries_) {
    e.cid_id = cid;
    e.cid_address = address_token(cid);
    e.routing_info = "via:" + address_token(cid);
  }
}

std::vector<DeviceRecord> CoordinatorRegistry::unblocked_devices() const {
  std::vector<DeviceRecord> out;
  for (const auto& [id, e] : entries_) {
    if (e.admission != Admission::Blocked) out.push_back({id, e.stats});
  }
  return out;
}

void CoordinatorRegistry::reelect_from_table() {
  auto devices = unblocked_devices();
  const auto candidates = eligible_candidates(devices, thresholds_);
  set_cid(elect_cid(candidates));
}

bool reelect_on_failure(CoordinatorRegistry& registry, std::span<const DeviceRecord> devices) {
  const DeviceId current = registry.elected_cid();
  const auto& t = registry.thresholds();

  const auto it = std::find_if(devices.begin(), devices.end(),
                               [&](const DeviceRecord& d) { return d.id == current; });
  const bool blocked =
      registry.contains(current) && registry.entry(current).admission == Admission::Blocked;
  if (it != devices.end() && !blocked &&
      classify_presence(it->stats.energy, t.gamma) == Presence::Present) {
    return false;
  }

  std::vector<DeviceRecord> remaining;
  for (const auto& d : devices) {
    if (d.id == current) continue;
    if (registry.contains(d.id) && registry.entry(d.id).admission == Admission::Blocked) continue;
    remaining.push_back(d);
  }
  const auto candidates = eligible_candidates(remaining, t);
  registry.set_cid(elect_cid(candidates));
  return registry.elected_cid() != current;
}

}  // namespace iiot
