#pragma once

// Deterministic discrete-time IIoT world. One tick is one second. Every
// random decision comes from a seed-derived stream, so a run is a pure
// function of its SimConfig.

#include <cstdint>
#include <span>
#include <vector>

#include "iiot/coordinator.hpp"
#include "iiot/ledger.hpp"
#include "iiot/rng.hpp"
#include "iiot/trust.hpp"

namespace iiot {

struct SimConfig {
  std::uint64_t duration_ticks = 80;
  double area = 400.0;  // side of the square, meters
  std::uint64_t device_count = 25;
  std::uint64_t attacker_count = 5;
  double tx_range_m = 120.0;
  double pr_m_on = 0.8;
  double pr_m_off = 0.2;
  double alpha = 0.2;  // Pr(false message | LID active)
  double beta = 0.8;   // Pr(false message | no LID active)
  double pr_h1 = 0.5;  // Pr(an LID is active on the targeted channel)
  std::uint64_t seed = 42;
  bool ledger_enabled = true;
  bool trust_enabled = true;

  std::uint64_t message_rate = 1;   // messages per device per tick
  std::uint64_t md_burst_rate = 3;  // extra messages per MD per tick
  std::uint64_t compromise_budget = 5;
  std::uint64_t alteration_interval = 10;  // ticks between attempts per attacker; 0 disables
  std::uint64_t new_lid_count = 0;
  std::uint64_t new_md_count = 0;
  std::uint64_t inject_tick = 10;
  std::uint64_t energy_samples = 16;
  double gamma_factor = 0.5;  // gamma = gamma_factor * mean initial energy

  std::uint64_t grace_transmissions = 5;
  double trust_threshold = 0.3;
  double count_threshold_fraction = 0.5;
  double score_step = 0.05;
  double burst_factor = 3.0;

  bool record_events = false;

  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// Throws ConfigError when the configuration breaks an invariant.
void check_config(const SimConfig& config);

struct Position {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct DeviceState {
  DeviceId id;
  Position position;
  Phase phase = Phase::Generic;
  bool hidden_malicious = false;  // ground truth, invisible to the coordinator
  bool injected = false;
  std::uint64_t joined_tick = 0;
  std::vector<double> energy_samples;
  HealthColor health = HealthColor::Green;

  std::uint64_t sent = 0;
  std::uint64_t accepted = 0;
  std::uint64_t active_ticks = 0;
  std::uint64_t false_accepted = 0;  // false messages delivered to this device
  bool compromised = false;

  Rng traffic;

  friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

/// Cumulative counters as of the end of `tick`.
struct TickMetrics {
  std::uint64_t tick = 0;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_accepted = 0;
  std::uint64_t messages_rejected = 0;
  std::uint64_t alterations_attempted = 0;
  std::uint64_t alterations_succeeded = 0;
  std::uint64_t alterations_detected = 0;
  std::uint64_t devices_compromised = 0;
  std::uint64_t devices_blocked = 0;

  friend bool operator==(const TickMetrics&, const TickMetrics&) = default;
};

struct RunMetrics {
  std::vector<TickMetrics> ticks;
  TickMetrics totals;
  std::uint64_t legitimate_devices = 0;
  std::uint64_t malicious_devices = 0;
  std::uint64_t gating_violations = 0;  // accepted messages whose sender had tf == 0
  double detection_success_rate = 0.0;  // detected / attempted alterations
  double compromise_fraction = 0.0;     // compromised / legitimate devices
  double empirical_w_fa = 0.0;          // legitimate devices blocked / legitimate devices
  double empirical_w_m = 0.0;           // MDs unblocked at the end / MDs

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// One message as seen by the audit log.
struct MessageEvent {
  std::uint64_t tick = 0;
  DeviceId sender;
  DeviceId target;
  bool sender_tf = true;        // coordinator's tf for the sender at send time
  bool sender_blocked = false;  // sender Blocked at send time
  bool wrong_info = false;
  bool lid_active = false;
  bool accepted = false;

  friend bool operator==(const MessageEvent&, const MessageEvent&) = default;
};

struct World {
  SimConfig config;
  Thresholds thresholds;
  std::uint64_t tick = 0;
  std::vector<DeviceState> devices;  // ordered by id
  std::vector<std::vector<std::size_t>> neighbors;
  CoordinatorRegistry registry;
  std::vector<Ledger> ledgers;                   // one per Phase, ledger_enabled
  std::vector<std::vector<Record>> plain_store;  // conventional database, ledger disabled
  Rng placement_rng;
  Rng energy_rng;
  Rng trust_rng;
  Rng alteration_rng;
  TickMetrics counters;
  RunMetrics metrics;
  std::vector<MessageEvent> events;

  friend bool operator==(const World&, const World&) = default;
};

enum class AlterationOutcome { Succeeded, Detected };

/// Places the devices, hides attacker_count MDs among them, draws initial
/// trust, elects the CID and creates the five genesis ledgers.
World build_network(const SimConfig& config);

/// Advances one tick. Throws PreconditionError once duration_ticks is reached.
void step(World& world);

/// Adds a new device (Grey, Pending) at a random position and registers it.
DeviceId inject_new_device(World& world, Role hidden_role);

/// One alteration of `block_index` in phase chain `ledger_index`. With the
/// ledger enabled the chain is revalidated; a detected alteration is rolled
/// back to the last valid copy. Without it the conventional store is changed
/// silently.
AlterationOutcome attempt_alteration(World& world, std::size_t ledger_index,
                                     std::size_t block_index, Mutation mutation,
                                     std::size_t byte_offset = 0);

/// Final aggregates of a world that has been stepped to completion.
RunMetrics finalize(const World& world);

/// build_network, new-device injection at inject_tick, then every tick.
World run_world(const SimConfig& config);

RunMetrics run(const SimConfig& config);

/// `runs` independent runs seeded seed, seed+1, ...; executed in parallel,
/// returned in seed order.
std::vector<RunMetrics> run_batch(const SimConfig& config, std::size_t runs);

struct SweepRow {
  double alpha = 0.0;
  double mean_compromised_fraction = 0.0;
  double stddev = 0.0;
};

/// Mean and sample standard deviation of the compromised fraction for each
/// alpha over `runs` seeded runs. Throws ConfigError for alpha outside [0,1].
std::vector<SweepRow> sweep_attack_strength(const SimConfig& config,
                                            std::span<const double> alpha_values,
                                            std::size_t runs = 30);

}  // namespace iiot
