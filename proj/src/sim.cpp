#include "iiot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <string>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

enum Stream : std::uint64_t {
  kPlacement = 1,
  kRoles = 2,
  kEnergy = 3,
  kTrust = 4,
  kAlteration = 5,
  kTrafficBase = 1000,
};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool in_range(const World& w, std::size_t a, std::size_t b) {
  const double dx = w.devices[a].position.x - w.devices[b].position.x;
  const double dy = w.devices[a].position.y - w.devices[b].position.y;
  return std::sqrt(dx * dx + dy * dy) <= w.config.tx_range_m;
}

std::vector<double> draw_energy_samples(Rng& rng, std::uint64_t count) {
  const double gain = rng.uniform(0.5, 1.5);
  std::vector<double> samples(count);
  for (auto& s : samples) s = gain * rng.uniform(-1.0, 1.0);
  return samples;
}

DeviceState make_device(World& w, DeviceId id, bool malicious, bool injected) {
  DeviceState d;
  d.id = id;
  d.position = {w.placement_rng.uniform(0.0, w.config.area),
                w.placement_rng.uniform(0.0, w.config.area)};
  d.phase = static_cast<Phase>(id.value % kPhaseCount);
  d.hidden_malicious = malicious;
  d.injected = injected;
  d.joined_tick = w.tick;
  d.energy_samples = draw_energy_samples(w.energy_rng, w.config.energy_samples);
  d.health = injected ? HealthColor::Grey : HealthColor::Green;
  d.traffic = Rng(derive_seed(w.config.seed, kTrafficBase + id.value));
  return d;
}

DeviceStats initial_stats(const DeviceState& d) {
  DeviceStats s;
  s.energy = compute_energy(d.energy_samples);
  return s;
}

Bytes message_payload(DeviceId sender, std::uint64_t tick, std::uint64_t seq, bool wrong) {
  Bytes p;
  for (int shift = 56; shift >= 0; shift -= 8) p.push_back(static_cast<std::uint8_t>(sender.value >> shift));
  for (int shift = 56; shift >= 0; shift -= 8) p.push_back(static_cast<std::uint8_t>(tick >> shift));
  for (int shift = 24; shift >= 0; shift -= 8) p.push_back(static_cast<std::uint8_t>(seq >> shift));
  p.push_back(wrong ? 1 : 0);
  return p;
}

std::uint64_t blocked_count(const CoordinatorRegistry& registry) {
  return static_cast<std::uint64_t>(
      std::count_if(registry.entries().begin(), registry.entries().end(),
                    [](const auto& kv) { return kv.second.admission == Admission::Blocked; }));
}

// Refreshes the coordinator's observations, health colors and CID.
void observe_devices(World& w, std::uint64_t now) {
  for (const auto& d : w.devices) {
    DeviceStats s = w.registry.entry(d.id).stats;
    const std::uint64_t alive = now - d.joined_tick;
    s.pdr = d.sent == 0 ? 1.0 : static_cast<double>(d.accepted) / static_cast<double>(d.sent);
    s.energy = compute_energy(d.energy_samples);
    s.activeness = static_cast<double>(d.active_ticks);
    s.message_rate = alive == 0 ? 0.0 : static_cast<double>(d.sent) / static_cast<double>(alive);
    if (w.registry.entry(d.id).admission != Admission::Blocked) s.survival_time = alive;
    w.registry.observe(d.id, s);
  }

  std::vector<DeviceStats> population;
  population.reserve(w.devices.size());
  for (const auto& d : w.devices) population.push_back(w.registry.entry(d.id).stats);
  const double burst = burst_threshold(population, w.thresholds.burst_factor);
  for (auto& d : w.devices) {
    const auto& e = w.registry.entry(d.id);
    const bool is_new = e.admission == Admission::Pending;
    const bool bursty = e.stats.message_rate > burst;
    d.health = classify_health(e.stats, e.trust, is_new || bursty);
  }

  std::vector<DeviceRecord> records;
  records.reserve(w.devices.size());
  for (const auto& d : w.devices) records.push_back({d.id, w.registry.entry(d.id).stats});
  reelect_on_failure(w.registry, records);
}

void schedule_alterations(World& w) {
  const std::uint64_t interval = w.config.alteration_interval;
  if (interval == 0 || (w.tick + 1) % interval != 0) return;
  for (std::size_t i = 0; i < w.devices.size(); ++i) {
    if (!w.devices[i].hidden_malicious) continue;
    const std::size_t chain = w.alteration_rng.index(kPhaseCount);
    const std::size_t length = w.config.ledger_enabled ? w.ledgers[chain].size()
                                                       : w.plain_store[chain].size() + 1;
    const auto mutation = static_cast<Mutation>(w.alteration_rng.index(3));
    const auto offset = static_cast<std::size_t>(w.alteration_rng.next_u64() % 64);
    if (length < 2) continue;  // nothing recorded yet
    const std::size_t block = 1 + w.alteration_rng.index(length - 1);
    attempt_alteration(w, chain, block, mutation, offset);
  }
}

}  // namespace

void check_config(const SimConfig& c) {
  require(c.duration_ticks > 0, "duration_ticks must be positive");
  require(std::isfinite(c.area) && c.area > 0.0, "area must be positive");
  require(c.device_count > 0, "device_count must be positive");
  require(c.attacker_count < c.device_count, "attacker_count must be below device_count");
  require(std::isfinite(c.tx_range_m) && c.tx_range_m > 0.0, "tx_range_m must be positive");
  for (const auto& [v, name] : {std::pair{c.pr_m_on, "pr_m_on"}, std::pair{c.pr_m_off, "pr_m_off"},
                                std::pair{c.alpha, "alpha"}, std::pair{c.beta, "beta"},
                                std::pair{c.pr_h1, "pr_h1"},
                                std::pair{c.count_threshold_fraction, "count_threshold_fraction"}}) {
    require(v >= 0.0 && v <= 1.0, std::string(name) + " must lie in [0,1]");
  }
  require(std::abs(c.pr_m_on + c.pr_m_off - 1.0) <= 1e-9, "pr_m_on + pr_m_off must equal 1");
  require(c.message_rate > 0, "message_rate must be positive");
  require(c.energy_samples > 0, "energy_samples must be positive");
  require(c.gamma_factor >= 0.0 && std::isfinite(c.gamma_factor), "gamma_factor must be >= 0");
  require(c.grace_transmissions > 0, "grace_transmissions must be positive");
  require(c.trust_threshold > 0.0 && c.trust_threshold < kInitialTrustMin,
          "trust_threshold must lie in (0, 0.70)");
  require(c.count_threshold_fraction > 0.0, "count_threshold_fraction must be positive");
  require(c.score_step > 0.0 && c.score_step <= 1.0, "score_step must lie in (0, 1]");
  require(c.burst_factor > 0.0, "burst_factor must be positive");
}

World build_network(const SimConfig& config) {
  check_config(config);

  Thresholds thresholds;
  thresholds.trust_threshold = config.trust_threshold;
  thresholds.count_threshold_fraction = config.count_threshold_fraction;
  thresholds.grace_transmissions = config.grace_transmissions;
  thresholds.score_step = config.score_step;
  thresholds.burst_factor = config.burst_factor;

  World w{
      .config = config,
      .thresholds = thresholds,
      .tick = 0,
      .devices = {},
      .neighbors = {},
      .registry = CoordinatorRegistry(DeviceId{1}, thresholds),
      .ledgers = {},
      .plain_store = std::vector<std::vector<Record>>(kPhaseCount),
      .placement_rng = Rng(derive_seed(config.seed, kPlacement)),
      .energy_rng = Rng(derive_seed(config.seed, kEnergy)),
      .trust_rng = Rng(derive_seed(config.seed, kTrust)),
      .alteration_rng = Rng(derive_seed(config.seed, kAlteration)),
      .counters = {},
      .metrics = {},
      .events = {},
  };

  // Hidden attackers: partial Fisher-Yates over device slots.
  std::vector<std::size_t> slots(config.device_count);
  std::iota(slots.begin(), slots.end(), std::size_t{0});
  Rng roles(derive_seed(config.seed, kRoles));
  std::vector<bool> malicious(config.device_count, false);
  for (std::size_t k = 0; k < config.attacker_count; ++k) {
    const std::size_t j = k + roles.index(slots.size() - k);
    std::swap(slots[k], slots[j]);
    malicious[slots[k]] = true;
  }

  for (std::size_t i = 0; i < config.device_count; ++i) {
    w.devices.push_back(make_device(w, DeviceId{i + 1}, malicious[i], false));
  }

  std::vector<double> energies;
  for (const auto& d : w.devices) energies.push_back(compute_energy(d.energy_samples));
  w.thresholds.gamma = presence_threshold(energies, config.gamma_factor);

  std::vector<DeviceRecord> records;
  for (const auto& d : w.devices) records.push_back({d.id, initial_stats(d)});
  const DeviceId cid = elect_cid(eligible_candidates(records, w.thresholds));
  w.registry = CoordinatorRegistry(cid, w.thresholds);

  for (const auto& d : w.devices) {
    TrustState trust = init_trust(w.trust_rng);
    trust.role = Role::LID;  // initial devices are trusted members, not NIDs
    w.registry.register_device(d.id, trust, initial_stats(d));
  }

  w.neighbors.assign(w.devices.size(), {});
  for (std::size_t a = 0; a < w.devices.size(); ++a) {
    for (std::size_t b = a + 1; b < w.devices.size(); ++b) {
      if (in_range(w, a, b)) {
        w.neighbors[a].push_back(b);
        w.neighbors[b].push_back(a);
      }
    }
  }

  for (std::size_t p = 0; p < kPhaseCount; ++p) w.ledgers.push_back(genesis(static_cast<Phase>(p)));
  w.metrics.legitimate_devices = config.device_count - config.attacker_count;
  w.metrics.malicious_devices = config.attacker_count;
  return w;
}

DeviceId inject_new_device(World& w, Role hidden_role) {
  const DeviceId id{w.devices.empty() ? 1 : w.devices.back().id.value + 1};
  const bool malicious = hidden_role == Role::MD;
  w.devices.push_back(make_device(w, id, malicious, true));
  const std::size_t idx = w.devices.size() - 1;

  w.neighbors.emplace_back();
  for (std::size_t other = 0; other < idx; ++other) {
    if (in_range(w, idx, other)) {
      w.neighbors[idx].push_back(other);
      w.neighbors[other].push_back(idx);
    }
  }
  w.registry.register_device(id, init_trust(w.trust_rng), initial_stats(w.devices[idx]));
  if (malicious) {
    ++w.metrics.malicious_devices;
  } else {
    ++w.metrics.legitimate_devices;
  }
  return id;
}

void step(World& w) {
  const SimConfig& c = w.config;
  if (w.tick >= c.duration_ticks) throw PreconditionError("simulation already reached duration_ticks");
  const std::uint64_t now = w.tick + 1;

  for (std::size_t i = 0; i < w.devices.size(); ++i) {
    if (w.neighbors[i].empty()) continue;
    const std::uint64_t count = c.message_rate + (w.devices[i].hidden_malicious ? c.md_burst_rate : 0);
    bool sent_any = false;
    for (std::uint64_t m = 0; m < count; ++m) {
      DeviceState& sender = w.devices[i];
      // Three draws per message regardless of role or trust state, so that
      // runs differing only in trust_enabled see identical traffic.
      const std::size_t target_idx = w.neighbors[i][sender.traffic.index(w.neighbors[i].size())];
      const bool lid_active = sender.traffic.uniform() < c.pr_h1;
      const double u = sender.traffic.uniform();
      const bool wrong = sender.hidden_malicious && u < (lid_active ? c.alpha : c.beta);

      const RegistryEntry& before = w.registry.entry(sender.id);
      const bool tf_before = before.trust.tf;
      const bool blocked_before = before.admission == Admission::Blocked;

      const TransmissionOutcome outcome = c.trust_enabled
                                              ? w.registry.process_transmission(sender.id, wrong)
                                              : TransmissionOutcome::Accepted;
      const bool accepted = outcome == TransmissionOutcome::Accepted;

      ++sender.sent;
      sent_any = true;
      ++w.counters.messages_sent;
      if (accepted) {
        ++w.counters.messages_accepted;
        ++sender.accepted;
        if (!tf_before || blocked_before) ++w.metrics.gating_violations;

        DeviceState& target = w.devices[target_idx];
        if (wrong && lid_active && !target.hidden_malicious) {
          ++target.false_accepted;
          if (!target.compromised && target.false_accepted > c.compromise_budget) {
            target.compromised = true;
            ++w.counters.devices_compromised;
          }
        }

        Record rec{sender.id, sender.phase, message_payload(sender.id, now, m, wrong), now};
        const std::size_t chain = static_cast<std::size_t>(sender.phase);
        if (c.ledger_enabled) {
          append_record(w.ledgers[chain], std::move(rec), w.registry.entry(sender.id).tf);
        } else {
          w.plain_store[chain].push_back(std::move(rec));
        }
      } else {
        ++w.counters.messages_rejected;
      }

      if (c.record_events) {
        w.events.push_back({now, sender.id, w.devices[target_idx].id, tf_before, blocked_before,
                            wrong, lid_active, accepted});
      }
    }
    if (sent_any) ++w.devices[i].active_ticks;
  }

  observe_devices(w, now);
  schedule_alterations(w);

  w.counters.tick = now;
  w.counters.devices_blocked = blocked_count(w.registry);
  w.metrics.ticks.push_back(w.counters);
  w.metrics.totals = w.counters;
  w.tick = now;
}

AlterationOutcome attempt_alteration(World& w, std::size_t ledger_index, std::size_t block_index,
                                     Mutation mutation, std::size_t byte_offset) {
  if (ledger_index >= kPhaseCount) throw DomainError("ledger index out of range");
  ++w.counters.alterations_attempted;

  if (!w.config.ledger_enabled) {
    auto& store = w.plain_store[ledger_index];
    if (block_index == 0 || block_index > store.size()) {
      --w.counters.alterations_attempted;
      throw DomainError("record index out of range");
    }
    const auto pos = store.begin() + static_cast<std::ptrdiff_t>(block_index - 1);
    if (mutation == Mutation::DeleteBlock) {
      store.erase(pos);
    } else {
      pos->payload[byte_offset % pos->payload.size()] ^= 0xFF;
    }
    ++w.counters.alterations_succeeded;
    w.metrics.totals = w.counters;
    return AlterationOutcome::Succeeded;
  }

  Ledger& chain = w.ledgers[ledger_index];
  Ledger last_valid = chain;
  try {
    chain = tamper(chain, block_index, mutation, byte_offset);
  } catch (...) {
    --w.counters.alterations_attempted;
    throw;
  }
  AlterationOutcome outcome;
  if (!validate_chain(chain).valid()) {
    chain = std::move(last_valid);
    ++w.counters.alterations_detected;
    outcome = AlterationOutcome::Detected;
  } else {
    ++w.counters.alterations_succeeded;
    outcome = AlterationOutcome::Succeeded;
  }
  w.metrics.totals = w.counters;
  return outcome;
}

RunMetrics finalize(const World& w) {
  RunMetrics m = w.metrics;
  m.totals = w.counters;
  std::uint64_t legit_blocked = 0;
  std::uint64_t md_unblocked = 0;
  for (const auto& d : w.devices) {
    const bool blocked = w.registry.entry(d.id).admission == Admission::Blocked;
    if (d.hidden_malicious && !blocked) ++md_unblocked;
    if (!d.hidden_malicious && blocked) ++legit_blocked;
  }
  const auto ratio = [](std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  m.detection_success_rate = ratio(m.totals.alterations_detected, m.totals.alterations_attempted);
  m.compromise_fraction = ratio(m.totals.devices_compromised, m.legitimate_devices);
  m.empirical_w_fa = ratio(legit_blocked, m.legitimate_devices);
  m.empirical_w_m = ratio(md_unblocked, m.malicious_devices);
  return m;
}

World run_world(const SimConfig& config) {
  World w = build_network(config);
  while (w.tick < config.duration_ticks) {
    if (w.tick == config.inject_tick) {
      for (std::uint64_t k = 0; k < config.new_lid_count; ++k) inject_new_device(w, Role::LID);
      for (std::uint64_t k = 0; k < config.new_md_count; ++k) inject_new_device(w, Role::MD);
    }
    step(w);
  }
  return w;
}

RunMetrics run(const SimConfig& config) { return finalize(run_world(config)); }

std::vector<RunMetrics> run_batch(const SimConfig& config, std::size_t runs) {
  check_config(config);
  std::vector<std::future<RunMetrics>> pending;
  pending.reserve(runs);
  for (std::size_t r = 0; r < runs; ++r) {
    SimConfig c = config;
    c.seed = config.seed + r;
    pending.push_back(std::async(std::launch::async, [c] { return run(c); }));
  }
  std::vector<RunMetrics> out;
  out.reserve(runs);
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

std::vector<SweepRow> sweep_attack_strength(const SimConfig& config,
                                            std::span<const double> alpha_values,
                                            std::size_t runs) {
  if (runs == 0) throw ConfigError("runs must be positive");
  std::vector<SweepRow> rows;
  for (double alpha : alpha_values) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha values must lie in [0,1]");
    SimConfig c = config;
    c.alpha = alpha;
    const auto results = run_batch(c, runs);
    double sum = 0.0;
    for (const auto& r : results) sum += r.compromise_fraction;
    const double mean = sum / static_cast<double>(runs);
    double sq = 0.0;
    for (const auto& r : results) sq += (r.compromise_fraction - mean) * (r.compromise_fraction - mean);
    const double stddev = runs > 1 ? std::sqrt(sq / static_cast<double>(runs - 1)) : 0.0;
    rows.push_back({alpha, mean, stddev});
  }
  return rows;
}

}  // namespace iiot
