#include "iiot/trust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

constexpr double kScoreTolerance = 1e-9;

// Min-max normalization; a constant column maps to 1.
std::vector<double> normalize(const std::vector<double>& values) {
  std::vector<double> out(values.size(), 1.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double span = *hi - *lo;
  if (span <= 0.0) return out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    out[i] = std::clamp((values[i] - *lo) / span, 0.0, 1.0);
  }
  return out;
}

template <typename Proj>
std::vector<double> column(std::span<const DeviceStats> population, Proj proj) {
  std::vector<double> out;
  out.reserve(population.size());
  for (const auto& s : population) out.push_back(proj(s));
  return out;
}

}  // namespace

void check_stats(const DeviceStats& stats) {
  if (!(stats.pdr >= 0.0 && stats.pdr <= 1.0)) throw DomainError("pdr must lie in [0,1]");
  if (!(stats.energy >= 0.0) || !(stats.activeness >= 0.0) || !(stats.message_rate >= 0.0)) {
    throw DomainError("device stats must be non-negative");
  }
  if (stats.wrong_info_count > stats.interactions) {
    throw DomainError("wrong_info_count exceeds interactions");
  }
}

void check_thresholds(const Thresholds& t) {
  if (!(t.gamma >= 0.0) || !std::isfinite(t.gamma)) throw DomainError("gamma must be >= 0");
  if (!(t.trust_threshold > 0.0 && t.trust_threshold < kInitialTrustMin)) {
    throw DomainError("trust_threshold must lie in (0, 0.70)");
  }
  if (!(t.count_threshold_fraction > 0.0 && t.count_threshold_fraction <= 1.0)) {
    throw DomainError("count_threshold_fraction must lie in (0, 1]");
  }
  if (!(t.mc_threshold >= 0.0)) throw DomainError("mc_threshold must be >= 0");
  if (t.grace_transmissions == 0) throw DomainError("grace_transmissions must be positive");
  if (!(t.score_step > 0.0 && t.score_step <= 1.0)) throw DomainError("score_step must lie in (0, 1]");
  if (!(t.burst_factor > 0.0)) throw DomainError("burst_factor must be positive");
}

double compute_energy(std::span<const double> samples) {
  double energy = 0.0;
  for (double x : samples) {
    if (!std::isfinite(x)) throw DomainError("energy sample is not finite");
    energy += x * x;
  }
  return energy;
}

Presence classify_presence(double energy, double gamma) {
  return energy >= gamma ? Presence::Present : Presence::Absent;
}

double presence_threshold(std::span<const double> energies, double factor) {
  if (energies.empty()) return 0.0;
  const double sum = std::accumulate(energies.begin(), energies.end(), 0.0);
  return factor * sum / static_cast<double>(energies.size());
}

std::vector<double> monitoring_capabilities(std::span<const DeviceStats> population) {
  const auto pdr = normalize(column(population, [](const DeviceStats& s) { return s.pdr; }));
  const auto energy = normalize(column(population, [](const DeviceStats& s) { return s.energy; }));
  const auto active =
      normalize(column(population, [](const DeviceStats& s) { return s.activeness; }));
  std::vector<double> mc(population.size());
  for (std::size_t i = 0; i < mc.size(); ++i) mc[i] = pdr[i] + energy[i] + active[i];
  return mc;
}

double compute_monitoring_capability(const DeviceStats& stats,
                                     std::span<const DeviceStats> population) {
  check_stats(stats);
  std::vector<DeviceStats> all(population.begin(), population.end());
  all.push_back(stats);
  return monitoring_capabilities(all).back();
}

double burst_threshold(std::span<const DeviceStats> population, double factor) {
  if (population.empty()) return 0.0;
  auto rates = column(population, [](const DeviceStats& s) { return s.message_rate; });
  std::sort(rates.begin(), rates.end());
  const std::size_t n = rates.size();
  const double median = n % 2 == 1 ? rates[n / 2] : 0.5 * (rates[n / 2 - 1] + rates[n / 2]);
  return factor * median;
}

HealthColor classify_health(const DeviceStats& /*stats*/, const TrustState& trust,
                            bool is_new_or_bursty) {
  if (!trust.tf || trust.role == Role::MD) return HealthColor::Black;
  if (is_new_or_bursty) return HealthColor::Grey;
  return HealthColor::Green;
}

DeviceStats update_misbehavior(DeviceStats stats, bool traced_wrong_info) {
  ++stats.interactions;
  if (traced_wrong_info) ++stats.wrong_info_count;
  return stats;
}

McVerdict evaluate_mc(const DeviceStats& stats, const Thresholds& thresholds) {
  if (stats.interactions == 0) {
    throw PreconditionError("misbehavior ratio is indeterminate before any interaction");
  }
  const double ratio =
      static_cast<double>(stats.wrong_info_count) / static_cast<double>(stats.interactions);
  return ratio > thresholds.count_threshold_fraction ? McVerdict::Malicious
                                                     : McVerdict::Legitimate;
}

TrustState adjust_score(TrustState trust, bool good_outcome, double step) {
  trust.score = std::clamp(trust.score + (good_outcome ? step : -step), 0.0, 1.0);
  return trust;
}

TrustState compute_trust_factor(TrustState trust, const DeviceStats& stats, McVerdict mc_result,
                                const Thresholds& thresholds) {
  if (stats.interactions < thresholds.grace_transmissions) {
    throw PreconditionError("trust factor evaluated before the grace transmissions completed");
  }
  // scores move in repeated 0.05 steps; compare with a little slack for rounding
  const bool legitimate = trust.role != Role::MD &&
                          trust.score >= thresholds.trust_threshold - kScoreTolerance &&
                          mc_result == McVerdict::Legitimate;
  if (legitimate) {
    trust.tf = true;
  } else {
    trust.tf = false;
    trust.role = Role::MD;
  }
  return trust;
}

Role classify_existing_device(std::uint64_t st_device, std::uint64_t st_md_reference,
                              bool transmitted) {
  return st_device > st_md_reference && transmitted ? Role::LID : Role::MD;
}

NewDeviceClass classify_new_device(const TrustState& trust, std::uint64_t transmissions_observed,
                                   const Thresholds& thresholds) {
  if (transmissions_observed < thresholds.grace_transmissions) {
    throw PreconditionError("new device classified before its grace period ended");
  }
  return trust.tf ? NewDeviceClass::LegitimateID : NewDeviceClass::MaliciousDevice;
}

TrustState init_trust(Rng& rng) {
  return TrustState{rng.uniform(kInitialTrustMin, kInitialTrustMax), true, Role::NID};
}

}  // namespace iiot
