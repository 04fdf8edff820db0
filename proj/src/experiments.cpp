#include "iiot/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "iiot/errors.hpp"
#include "iiot/threat.hpp"

namespace iiot {
namespace {

void require_usage(bool ok, const std::string& what) {
  if (!ok) throw UsageError(what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", value);
  return buf;
}

std::vector<ErrorCurveRow> error_curve(const ErrorCurveParams& p) {
  require_usage(p.w_fa_points >= 2, "the W_fa grid needs at least 2 points");
  require_usage(!p.w_m.empty(), "at least one W_m value is required");
  for (double w : p.w_m) require_usage(is_probability(w), "W_m values must lie in [0,1]");
  require_usage(is_probability(p.pr_m_on) && is_probability(p.pr_m_off),
                "Pr(M_on) and Pr(M_off) must lie in [0,1]");
  require_usage(std::abs(p.pr_m_on + p.pr_m_off - 1.0) <= 1e-9,
                "Pr(M_on) + Pr(M_off) must equal 1");

  std::vector<ErrorCurveRow> rows;
  const double denom = static_cast<double>(p.w_fa_points - 1);
  for (double w_m : p.w_m) {
    for (std::size_t i = 0; i < p.w_fa_points; ++i) {
      const double w_fa = static_cast<double>(i) / denom;
      rows.push_back({w_m, w_fa, probability_of_error(w_fa, w_m, p.pr_m_on, p.pr_m_off)});
    }
  }
  return rows;
}

void write_error_curve(const std::vector<ErrorCurveRow>& rows, std::ostream& out) {
  out << "w_m,w_fa,w_e\n";
  for (const auto& r : rows) {
    out << format_real(r.w_m) << ',' << format_real(r.w_fa) << ',' << format_real(r.w_e) << '\n';
  }
}

std::vector<SweepRow> attack_strength_curve(const AttackStrengthParams& p) {
  require_usage(p.runs > 0, "runs must be positive");
  require_usage(!p.alphas.empty(), "at least one alpha value is required");
  for (double a : p.alphas) require_usage(is_probability(a), "alpha values must lie in [0,1]");
  return sweep_attack_strength(p.config, p.alphas, p.runs);
}

void write_attack_strength(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "alpha,mean_compromised_fraction,stddev\n";
  for (const auto& r : rows) {
    out << format_real(r.alpha) << ',' << format_real(r.mean_compromised_fraction) << ','
        << format_real(r.stddev) << '\n';
  }
}

std::vector<SnrCurveRow> snr_curve(const SnrCurveParams& p) {
  require_usage(is_probability(p.mu1) && is_probability(p.mu3), "mu1 and mu3 must lie in [0,1]");
  require_usage(std::isfinite(p.snr_md_step) && p.snr_md_step > 0.0, "SNR step must be positive");
  require_usage(std::isfinite(p.snr_md_min) && std::isfinite(p.snr_md_max) &&
                    p.snr_md_max >= p.snr_md_min,
                "SNR range must satisfy min <= max");
  const auto linear = [&](double v) { return p.db ? db_to_linear(v) : v; };
  const double snr_lid = linear(p.snr_lid);
  require_usage(std::isfinite(snr_lid) && snr_lid >= 0.0, "SNR_LID must be non-negative");
  require_usage(p.db || p.snr_md_min >= 0.0, "SNR_MD must be non-negative");

  const auto steps =
      static_cast<std::size_t>(std::floor((p.snr_md_max - p.snr_md_min) / p.snr_md_step + 1e-9));
  std::vector<SnrCurveRow> rows;
  rows.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double snr_md = linear(p.snr_md_min + static_cast<double>(i) * p.snr_md_step);
    const ChannelParams channel{snr_lid, snr_md};
    rows.push_back({snr_md, attack_strength(channel), compromised_throughput(p.mu1, p.mu3, channel)});
  }
  return rows;
}

void write_snr_curve(const std::vector<SnrCurveRow>& rows, std::ostream& out) {
  out << "snr_md,rho,r_nid\n";
  for (const auto& r : rows) {
    out << format_real(r.snr_md) << ',' << format_real(r.rho) << ',' << format_real(r.r_nid) << '\n';
  }
}

std::vector<AlterationRow> alteration_experiment(const AlterationParams& p) {
  require_usage(p.runs > 0, "runs must be positive");
  std::vector<AlterationRow> rows;
  for (std::uint64_t size : p.sizes) {
    for (bool ledger : p.ledger_modes) {
      SimConfig c = p.config;
      c.device_count = size;
      c.ledger_enabled = ledger;
      AlterationRow row{size, ledger, 0, 0, 0, 0.0};
      for (const auto& m : run_batch(c, p.runs)) {
        row.attempts += m.totals.alterations_attempted;
        row.succeeded += m.totals.alterations_succeeded;
        row.detected += m.totals.alterations_detected;
      }
      row.success_rate = row.attempts == 0 ? 0.0
                                           : static_cast<double>(row.detected) /
                                                 static_cast<double>(row.attempts);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_alteration(const std::vector<AlterationRow>& rows, std::ostream& out) {
  out << "network_size,ledger_enabled,attempts,succeeded,detected,success_rate\n";
  for (const auto& r : rows) {
    out << r.network_size << ',' << (r.ledger_enabled ? 1 : 0) << ',' << r.attempts << ','
        << r.succeeded << ',' << r.detected << ',' << format_real(r.success_rate) << '\n';
  }
}

std::vector<CompromiseRow> compromise_experiment(const CompromiseParams& p) {
  require_usage(p.runs > 0, "runs must be positive");
  std::vector<CompromiseRow> rows;
  for (bool trust : p.trust_modes) {
    for (std::uint64_t size : p.sizes) {
      SimConfig c = p.config;
      c.device_count = size;
      c.trust_enabled = trust;
      CompromiseRow row{trust, size, 0.0, {}};
      double sum = 0.0;
      for (const auto& m : run_batch(c, p.runs)) {
        row.per_run.push_back(m.totals.devices_compromised);
        sum += static_cast<double>(m.totals.devices_compromised);
      }
      row.mean_compromised_count = sum / static_cast<double>(p.runs);
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_compromise(const std::vector<CompromiseRow>& rows, std::ostream& out) {
  out << "trust_enabled,network_size,mean_compromised_count\n";
  for (const auto& r : rows) {
    out << (r.trust_enabled ? 1 : 0) << ',' << r.network_size << ','
        << format_real(r.mean_compromised_count) << '\n';
  }
}

void write_tick_metrics(const std::vector<TickMetrics>& ticks, std::ostream& out) {
  out << kTickMetricsHeader << '\n';
  for (const auto& t : ticks) {
    out << t.tick << ',' << t.messages_sent << ',' << t.messages_accepted << ','
        << t.messages_rejected << ',' << t.alterations_attempted << ',' << t.alterations_succeeded
        << ',' << t.alterations_detected << ',' << t.devices_compromised << ','
        << t.devices_blocked << '\n';
  }
}

std::string ledger_dump_name(Phase phase) {
  return "ledger_" + std::string(phase_name(phase)) + ".bin";
}

RunMetrics simulate(const SimConfig& config, std::ostream& out,
                    const std::optional<std::filesystem::path>& ledger_dir) {
  const World w = run_world(config);
  const RunMetrics metrics = finalize(w);
  write_tick_metrics(metrics.ticks, out);
  if (ledger_dir && config.ledger_enabled) {
    std::filesystem::create_directories(*ledger_dir);
    for (const auto& ledger : w.ledgers) {
      write_chain(ledger, *ledger_dir / ledger_dump_name(ledger.phase()));
    }
  }
  return metrics;
}

}  // namespace iiot
