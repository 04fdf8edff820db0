#pragma once

// Experiment drivers behind the CLI. Each one builds a numeric table and can
// write it as CSV: header first, comma separated, LF line endings, reals with
// 6 significant digits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "iiot/sim.hpp"

namespace iiot {

/// "%.6g" in the C locale.
std::string format_real(double value);

// -- probability of error vs false authentication ---------------------------

struct ErrorCurveParams {
  std::vector<double> w_m = {0.0, 0.25, 0.5, 0.75, 1.0};
  std::size_t w_fa_points = 51;  // uniform grid over [0, 1]
  double pr_m_on = 0.8;
  double pr_m_off = 0.2;
};

struct ErrorCurveRow {
  double w_m, w_fa, w_e;
};

/// Throws UsageError for a bad grid or out-of-range probabilities.
std::vector<ErrorCurveRow> error_curve(const ErrorCurveParams& params);
void write_error_curve(const std::vector<ErrorCurveRow>& rows, std::ostream& out);

// -- compromised fraction vs alpha -------------------------------------------

struct AttackStrengthParams {
  SimConfig config;
  std::vector<double> alphas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::size_t runs = 30;
};

std::vector<SweepRow> attack_strength_curve(const AttackStrengthParams& params);
void write_attack_strength(const std::vector<SweepRow>& rows, std::ostream& out);

// -- R_NID vs SNR_MD -----------------------------------------------------------

struct SnrCurveParams {
  double mu1 = 0.4;
  double mu3 = 0.1;
  double snr_lid = 10.0;
  double snr_md_min = 0.0;
  double snr_md_max = 20.0;
  double snr_md_step = 0.5;
  bool db = false;  // inputs in decibels
};

struct SnrCurveRow {
  double snr_md, rho, r_nid;  // linear scale
};

/// Throws UsageError for a bad grid or negative linear SNR.
std::vector<SnrCurveRow> snr_curve(const SnrCurveParams& params);
void write_snr_curve(const std::vector<SnrCurveRow>& rows, std::ostream& out);

// -- message alteration with and without the ledger ----------------------------

struct AlterationParams {
  SimConfig config;
  std::vector<std::uint64_t> sizes = {25, 100};
  std::vector<bool> ledger_modes = {true, false};
  std::size_t runs = 30;
};

struct AlterationRow {
  std::uint64_t network_size = 0;
  bool ledger_enabled = false;
  std::uint64_t attempts = 0;
  std::uint64_t succeeded = 0;
  std::uint64_t detected = 0;
  double success_rate = 0.0;  // detected / attempts: the defence's success rate
};

std::vector<AlterationRow> alteration_experiment(const AlterationParams& params);
void write_alteration(const std::vector<AlterationRow>& rows, std::ostream& out);

// -- compromised devices with and without trust -----------------------------

struct CompromiseParams {
  SimConfig config;
  std::vector<std::uint64_t> sizes = {25, 100};
  std::vector<bool> trust_modes = {true, false};
  std::size_t runs = 30;
};

struct CompromiseRow {
  bool trust_enabled = false;
  std::uint64_t network_size = 0;
  double mean_compromised_count = 0.0;
  std::vector<std::uint64_t> per_run;  // compromised count for seed, seed+1, ...
};

std::vector<CompromiseRow> compromise_experiment(const CompromiseParams& params);
void write_compromise(const std::vector<CompromiseRow>& rows, std::ostream& out);

// -- single simulation -------------------------------------------------------

inline constexpr const char* kTickMetricsHeader =
    "tick,messages_sent,messages_accepted,messages_rejected,alterations_attempted,"
    "alterations_succeeded,alterations_detected,devices_compromised,devices_blocked";

void write_tick_metrics(const std::vector<TickMetrics>& ticks, std::ostream& out);

/// File name of a phase chain dump, e.g. "ledger_manufacturing.bin".
std::string ledger_dump_name(Phase phase);

/// Runs one simulation, writes the per-tick CSV to `out` and, when
/// `ledger_dir` is set and the ledger is enabled, one dump per phase chain.
RunMetrics simulate(const SimConfig& config, std::ostream& out,
                    const std::optional<std::filesystem::path>& ledger_dir);

}  // namespace iiot
