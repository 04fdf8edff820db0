#include "iiot/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "iiot/config.hpp"
#include "iiot/errors.hpp"
#include "iiot/experiments.hpp"

namespace iiot {
namespace {

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::size_t runs = 30;
  std::string out;
  std::string config;
};

void add_out(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--out", o.out, "Output CSV path (default: stdout)");
}

void add_sim_options(CLI::App* cmd, CommonOptions& o, bool with_runs) {
  add_out(cmd, o);
  cmd->add_option("--seed", o.seed, "Base seed (overrides the config file)");
  cmd->add_option("--config", o.config, "key=value simulation config file");
  if (with_runs) cmd->add_option("--runs", o.runs, "Seeded runs per data point")->check(CLI::PositiveNumber);
}

SimConfig resolve_config(const CommonOptions& o) {
  SimConfig c = o.config.empty() ? SimConfig{} : load_config(o.config);
  if (o.seed) c.seed = *o.seed;
  check_config(c);
  return c;
}

// Writes through a buffer so a failed run leaves no partial file behind.
void emit(const CommonOptions& o, std::ostream& out, const std::function<void(std::ostream&)>& body) {
  std::ostringstream buf;
  body(buf);
  if (o.out.empty()) {
    out << buf.str();
    return;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot open " + o.out + " for writing");
  file << buf.str();
  if (!file) throw std::runtime_error("failed writing " + o.out);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Trust-managed IIoT network simulator and analytics"};
  app.require_subcommand(1);

  CommonOptions common;

  ErrorCurveParams error_params;
  auto* error_cmd = app.add_subcommand("error-curve", "Probability of error vs W_fa");
  add_out(error_cmd, common);
  error_cmd->add_option("--w-m", error_params.w_m, "W_m values, one series each")->delimiter(',');
  error_cmd->add_option("--w-fa-points", error_params.w_fa_points, "Points in the W_fa grid over [0,1]");
  error_cmd->add_option("--pr-on", error_params.pr_m_on, "Pr(M_on)");
  error_cmd->add_option("--pr-off", error_params.pr_m_off, "Pr(M_off)");

  AttackStrengthParams attack_params;
  auto* attack_cmd = app.add_subcommand("attack-strength", "Compromised fraction vs alpha");
  add_sim_options(attack_cmd, common, true);
  attack_cmd->add_option("--alphas", attack_params.alphas, "alpha grid")->delimiter(',');

  SnrCurveParams snr_params;
  auto* snr_cmd = app.add_subcommand("snr-curve", "R_NID vs SNR_MD");
  add_out(snr_cmd, common);
  snr_cmd->add_option("--mu1", snr_params.mu1, "mu1");
  snr_cmd->add_option("--mu3", snr_params.mu3, "mu3");
  snr_cmd->add_option("--snr-lid", snr_params.snr_lid, "SNR_LID");
  snr_cmd->add_option("--snr-md-min", snr_params.snr_md_min, "First SNR_MD grid value");
  snr_cmd->add_option("--snr-md-max", snr_params.snr_md_max, "Last SNR_MD grid value");
  snr_cmd->add_option("--snr-md-step", snr_params.snr_md_step, "SNR_MD grid step");
  snr_cmd->add_flag("--db", snr_params.db, "Interpret SNR inputs in decibels");

  AlterationParams alteration_params;
  std::string ledger_mode = "both";
  auto* alteration_cmd = app.add_subcommand("alteration", "Message alteration with/without the ledger");
  add_sim_options(alteration_cmd, common, true);
  alteration_cmd->add_option("--small", alteration_params.sizes[0], "Small network size");
  alteration_cmd->add_option("--large", alteration_params.sizes[1], "Large network size");
  alteration_cmd->add_option("--ledger", ledger_mode, "on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));

  CompromiseParams compromise_params;
  std::string trust_mode = "both";
  auto* compromise_cmd = app.add_subcommand("compromise", "Compromised devices with/without trust");
  add_sim_options(compromise_cmd, common, true);
  compromise_cmd->add_option("--small", compromise_params.sizes[0], "Small network size");
  compromise_cmd->add_option("--large", compromise_params.sizes[1], "Large network size");
  compromise_cmd->add_option("--trust", trust_mode, "on, off or both")
      ->check(CLI::IsMember({"on", "off", "both"}));

  std::string ledger_dir;
  auto* simulate_cmd = app.add_subcommand("simulate", "One run: per-tick metrics and ledger dumps");
  add_sim_options(simulate_cmd, common, false);
  simulate_cmd->add_option("--ledger-dir", ledger_dir,
                           "Directory for ledger dumps (default: next to --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const auto modes = [](const std::string& m) {
    if (m == "on") return std::vector<bool>{true};
    if (m == "off") return std::vector<bool>{false};
    return std::vector<bool>{true, false};
  };

  try {
    if (*error_cmd) {
      const auto rows = error_curve(error_params);
      emit(common, out, [&](std::ostream& o) { write_error_curve(rows, o); });
    } else if (*attack_cmd) {
      attack_params.config = resolve_config(common);
      attack_params.runs = common.runs;
      const auto rows = attack_strength_curve(attack_params);
      emit(common, out, [&](std::ostream& o) { write_attack_strength(rows, o); });
    } else if (*snr_cmd) {
      const auto rows = snr_curve(snr_params);
      emit(common, out, [&](std::ostream& o) { write_snr_curve(rows, o); });
    } else if (*alteration_cmd) {
      alteration_params.config = resolve_config(common);
      alteration_params.runs = common.runs;
      alteration_params.ledger_modes = modes(ledger_mode);
      const auto rows = alteration_experiment(alteration_params);
      emit(common, out, [&](std::ostream& o) { write_alteration(rows, o); });
    } else if (*compromise_cmd) {
      compromise_params.config = resolve_config(common);
      compromise_params.runs = common.runs;
      compromise_params.trust_modes = modes(trust_mode);
      const auto rows = compromise_experiment(compromise_params);
      emit(common, out, [&](std::ostream& o) { write_compromise(rows, o); });
    } else if (*simulate_cmd) {
      const SimConfig config = resolve_config(common);
      std::optional<std::filesystem::path> dir;
      if (!ledger_dir.empty()) {
        dir = ledger_dir;
      } else if (!common.out.empty()) {
        dir = std::filesystem::path(common.out).parent_path();
        if (dir->empty()) dir = ".";
      }
      std::ostringstream csv;
      simulate(config, csv, dir);
      emit(common, out, [&](std::ostream& o) { o << csv.str(); });
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace iiot
