#include "iiot/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <locale>
#include <map>
#include <sstream>
#include <type_traits>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  std::istringstream in(v);
  in.imbue(std::locale::classic());
  double out = 0.0;
  in >> out;
  if (in.fail() || !in.eof()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected a boolean, got '" + v + "'");
}

using Setter = std::function<void(SimConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter bind(T SimConfig::*field) {
  return [field](SimConfig& c, const std::string& key, const std::string& v) {
    if constexpr (std::is_same_v<T, bool>) {
      c.*field = to_bool(key, v);
    } else if constexpr (std::is_same_v<T, double>) {
      c.*field = to_double(key, v);
    } else {
      c.*field = to_u64(key, v);
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"duration_ticks", bind(&SimConfig::duration_ticks)},
      {"area", bind(&SimConfig::area)},
      {"device_count", bind(&SimConfig::device_count)},
      {"attacker_count", bind(&SimConfig::attacker_count)},
      {"tx_range_m", bind(&SimConfig::tx_range_m)},
      {"pr_m_on", bind(&SimConfig::pr_m_on)},
      {"pr_m_off", bind(&SimConfig::pr_m_off)},
      {"alpha", bind(&SimConfig::alpha)},
      {"beta", bind(&SimConfig::beta)},
      {"pr_h1", bind(&SimConfig::pr_h1)},
      {"seed", bind(&SimConfig::seed)},
      {"ledger_enabled", bind(&SimConfig::ledger_enabled)},
      {"trust_enabled", bind(&SimConfig::trust_enabled)},
      {"message_rate", bind(&SimConfig::message_rate)},
      {"md_burst_rate", bind(&SimConfig::md_burst_rate)},
      {"compromise_budget", bind(&SimConfig::compromise_budget)},
      {"alteration_interval", bind(&SimConfig::alteration_interval)},
      {"new_lid_count", bind(&SimConfig::new_lid_count)},
      {"new_md_count", bind(&SimConfig::new_md_count)},
      {"inject_tick", bind(&SimConfig::inject_tick)},
      {"energy_samples", bind(&SimConfig::energy_samples)},
      {"gamma_factor", bind(&SimConfig::gamma_factor)},
      {"grace_transmissions", bind(&SimConfig::grace_transmissions)},
      {"trust_threshold", bind(&SimConfig::trust_threshold)},
      {"count_threshold_fraction", bind(&SimConfig::count_threshold_fraction)},
      {"score_step", bind(&SimConfig::score_step)},
      {"burst_factor", bind(&SimConfig::burst_factor)},
  };
  return table;
}

}  // namespace

SimConfig parse_config(std::istream& in, SimConfig base) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) {
      throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    it->second(base, key, value);
  }
  check_config(base);
  return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_config(in, base);
}

std::string format_config(const SimConfig& c) {
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out.precision(17);
  out << "duration_ticks=" << c.duration_ticks << '\n'
      << "area=" << c.area << '\n'
      << "device_count=" << c.device_count << '\n'
      << "attacker_count=" << c.attacker_count << '\n'
      << "tx_range_m=" << c.tx_range_m << '\n'
      << "pr_m_on=" << c.pr_m_on << '\n'
      << "pr_m_off=" << c.pr_m_off << '\n'
      << "alpha=" << c.alpha << '\n'
      << "beta=" << c.beta << '\n'
      << "pr_h1=" << c.pr_h1 << '\n'
      << "seed=" << c.seed << '\n'
      << "ledger_enabled=" << (c.ledger_enabled ? "true" : "false") << '\n'
      << "trust_enabled=" << (c.trust_enabled ? "true" : "false") << '\n'
      << "message_rate=" << c.message_rate << '\n'
      << "md_burst_rate=" << c.md_burst_rate << '\n'
      << "compromise_budget=" << c.compromise_budget << '\n'
      << "alteration_interval=" << c.alteration_interval << '\n'
      << "new_lid_count=" << c.new_lid_count << '\n'
      << "new_md_count=" << c.new_md_count << '\n'
      << "inject_tick=" << c.inject_tick << '\n'
      << "energy_samples=" << c.energy_samples << '\n'
      << "gamma_factor=" << c.gamma_factor << '\n'
      << "grace_transmissions=" << c.grace_transmissions << '\n'
      << "trust_threshold=" << c.trust_threshold << '\n'
      << "count_threshold_fraction=" << c.count_threshold_fraction << '\n'
      << "score_step=" << c.score_step << '\n'
      << "burst_factor=" << c.burst_factor << '\n';
  return out.str();
}

}  // namespace iiot
