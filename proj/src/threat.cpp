#include "iiot/threat.hpp"

#include <cmath>
#include <string>

#include "iiot/errors.hpp"

namespace iiot {
namespace {

constexpr double kSumTolerance = 1e-9;

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must lie in [0,1]");
}

void require_channel(const ChannelParams& c) {
  if (!std::isfinite(c.snr_lid) || !std::isfinite(c.snr_md) || c.snr_lid < 0.0 || c.snr_md < 0.0) {
    throw DomainError("SNR values must be finite and non-negative (linear scale)");
  }
}

}  // namespace

HypothesisProbabilities hypothesis_probabilities(double pr_h0, double pr_h1, double alpha,
                                                 double beta) {
  require_probability(pr_h0, "Pr(H0)");
  require_probability(pr_h1, "Pr(H1)");
  require_probability(alpha, "alpha");
  require_probability(beta, "beta");
  if (std::abs(pr_h0 + pr_h1 - 1.0) > kSumTolerance) {
    throw DomainError("Pr(H0) + Pr(H1) must equal 1");
  }
  return {(1.0 - beta) * pr_h0, (1.0 - alpha) * pr_h1, beta * pr_h0, alpha * pr_h1};
}

HypothesisProbabilities hypothesis_probabilities(const HypothesisModel& m) {
  return hypothesis_probabilities(m.pr_h0, m.pr_h1, m.alpha, m.beta);
}

double probability_of_error(double w_fa, double w_m, double pr_m_on, double pr_m_off) {
  require_probability(w_fa, "W_fa");
  require_probability(w_m, "W_m");
  require_probability(pr_m_on, "Pr(M_on)");
  require_probability(pr_m_off, "Pr(M_off)");
  if (std::abs(pr_m_on + pr_m_off - 1.0) > kSumTolerance) {
    throw DomainError("Pr(M_on) + Pr(M_off) must equal 1");
  }
  return w_m * pr_m_on + w_fa * pr_m_off;
}

double probability_of_error(const ErrorModel& m) {
  return probability_of_error(m.w_fa, m.w_m, m.pr_m_on, m.pr_m_off);
}

double attack_strength(const ChannelParams& channel) {
  require_channel(channel);
  return channel.snr_md / (1.0 + channel.snr_lid);
}

double compromised_throughput(double mu1, double mu3, const ChannelParams& channel) {
  require_probability(mu1, "mu1");
  require_probability(mu3, "mu3");
  require_channel(channel);
  return mu1 * std::log2(1.0 + channel.snr_lid) +
         mu3 * std::log2(1.0 + channel.snr_lid / (1.0 + channel.snr_md));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace iiot
