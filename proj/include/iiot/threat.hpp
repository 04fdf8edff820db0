#pragma once

// Closed-form attacker analytics: hypothesis probabilities, probability of
// decision error, attack strength and compromised-receiver throughput.

namespace iiot {

/// Probabilities of the four joint hypotheses:
///   mu0 neither LID nor MD, mu1 LID only, mu2 MD only, mu3 both.
struct HypothesisProbabilities {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;

  double sum() const { return mu0 + mu1 + mu2 + mu3; }
};

/// alpha = Pr(MD on | H1), beta = Pr(MD on | H0).
struct HypothesisModel {
  double pr_h0 = 0.5;
  double pr_h1 = 0.5;
  double alpha = 0.2;
  double beta = 0.8;
};

struct ErrorModel {
  double w_fa = 0.0;  // false authentication
  double w_m = 0.0;   // non-detection
  double pr_m_on = 0.8;
  double pr_m_off = 0.2;
};

/// Linear-scale SNRs of the legitimate and the malicious transmitter.
struct ChannelParams {
  double snr_lid = 0.0;
  double snr_md = 0.0;
};

/// Throws DomainError when an input leaves [0,1] or the priors do not sum to 1
/// (tolerance 1e-9).
HypothesisProbabilities hypothesis_probabilities(double pr_h0, double pr_h1, double alpha,
                                                 double beta);
HypothesisProbabilities hypothesis_probabilities(const HypothesisModel& model);

/// W_e = W_m Pr(M_on) + W_fa Pr(M_off). Throws DomainError on out-of-range
/// probabilities or when Pr(M_on) + Pr(M_off) != 1 (tolerance 1e-9).
double probability_of_error(double w_fa, double w_m, double pr_m_on, double pr_m_off);
double probability_of_error(const ErrorModel& model);

/// rho = SNR_MD / (1 + SNR_LID). Throws DomainError on negative or non-finite SNR.
double attack_strength(const ChannelParams& channel);

/// R_NID = mu1 log2(1 + SNR_LID) + mu3 log2(1 + SNR_LID / (1 + SNR_MD)).
double compromised_throughput(double mu1, double mu3, const ChannelParams& channel);

/// 10^(db/10).
double db_to_linear(double db);

}  // namespace iiot
