#pragma once

#include "ppfe/analysis.hpp"
#include "ppfe/channel.hpp"
#include "ppfe/codec.hpp"
#include "ppfe/estimator.hpp"
#include "ppfe/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ppfe {

struct Scenario {
  std::string name;
  SystemModel model;
  std::vector<SensorModel> sensors;
  ChannelModel channel;
  CodecConfig codec;
  std::size_t horizon = 500;
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  EavesdropperPolicy policy = EavesdropperPolicy::OwnHistory;
  /// Deterministic outcomes used by every trial instead of sampled ones.
  std::optional<OutcomeTrace> outcome_override;
  /// Decode-noise model of the legitimate filter (the eavesdropper always uses the bound).
  /// Ignored with a transparent codec.
  DecodeNoise legit_noise = DecodeNoise::Bound;

  std::size_t channels() const { return sensors.size(); }
  void validate() const;
};

/// Eavesdropper decode-error norm beyond which its estimate is declared diverged.
constexpr double kEveSaturation = 1e15;

struct CriticalEvent {
  std::size_t trial = 0;
  std::size_t channel = 0;
  std::size_t k = 0;
  bool worst_case = false;  // every later packet of the channel is intercepted

  bool operator==(const CriticalEvent&) const = default;
};

/// All (i, k) with γ_{i,k} = 1 and γᵉ_{i,k} = 0.
std::vector<CriticalEvent> detect_critical_events(const OutcomeTrace& trace,
                                                  std::size_t trial = 0);

/// γ ≡ 1; γᵉ ≡ 1 except γᵉ_{channel, k_bar} = 0.
OutcomeTrace build_worst_case(std::size_t channels, std::size_t horizon, std::size_t channel,
                              std::size_t k_bar);

struct TrialResult {
  OutcomeTrace outcomes;
  std::vector<Vec> states;              // x_k, k = 0..H−1
  std::vector<Vec> legit_estimate;      // x̂_{k|k}
  std::vector<Vec> legit_prediction;    // x̂_{k|k−1} (k = 0 is the prior mean)
  std::vector<Vec> eve_estimate;        // x̂ᵉ_{k|k}; NaN from the divergence step on
  /// ȳᵉ − y per step and channel, present when the eavesdropper decoded that packet.
  std::vector<std::vector<std::optional<Vec>>> eve_decode_error;
  std::vector<std::vector<std::optional<Vec>>> legit_decode_error;
  std::optional<std::size_t> eve_diverged_at;
  std::vector<CriticalEvent> events;
};

/// One closed pipeline: plant, encoders with ACK mirror, both channels, legitimate and
/// eavesdropper decoders and filters. Deterministic in (scenario.seed, trial).
TrialResult run_trial(const Scenario& scenario, std::size_t trial);

struct RunResult {
  std::size_t trials = 0;
  std::size_t horizon = 0;
  std::vector<double> mse_legit;            // mean ‖x_k − x̂_{k|k}‖²
  std::vector<double> mse_eve;              // +inf once any trial diverged
  std::vector<bool> eve_saturated;
  std::vector<Mat> emp_prediction_cov;      // mean of x̃_{k|k−1} x̃_{k|k−1}ᵀ
  std::vector<double> emp_prediction_trace;
  std::vector<double> emp_prediction_trace_se;
  std::vector<double> eve_mean_error_norm;  // ‖mean of x_k − x̂ᵉ_{k|k}‖, +inf when saturated
  std::vector<std::optional<std::size_t>> eve_diverged_at;  // per trial
  std::vector<CriticalEvent> events;
  std::optional<BoundSequence> bound;

  std::vector<double> bound_trace() const;  // per k; +inf past a divergence
};

/// 𝒱_0 = P̄0, 𝒱_{k+1} = g(𝒱_k) for k < horizon, with δ_N and w refreshed per iterate.
BoundSequence scenario_bound(const Scenario& scenario);

struct MonteCarloOptions {
  int workers = 0;  // 0 selects the OpenMP default
  bool with_bound = true;
};

/// Trial-parallel Monte Carlo. Per-trial results are folded in trial order, so the output
/// does not depend on the worker count.
RunResult run_monte_carlo(const Scenario& scenario, const MonteCarloOptions& options = {});

/// Single-threaded reference implementation of run_monte_carlo.
RunResult run_monte_carlo_serial(const Scenario& scenario, bool with_bound = true);

struct SecrecyReport {
  bool bounded = false;               // criterion (i)
  std::optional<std::size_t> first_violation;
  double worst_excess = 0.0;          // max_k emp − bound − 3·SE
  bool eavesdropper_diverges = false;  // criterion (ii)
  bool saturated = false;
  std::optional<double> slope;
  std::optional<double> required_slope;
  std::string detail;
};

/// (i) empirical trace E[Σ_{k|k−1}] ≤ trace 𝒱_k + 3·SE for every k, with 𝒱 bounded;
/// (ii) eavesdropper saturated, or the log of its mean-error norm grows with slope at least
/// ln(min{a_i > 1}) − 0.05 from two steps after the first critical event on such a channel.
SecrecyReport secrecy_report(const RunResult& result, const std::vector<double>& growth);

void write_mse_csv(std::ostream& os, const RunResult& result);
void write_events_csv(std::ostream& os, const std::vector<CriticalEvent>& events);
void write_summary(std::ostream& os, const Scenario& scenario, const RunResult& result,
                   const SecrecyReport& report);

/// Named experiment presets: three-tank-groupA1..A3 (growth groups) and
/// three-tank-groupD1..D3 (step groups).
std::vector<std::string> preset_names();
Scenario scenario_preset(const std::string& name);

}  // namespace ppfe
