#pragma once

#include "ppfe/channel.hpp"
#include "ppfe/codec.hpp"
#include "ppfe/linalg.hpp"
#include "ppfe/model.hpp"
#include "ppfe/rng.hpp"

#include <complex>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ppfe {

/// Ingredients of the boundedness recursion for the legitimate user.
struct BoundParams {
  Mat A;
  Mat Qeff;  // D·Q·Dᵀ
  std::vector<SensorModel> sensors;
  std::vector<double> gamma;       // γ̄_i, capped at 1 − 1e−9
  std::vector<double> distortion;  // δ_{N_i}
  std::vector<double> eta;         // η_i; empty selects √δ_{N_i}/|s|
  std::vector<double> step;        // δ_i, used when δ_N is refreshed from the iterate
  double scale = 1.0;
  std::vector<std::string> warnings;

  std::size_t channels() const { return sensors.size(); }
  void validate() const;
};

/// BoundParams for a plant with per-channel reception probabilities and codec; δ_N is
/// initialized from Σ = P̄0.
BoundParams make_bound_params(const SystemModel& model, const std::vector<SensorModel>& sensors,
                              const std::vector<double>& gamma, const CodecConfig& codec);

constexpr double kGammaCap = 1.0 - 1e-9;

/// Stacked C_i and blockdiag of E_i R_i E_iᵀ over all sensors.
Mat stacked_C(const std::vector<SensorModel>& sensors);
Mat stacked_R(const std::vector<SensorModel>& sensors);

/// min(1 − 1e−6, s²·(δ²/4) / λ_min(C Σ Cᵀ + R)).
double default_distortion_rate(const SensorModel& sensor, const Mat& sigma, double step,
                               double scale);

/// √δ_N / |s|, the minimizer of |s|η + δ_N/(|s|η).
double default_eta(double distortion, double scale);

/// blockdiag{√(s²δ_N + |s|η + δ_N/(|s|η))·I}; a channel with δ_N = 0 and default η gets 0.
Mat v_matrix(const BoundParams& params);

struct WScalar {
  double w = 0.0;
  bool clamped = false;  // S − VSV indefinite; w forced to 0
};

/// w = √(λ_min(S − VSV) / λ_max(S)) with S = C Σ Cᵀ + R.
WScalar w_scalar(const Mat& sigma, const Mat& C, const Mat& R, const Mat& V);

/// 11ᵀ + diag{(1−γ̄_i)/γ̄_i}·blockdiag{1_{d_i}1_{d_i}ᵀ}.
Mat weight_matrix(const std::vector<double>& gamma, const std::vector<Eigen::Index>& dims);

/// A X Aᵀ + Q − A X Hᵀ [𝒲 ⊙ (H X Hᵀ + I)]⁻¹ H X Aᵀ with H_i = R_i^{-1/2} C_i w.
Mat mare_g(const Mat& X, const BoundParams& params, double w);

struct IterateOptions {
  std::size_t steps = 20000;  // number of g applications
  bool recompute_w = true;
  double fixed_w = 1.0;  // used when recompute_w is false
  double tol = 1e-10;
  double divergence_trace = 1e12;
  bool stop_on_convergence = true;
};

struct BoundSequence {
  std::vector<Mat> iterates;  // 𝒱_0, 𝒱_1, ...
  std::vector<double> w;      // w used to produce iterate k+1 from iterate k
  bool converged = false;
  bool diverged = false;
  std::optional<std::size_t> converged_at;
  std::optional<Mat> fixed_point;
  std::vector<std::string> warnings;

  std::vector<double> traces() const;
};

/// Iterates 𝒱_{k+1} = g(𝒱_k) from `initial`. With recompute_w, δ_N (from params.step) and
/// w are refreshed from the current iterate; otherwise params.distortion and fixed_w are used.
BoundSequence iterate_bound(const Mat& initial, BoundParams params, const IterateOptions& opts);

struct MahlerReport {
  double measure = 1.0;  // Π max(|λ_i|, 1)
  double entropy = 0.0;  // ln of the measure
};
MahlerReport mahler_entropy(const Mat& A);

struct CapacityReport {
  double capacity = 0.0;
  double entropy = 0.0;
  double measure = 1.0;
  bool holds = false;
};
CapacityReport capacity_condition(const Mat& A, const std::vector<double>& gamma);

struct PbhReport {
  bool holds = true;
  std::vector<std::complex<double>> unit_circle_eigenvalues;
  std::vector<bool> full_rank;  // per unit-circle eigenvalue
};
/// Rank test of [A − λI, 𝓑] at eigenvalues with ||λ| − 1| < 1e−8, 𝓑𝓑ᵀ = Qeff.
PbhReport pbh_unit_circle(const Mat& A, const Mat& Qeff);

struct StabilityCheck {
  bool holds = false;
  double margin = 0.0;  // λ_min of left minus right side
};
/// Evaluates Σ̆ − (A − KΓ̄H)Σ̆(A − KΓ̄H)ᵀ − K{[R̆_γ·blockdiag(11ᵀ)] ⊙ (HΣ̆Hᵀ)}Kᵀ ≻ 0
/// for a candidate (Σ̆, K), with Γ̄ = blockdiag{γ̄_i I} and R̆_γ = blockdiag{γ̄_i(1−γ̄_i) I}.
StabilityCheck check_stability_inequality(const Mat& A, const Mat& sigma, const Mat& K,
                                          const std::vector<double>& gamma, const Mat& H,
                                          const std::vector<Eigen::Index>& dims);

struct KappaReport {
  double kappa = 0.0;
  double margin = 0.0;  // λ_min(KᵀK − κ̄I)
  bool holds = false;
  std::vector<std::string> warnings;
};
/// κ̄ = λ_min(Qeff)²·λ_min(C Cᵀ) / λ_max(C Pᵉ Cᵀ + R)², and whether KᵀK ⪰ κ̄I for
/// K = Pᵉ Cᵀ (C Pᵉ Cᵀ + R)⁻¹.
KappaReport kappa_bound(const Mat& Qeff, const Mat& C, const Mat& Pe, const Mat& R);

struct DominationReport {
  Mat lhs;             // R̆_dec + s·E[v̆ĕᵀ + ĕv̆ᵀ], Monte Carlo
  Mat rhs_channel;     // blockdiag{γ²(s²δ_N + |s|η + δ_N/(|s|η))(C_iΣC_iᵀ + R_i)}
  Mat rhs_stacked;     // V(C̆ΣC̆ᵀ + R̆)V
  double slack = 0.0;  // 3·‖entrywise standard error of lhs‖_F
  double margin_first = 0.0;   // λ_min(rhs_channel − lhs)
  double margin_second = 0.0;  // λ_min(rhs_stacked − rhs_channel)
  bool holds = false;
};
/// Draws prediction errors x̃ ~ N(0, Σ) and noise v through the real quantizer at the
/// prediction point (reference term C·x̂) and checks both dominations within `slack`.
DominationReport noise_domination_check(const Mat& sigma, const std::vector<SensorModel>& sensors,
                          const CodecConfig& codec, const std::vector<bool>& received,
                          std::size_t samples, RandomStream& rng);

/// Columns: k, trace.
void write_bound_csv(std::ostream& os, const BoundSequence& seq);

}  // namespace ppfe
