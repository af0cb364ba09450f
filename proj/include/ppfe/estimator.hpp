#pragma once

#include "ppfe/codec.hpp"
#include "ppfe/linalg.hpp"
#include "ppfe/model.hpp"

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

namespace ppfe {

enum class FilterPhase { Initial, Predicted, Updated };

/// Estimate and filter covariance. The initial state (x̄0, P̄0) acts as the prior of step 0.
struct FilterState {
  Vec x;
  Mat P;
  std::size_t k = 0;
  FilterPhase phase = FilterPhase::Initial;

  static FilterState initial(const SystemModel& model);
};

/// How the decoding-error covariance of a received packet is modeled.
enum class DecodeNoise {
  Bound,     // s²·δ²/4 per component (decoder-side information only)
  Realized,  // s²·q(1−q)·δ² from encoder-reported fractions
  None,      // transparent codec
};

/// Measurements of the received channels stacked in channel order.
struct AugmentedMeasurement {
  std::vector<std::size_t> channels;
  Vec y;
  Mat C;
  Mat R;     // blockdiag of E_i R_i E_iᵀ
  Mat Rdec;  // blockdiag of the decoding-error covariances

  bool empty() const { return channels.empty(); }
};

FilterState predict(const FilterState& state, const SystemModel& model, const Vec& u);

/// `decoded[i]` must be present exactly when `received[i]` is true. `fractions`, when
/// given, holds the encoder-side q per channel and is used by DecodeNoise::Realized.
AugmentedMeasurement build_augmented(const std::vector<bool>& received,
                                     const std::vector<std::optional<Vec>>& decoded,
                                     const std::vector<SensorModel>& sensors,
                                     const CodecConfig& codec, DecodeNoise mode,
                                     const std::vector<Vec>* fractions = nullptr);

/// Kalman-style fusion of the stacked measurement. The decoding-error covariance enters
/// once, as K·Rdec·Kᵀ. Throws NumericError naming the channels when the innovation
/// covariance is singular or has condition number above 1e12.
FilterState update(const FilterState& state, const AugmentedMeasurement& aug);

struct FilterRun {
  std::vector<FilterState> predicted;  // x̂_{k|k−1}, P_{k|k−1}; entry 0 is the prior
  std::vector<FilterState> updated;    // x̂_{k|k}, P_{k|k}
};

/// Runs the fusion filter over `decoded[k][i]` (absent = not received) for k = 0..H−1.
/// The same routine serves the legitimate user and the eavesdropper.
FilterRun run_filter(const SystemModel& model, const std::vector<SensorModel>& sensors,
                     const CodecConfig& codec,
                     const std::vector<std::vector<std::optional<Vec>>>& decoded,
                     DecodeNoise mode = DecodeNoise::Bound);

/// Columns: k, x_1..x_n, P_11..P_nn, trace_P.
void write_filter_csv(std::ostream& os, const std::vector<FilterState>& states);

}  // namespace ppfe
