#include "ppfe/estimator.hpp"

#include "ppfe/format.hpp"

#include <sstream>
#include <stdexcept>

namespace ppfe {

namespace {

constexpr double kConditionLimit = 1e12;

std::string channel_list(const std::vector<std::size_t>& channels) {
  std::ostringstream os;
  for (std::size_t j = 0; j < channels.size(); ++j) os << (j ? "," : "") << channels[j] + 1;
  return os.str();
}

}  // namespace

FilterState FilterState::initial(const SystemModel& model) {
  return FilterState{model.x0_mean, model.P0, 0, FilterPhase::Initial};
}

FilterState predict(const FilterState& state, const SystemModel& model, const Vec& u) {
  linalg::require_size(state.x, model.state_dim(), "estimate");
  linalg::require_size(u, model.B.cols(), "input");
  FilterState next;
  next.x = model.A * state.x + model.B * u;
  next.P = linalg::symmetrize(model.A * state.P * model.A.transpose() +
                              model.effective_process_cov());
  next.k = state.k + 1;
  next.phase = FilterPhase::Predicted;
  return next;
}

AugmentedMeasurement build_augmented(const std::vector<bool>& received,
                                     const std::vector<std::optional<Vec>>& decoded,
                                     const std::vector<SensorModel>& sensors,
                                     const CodecConfig& codec, DecodeNoise mode,
                                     const std::vector<Vec>* fractions) {
  const std::size_t m = sensors.size();
  if (received.size() != m || decoded.size() != m) {
    throw DimensionError("outcomes and decoded values must have one entry per sensor");
  }
  if (mode != DecodeNoise::None && codec.channels() != m) {
    throw DimensionError("codec parameters must have one entry per sensor");
  }
  if (mode == DecodeNoise::Realized && (fractions == nullptr || fractions->size() != m)) {
    throw std::invalid_argument("realized decode noise needs per-channel quantizer fractions");
  }

  AugmentedMeasurement aug;
  Eigen::Index rows = 0;
  Eigen::Index cols = sensors.empty() ? 0 : sensors.front().C.cols();
  for (std::size_t i = 0; i < m; ++i) {
    if (received[i] != decoded[i].has_value()) {
      throw std::invalid_argument("decoded value present/absent mismatch on channel " +
                                  std::to_string(i + 1));
    }
    if (received[i]) {
      aug.channels.push_back(i);
      rows += sensors[i].output_dim();
    }
  }
  aug.y = Vec::Zero(rows);
  aug.C = Mat::Zero(rows, cols);
  aug.R = Mat::Zero(rows, rows);
  aug.Rdec = Mat::Zero(rows, rows);

  Eigen::Index r = 0;
  for (std::size_t i : aug.channels) {
    const SensorModel& s = sensors[i];
    const Eigen::Index d = s.output_dim();
    linalg::require_size(*decoded[i], d, "decoded measurement");
    aug.y.segment(r, d) = *decoded[i];
    aug.C.middleRows(r, d) = s.C;
    aug.R.block(r, r, d, d) = s.noise_cov();
    if (mode != DecodeNoise::None) {
      const CodecParams p = codec.channel(i);
      const double s2 = p.scale * p.scale;
      const double d2 = p.step * p.step;
      Vec var(d);
      if (mode == DecodeNoise::Bound) {
        var.setConstant(s2 * d2 / 4.0);
      } else {
        const Vec& q = (*fractions)[i];
        linalg::require_size(q, d, "quantizer fractions");
        var = s2 * d2 * q.array() * (1.0 - q.array());
      }
      aug.Rdec.block(r, r, d, d) = var.asDiagonal();
    }
    r += d;
  }
  return aug;
}

FilterState update(const FilterState& state, const AugmentedMeasurement& aug) {
  if (state.phase == FilterPhase::Updated) {
    throw std::logic_error("update called twice without an intervening predict");
  }
  FilterState next = state;
  next.phase = FilterPhase::Updated;
  if (aug.empty()) return next;

  const Mat PCt = state.P * aug.C.transpose();
  const Mat S = linalg::symmetrize(aug.C * PCt + aug.R);
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kConditionLimit) {
    throw NumericError("innovation covariance is singular or ill-conditioned (channels " +
                       channel_list(aug.channels) + ")");
  }
  Eigen::LLT<Mat> llt(S);
  const Mat K = llt.solve(PCt.transpose()).transpose();
  next.x = state.x + K * (aug.y - aug.C * state.x);
  next.P = linalg::symmetrize(state.P - K * S * K.transpose() + K * aug.Rdec * K.transpose());
  return next;
}

FilterRun run_filter(const SystemModel& model, const std::vector<SensorModel>& sensors,
                     const CodecConfig& codec,
                     const std::vector<std::vector<std::optional<Vec>>>& decoded,
                     DecodeNoise mode) {
  FilterRun run;
  run.predicted.reserve(decoded.size());
  run.updated.reserve(decoded.size());
  FilterState prior = FilterState::initial(model);
  for (std::size_t k = 0; k < decoded.size(); ++k) {
    if (k > 0) prior = predict(run.updated.back(), model, model.input.at(k - 1));
    std::vector<bool> received(decoded[k].size());
    for (std::size_t i = 0; i < received.size(); ++i) received[i] = decoded[k][i].has_value();
    run.predicted.push_back(prior);
    run.updated.push_back(
        update(prior, build_augmented(received, decoded[k], sensors, codec, mode)));
  }
  return run;
}

void write_filter_csv(std::ostream& os, const std::vector<FilterState>& states) {
  const Eigen::Index n = states.empty() ? 0 : states.front().x.size();
  os << "k";
  for (Eigen::Index j = 0; j < n; ++j) os << ",x_" << j + 1;
  for (Eigen::Index j = 0; j < n; ++j) os << ",P_" << j + 1 << j + 1;
  os << ",trace_P\n";
  for (const auto& s : states) {
    os << s.k;
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(s.x(j));
    for (Eigen::Index j = 0; j < n; ++j) os << ',' << format_double(s.P(j, j));
    os << ',' << format_double(s.P.trace()) << '\n';
  }
}

}  // namespace ppfe
