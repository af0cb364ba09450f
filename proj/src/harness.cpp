#include "ppfe/harness.hpp"

#include "ppfe/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ppfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec nan_vector(Eigen::Index n) { return Vec::Constant(n, std::numeric_limits<double>::quiet_NaN()); }

}  // namespace

void Scenario::validate() const {
  model.validate();
  if (sensors.empty()) throw std::invalid_argument("scenario needs at least one sensor");
  for (const auto& s : sensors) s.validate(model.state_dim());
  channel.validate();
  if (channel.channels() != sensors.size()) {
    throw DimensionError("channel probabilities need one entry per sensor");
  }
  codec.validate(sensors.size());
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (outcome_override &&
      (outcome_override->channels() != sensors.size() || outcome_override->horizon() != horizon)) {
    throw DimensionError("outcome override must be channels x horizon");
  }
}

std::vector<CriticalEvent> detect_critical_events(const OutcomeTrace& trace, std::size_t trial) {
  std::vector<CriticalEvent> events;
  for (std::size_t i = 0; i < trace.channels(); ++i) {
    // Scan backwards so the worst-case flag is known in one pass.
    bool all_later_intercepted = true;
    std::vector<CriticalEvent> channel_events;
    for (std::size_t k = trace.horizon(); k-- > 0;) {
      if (trace.received(i, k) && !trace.intercepted(i, k)) {
        channel_events.push_back({trial, i, k, all_later_intercepted});
      }
      all_later_intercepted = all_later_intercepted && trace.intercepted(i, k);
    }
    events.insert(events.end(), channel_events.rbegin(), channel_events.rend());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const CriticalEvent& a, const CriticalEvent& b) { return a.k < b.k; });
  return events;
}

OutcomeTrace build_worst_case(std::size_t channels, std::size_t horizon, std::size_t channel,
                              std::size_t k_bar) {
  if (channel >= channels) throw std::invalid_argument("worst-case channel out of range");
  if (k_bar >= horizon) throw std::invalid_argument("worst-case step must be < horizon");
  OutcomeTrace t(channels, horizon, true, true);
  t.set_intercepted(channel, k_bar, false);
  return t;
}

TrialResult run_trial(const Scenario& sc, std::size_t trial) {
  sc.validate();
  const std::size_t H = sc.horizon;
  const std::size_t M = sc.channels();
  const Eigen::Index n = sc.model.state_dim();

  const Trajectory traj = simulate_plant(sc.model, sc.sensors, H, sc.seed, trial);
  TrialResult res;
  res.outcomes = sc.outcome_override ? *sc.outcome_override
                                     : sample_outcomes(sc.channel, H, sc.seed, trial);
  res.events = detect_critical_events(res.outcomes, trial);
  RandomStream quantizer(sc.seed, StreamRole::Quantizer, trial);

  std::vector<CodecState> encoder, decoder;
  std::vector<EavesdropperDecoder> eve;
  for (const auto& s : sc.sensors) {
    encoder.push_back(CodecState::bootstrap(s.output_dim()));
    decoder.push_back(CodecState::bootstrap(s.output_dim()));
    eve.emplace_back(sc.policy, s.output_dim());
  }
  const DecodeNoise legit_mode = sc.codec.transparent ? DecodeNoise::None : sc.legit_noise;
  const DecodeNoise eve_mode = sc.codec.transparent ? DecodeNoise::None : DecodeNoise::Bound;

  FilterState legit_prior = FilterState::initial(sc.model);
  FilterState eve_prior = legit_prior;
  res.eve_decode_error.assign(H, std::vector<std::optional<Vec>>(M));
  res.legit_decode_error.assign(H, std::vector<std::optional<Vec>>(M));

  for (std::size_t k = 0; k < H; ++k) {
    std::vector<bool> received(M), intercepted(M);
    std::vector<std::optional<Vec>> legit_values(M), eve_values(M);
    std::vector<Vec> fractions(M);
    for (std::size_t i = 0; i < M; ++i) {
      const CodecParams params = sc.codec.channel(i);
      const Vec& y = traj.measurements[i][k];
      const EncodedPacket packet = encode(encoder[i], params, y, k, quantizer, i);
      fractions[i] = packet.fraction;
      const bool got = res.outcomes.received(i, k);
      if (got) {
        DecodeResult d = decode(decoder[i], params, packet.z, k);
        decoder[i] = d.state;
        encoder[i] = ack(encoder[i], d.value, k);
        res.legit_decode_error[k][i] = d.value - y;
        legit_values[i] = std::move(d.value);
        received[i] = true;
      }
      if (res.eve_diverged_at) continue;
      try {
        auto v = eve[i].step(params, k, got, res.outcomes.intercepted(i, k), packet.z);
        if (v) {
          Vec err = *v - y;
          if (!err.allFinite() || err.norm() > kEveSaturation) {
            res.eve_diverged_at = k;
          } else {
            res.eve_decode_error[k][i] = std::move(err);
            eve_values[i] = std::move(v);
            intercepted[i] = true;
          }
        }
      } catch (const NumericError&) {
        res.eve_diverged_at = k;
      }
    }

    res.states.push_back(traj.states[k]);
    res.legit_prediction.push_back(legit_prior.x);
    const FilterState legit = update(
        legit_prior,
        build_augmented(received, legit_values, sc.sensors, sc.codec, legit_mode, &fractions));
    res.legit_estimate.push_back(legit.x);

    FilterState eve_post;
    if (!res.eve_diverged_at) {
      try {
        eve_post = update(eve_prior, build_augmented(intercepted, eve_values, sc.sensors,
                                                     sc.codec, eve_mode));
        if (!eve_post.x.allFinite()) res.eve_diverged_at = k;
      } catch (const NumericError&) {
        res.eve_diverged_at = k;
      }
    }
    res.eve_estimate.push_back(res.eve_diverged_at ? nan_vector(n) : eve_post.x);

    const Vec& u = sc.model.input.at(k);
    legit_prior = predict(legit, sc.model, u);
    if (!res.eve_diverged_at) eve_prior = predict(eve_post, sc.model, u);
  }
  return res;
}

std::vector<double> RunResult::bound_trace() const {
  std::vector<double> t;
  if (!bound) return t;
  t = bound->traces();
  if (t.size() > horizon) t.resize(horizon);
  t.resize(horizon, kInf);
  return t;
}

BoundSequence scenario_bound(const Scenario& sc) {
  BoundParams params = make_bound_params(sc.model, sc.sensors, sc.channel.authorized, sc.codec);
  IterateOptions opts;
  opts.steps = sc.horizon - 1;
  opts.recompute_w = true;
  opts.stop_on_convergence = false;
  return iterate_bound(sc.model.P0, std::move(params), opts);
}

SecrecyReport secrecy_report(const RunResult& r, const std::vector<double>& growth) {
  SecrecyReport rep;
  const std::vector<double> bound = r.bound_trace();
  if (bound.empty()) {
    rep.detail += "no bound sequence; criterion (i) not evaluated. ";
  } else {
    rep.bounded = !r.bound->diverged;
    rep.worst_excess = -kInf;
    for (std::size_t k = 0; k < r.horizon; ++k) {
      const double excess =
          r.emp_prediction_trace[k] - bound[k] - 3.0 * r.emp_prediction_trace_se[k];
      rep.worst_excess = std::max(rep.worst_excess, excess);
      if (!(excess <= 0.0) && !rep.first_violation) rep.first_violation = k;
    }
    if (rep.first_violation) rep.bounded = false;
    if (r.bound->diverged) rep.detail += "bound sequence diverged. ";
  }

  rep.saturated = std::any_of(r.eve_diverged_at.begin(), r.eve_diverged_at.end(),
                              [](const auto& d) { return d.has_value(); });
  double min_growth = kInf;
  for (double a : growth) {
    if (a > 1.0) min_growth = std::min(min_growth, a);
  }
  if (rep.saturated) {
    rep.eavesdropper_diverges = true;
    rep.detail += "eavesdropper decode error saturated. ";
  } else if (std::isinf(min_growth)) {
    rep.detail += "no channel with a > 1. ";
  } else {
    rep.required_slope = std::log(min_growth) - 0.05;
    std::optional<std::size_t> first;
    for (const auto& e : r.events) {
      if (growth[e.channel] > 1.0 && (!first || e.k < *first)) first = e.k;
    }
    if (!first) {
      rep.detail += "no critical event on a channel with a > 1. ";
    } else {
      std::vector<double> ks, logs;
      for (std::size_t k = *first + 2; k < r.horizon; ++k) {
        const double v = r.eve_mean_error_norm[k];
        if (std::isfinite(v) && v > 0.0) {
          ks.push_back(static_cast<double>(k));
          logs.push_back(std::log(v));
        }
      }
      if (ks.size() >= 3) {
        const double n = static_cast<double>(ks.size());
        double mk = 0, ml = 0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
          mk += ks[j] / n;
          ml += logs[j] / n;
        }
        double sxy = 0, sxx = 0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
          sxy += (ks[j] - mk) * (logs[j] - ml);
          sxx += (ks[j] - mk) * (ks[j] - mk);
        }
        rep.slope = sxy / sxx;
        rep.eavesdropper_diverges = *rep.slope >= *rep.required_slope;
      } else {
        rep.detail += "post-event window too short for a slope fit. ";
      }
    }
  }
  return rep;
}

void write_mse_csv(std::ostream& os, const RunResult& r) {
  const std::vector<double> bound = r.bound_trace();
  os << "k,mse_legit,mse_eve,mse_eve_saturated,trace_emp_cov";
  if (!bound.empty()) os << ",trace_bound";
  os << '\n';
  for (std::size_t k = 0; k < r.horizon; ++k) {
    os << k << ',' << format_double(r.mse_legit[k]) << ',' << format_double(r.mse_eve[k]) << ','
       << (r.eve_saturated[k] ? 1 : 0) << ',' << format_double(r.emp_prediction_trace[k]);
    if (!bound.empty()) os << ',' << format_double(bound[k]);
    os << '\n';
  }
}

void write_events_csv(std::ostream& os, const std::vector<CriticalEvent>& events) {
  os << "trial,channel,k_bar,worst_case\n";
  for (const auto& e : events) {
    os << e.trial << ',' << e.channel + 1 << ',' << e.k << ',' << (e.worst_case ? 1 : 0) << '\n';
  }
}

void write_summary(std::ostream& os, const Scenario& sc, const RunResult& r,
                   const SecrecyReport& rep) {
  std::size_t diverged = 0;
  for (const auto& d : r.eve_diverged_at) diverged += d ? 1 : 0;
  os << "scenario: " << sc.name << '\n'
     << "trials: " << r.trials << ", horizon: " << r.horizon << ", seed: " << sc.seed << '\n'
     << "final legitimate MSE: " << format_double(r.mse_legit.back()) << '\n'
     << "final eavesdropper MSE: " << format_double(r.mse_eve.back()) << '\n'
     << "trials with diverged eavesdropper: " << diverged << '\n'
     << "critical events: " << r.events.size() << '\n'
     << "criterion (i) bounded legitimate covariance: " << (rep.bounded ? "pass" : "fail");
  if (r.bound) os << " (worst excess " << format_double(rep.worst_excess) << ")";
  os << '\n' << "criterion (ii) eavesdropper divergence: "
     << (rep.eavesdropper_diverges ? "pass" : "fail");
  if (rep.slope) {
    os << " (slope " << format_double(*rep.slope) << ", required "
       << format_double(*rep.required_slope) << ")";
  }
  os << '\n';
  if (!rep.detail.empty()) os << "notes: " << rep.detail << '\n';
  if (r.bound) {
    for (const auto& w : r.bound->warnings) os << "warning: " << w << '\n';
  }
}

std::vector<std::string> preset_names() {
  return {"three-tank-groupA1", "three-tank-groupA2", "three-tank-groupA3",
          "three-tank-groupD1", "three-tank-groupD2", "three-tank-groupD3"};
}

Scenario scenario_preset(const std::string& name) {
  struct Group {
    const char* name;
    std::vector<double> growth;
    std::vector<double> step;
  };
  static const std::vector<Group> groups = {
      {"three-tank-groupA1", {0.5, 0.5, 5.0}, {0.01, 0.01, 0.01}},
      {"three-tank-groupA2", {0.5, 5.0, 5.0}, {0.01, 0.01, 0.01}},
      {"three-tank-groupA3", {0.5, 0.5, 10.0}, {0.01, 0.01, 0.01}},
      {"three-tank-groupD1", {5.0, 5.0, 5.0}, {0.1, 0.1, 0.1}},
      {"three-tank-groupD2", {5.0, 5.0, 5.0}, {0.1, 0.01, 0.001}},
      {"three-tank-groupD3", {5.0, 5.0, 5.0}, {0.001, 0.001, 0.001}},
  };
  for (const auto& g : groups) {
    if (name != g.name) continue;
    PlantPreset plant = three_tank_preset();
    Scenario sc;
    sc.name = name;
    sc.model = std::move(plant.model);
    sc.sensors = std::move(plant.sensors);
    sc.channel = ChannelModel{{0.9, 0.95, 0.85}, {0.9, 0.85, 0.95}};
    sc.codec = CodecConfig{g.growth, g.step, 1.0, false};
    sc.horizon = 500;
    sc.trials = 200;
    return sc;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

}  // namespace ppfe
