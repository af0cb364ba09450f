#include "ppfe/harness.hpp"

#include <omp.h>

#include <cmath>
#include <exception>
#include <limits>

namespace ppfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Per-trial quantities needed by the aggregate; one slot per trial.
struct TrialSummary {
  std::vector<double> sq_legit;
  std::vector<double> sq_eve;
  std::vector<Vec> prediction_error;
  std::vector<Vec> eve_error;
  std::optional<std::size_t> eve_diverged_at;
  std::vector<CriticalEvent> events;
};

TrialSummary summarize(const Scenario& sc, std::size_t trial) {
  TrialResult t = run_trial(sc, trial);
  TrialSummary s;
  s.eve_diverged_at = t.eve_diverged_at;
  s.events = std::move(t.events);
  for (std::size_t k = 0; k < sc.horizon; ++k) {
    const Vec& x = t.states[k];
    s.sq_legit.push_back((x - t.legit_estimate[k]).squaredNorm());
    s.prediction_error.push_back(x - t.legit_prediction[k]);
    const bool diverged = t.eve_diverged_at && k >= *t.eve_diverged_at;
    s.eve_error.push_back(x - t.eve_estimate[k]);
    s.sq_eve.push_back(diverged ? kInf : s.eve_error.back().squaredNorm());
  }
  return s;
}

/// Folds trial summaries in trial order.
RunResult aggregate(const Scenario& sc, const std::vector<TrialSummary>& slots) {
  const std::size_t H = sc.horizon;
  const Eigen::Index n = sc.model.state_dim();
  const double N = static_cast<double>(slots.size());
  RunResult r;
  r.trials = slots.size();
  r.horizon = H;
  r.mse_legit.assign(H, 0.0);
  r.mse_eve.assign(H, 0.0);
  r.eve_saturated.assign(H, false);
  r.emp_prediction_cov.assign(H, Mat::Zero(n, n));
  r.emp_prediction_trace.assign(H, 0.0);
  r.emp_prediction_trace_se.assign(H, 0.0);
  r.eve_mean_error_norm.assign(H, 0.0);

  std::vector<double> trace_sq(H, 0.0);
  std::vector<Vec> eve_mean(H, Vec::Zero(n));
  for (const auto& s : slots) {
    for (std::size_t k = 0; k < H; ++k) {
      r.mse_legit[k] += s.sq_legit[k];
      const Vec& e = s.prediction_error[k];
      r.emp_prediction_cov[k] += e * e.transpose();
      const double tr = e.squaredNorm();
      r.emp_prediction_trace[k] += tr;
      trace_sq[k] += tr * tr;
      if (std::isinf(s.sq_eve[k])) {
        r.eve_saturated[k] = true;
      } else {
        r.mse_eve[k] += s.sq_eve[k];
        eve_mean[k] += s.eve_error[k];
      }
    }
    r.eve_diverged_at.push_back(s.eve_diverged_at);
    r.events.insert(r.events.end(), s.events.begin(), s.events.end());
  }
  for (std::size_t k = 0; k < H; ++k) {
    r.mse_legit[k] /= N;
    r.emp_prediction_cov[k] /= N;
    const double mean = r.emp_prediction_trace[k] / N;
    r.emp_prediction_trace[k] = mean;
    const double var = slots.size() > 1 ? std::max(0.0, (trace_sq[k] / N - mean * mean) * N / (N - 1.0)) : 0.0;
    r.emp_prediction_trace_se[k] = std::sqrt(var / N);
    if (r.eve_saturated[k]) {
      r.mse_eve[k] = kInf;
      r.eve_mean_error_norm[k] = kInf;
    } else {
      r.mse_eve[k] /= N;
      r.eve_mean_error_norm[k] = (eve_mean[k] / N).norm();
    }
  }
  return r;
}

}  // namespace

RunResult run_monte_carlo(const Scenario& sc, const MonteCarloOptions& options) {
  sc.validate();
  const auto trials = static_cast<std::int64_t>(sc.trials);
  std::vector<TrialSummary> slots(sc.trials);
  std::vector<std::exception_ptr> errors(sc.trials);
  const int workers = options.workers > 0 ? options.workers : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t t = 0; t < trials; ++t) {
    try {
      slots[t] = summarize(sc, static_cast<std::size_t>(t));
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  RunResult r = aggregate(sc, slots);
  if (options.with_bound) r.bound = scenario_bound(sc);
  return r;
}

RunResult run_monte_carlo_serial(const Scenario& sc, bool with_bound) {
  sc.validate();
  std::vector<TrialSummary> slots;
  slots.reserve(sc.trials);
  for (std::size_t t = 0; t < sc.trials; ++t) slots.push_back(summarize(sc, t));
  RunResult r = aggregate(sc, slots);
  if (with_bound) r.bound = scenario_bound(sc);
  return r;
}

}  // namespace ppfe
