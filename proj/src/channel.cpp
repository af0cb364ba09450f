#include "ppfe/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ppfe {

namespace {

void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " probability must lie in (0, 1], got " +
                                std::to_string(p));
  }
}

}  // namespace

void ChannelModel::validate() const {
  if (authorized.empty()) throw std::invalid_argument("at least one channel is required");
  if (wiretap.size() != authorized.size()) {
    throw DimensionError("authorized and wiretap probability lists differ in length");
  }
  for (double p : authorized) check_probability(p, "reception");
  for (double p : wiretap) check_probability(p, "interception");
}

OutcomeTrace::OutcomeTrace(std::size_t channels, std::size_t horizon, bool authorized_value,
                           bool wiretap_value)
    : channels_(channels),
      horizon_(horizon),
      auth_(channels * horizon, authorized_value ? 1 : 0),
      wire_(channels * horizon, wiretap_value ? 1 : 0) {}

std::size_t OutcomeTrace::index(std::size_t channel, std::size_t k) const {
  if (channel >= channels_ || k >= horizon_) throw std::out_of_range("outcome trace index");
  return channel * horizon_ + k;
}

OutcomeTrace sample_outcomes(const ChannelModel& chan, std::size_t horizon,
                             RandomStream& authorized, RandomStream& wiretap) {
  chan.validate();
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  OutcomeTrace t(chan.channels(), horizon);
  for (std::size_t k = 0; k < horizon; ++k) {
    for (std::size_t i = 0; i < chan.channels(); ++i) {
      t.set_received(i, k, authorized.bernoulli(chan.authorized[i]));
      t.set_intercepted(i, k, wiretap.bernoulli(chan.wiretap[i]));
    }
  }
  return t;
}

OutcomeTrace sample_outcomes(const ChannelModel& chan, std::size_t horizon,
                             std::uint64_t master_seed, std::uint64_t trial) {
  RandomStream a(master_seed, StreamRole::Authorized, trial);
  RandomStream w(master_seed, StreamRole::Wiretap, trial);
  return sample_outcomes(chan, horizon, a, w);
}

std::optional<Vec> erase(bool outcome, const Vec& payload) {
  if (!outcome) return std::nullopt;
  return payload;
}

double channel_capacity(double p) {
  check_probability(p, "reception");
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::log1p(-p);
}

double total_capacity(std::span<const double> ps) {
  double total = 0.0;
  for (double p : ps) total += channel_capacity(p);
  return total;
}

void write_outcome_csv(std::ostream& os, const OutcomeTrace& trace) {
  os << "k";
  for (std::size_t i = 0; i < trace.channels(); ++i) os << ",gamma_" << i + 1;
  for (std::size_t i = 0; i < trace.channels(); ++i) os << ",gamma_e_" << i + 1;
  os << '\n';
  for (std::size_t k = 0; k < trace.horizon(); ++k) {
    os << k;
    for (std::size_t i = 0; i < trace.channels(); ++i) os << ',' << int(trace.received(i, k));
    for (std::size_t i = 0; i < trace.channels(); ++i) os << ',' << int(trace.intercepted(i, k));
    os << '\n';
  }
}

}  // namespace ppfe
