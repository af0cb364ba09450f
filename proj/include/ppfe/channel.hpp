#pragma once

#include "ppfe/linalg.hpp"
#include "ppfe/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

namespace ppfe {

/// Per-channel reception probabilities of the authorized link and interception
/// probabilities of the wiretap link.
struct ChannelModel {
  std::vector<double> authorized;
  std::vector<double> wiretap;

  std::size_t channels() const { return authorized.size(); }
  void validate() const;
};

/// Binary outcomes, one row per channel, one column per step.
class OutcomeTrace {
 public:
  OutcomeTrace() = default;
  OutcomeTrace(std::size_t channels, std::size_t horizon, bool authorized_value = false,
               bool wiretap_value = false);

  std::size_t channels() const { return channels_; }
  std::size_t horizon() const { return horizon_; }

  bool received(std::size_t channel, std::size_t k) const { return auth_[index(channel, k)] != 0; }
  bool intercepted(std::size_t channel, std::size_t k) const {
    return wire_[index(channel, k)] != 0;
  }
  void set_received(std::size_t channel, std::size_t k, bool v) { auth_[index(channel, k)] = v; }
  void set_intercepted(std::size_t channel, std::size_t k, bool v) {
    wire_[index(channel, k)] = v;
  }

  bool operator==(const OutcomeTrace&) const = default;

 private:
  std::size_t index(std::size_t channel, std::size_t k) const;

  std::size_t channels_ = 0;
  std::size_t horizon_ = 0;
  std::vector<std::uint8_t> auth_;
  std::vector<std::uint8_t> wire_;
};

/// γ_{i,k} ~ Bernoulli(authorized_i), γᵉ_{i,k} ~ Bernoulli(wiretap_i), all independent.
OutcomeTrace sample_outcomes(const ChannelModel& chan, std::size_t horizon,
                             RandomStream& authorized, RandomStream& wiretap);
OutcomeTrace sample_outcomes(const ChannelModel& chan, std::size_t horizon,
                             std::uint64_t master_seed, std::uint64_t trial = 0);

/// Erasure: an absent value marks a dropped packet (never confused with a zero payload).
std::optional<Vec> erase(bool outcome, const Vec& payload);

/// −½·ln(1 − p). Returns +inf for p = 1; throws std::invalid_argument outside (0, 1].
double channel_capacity(double reception_probability);
double total_capacity(std::span<const double> reception_probabilities);

/// Columns: k, gamma_1..gamma_M, gamma_e_1..gamma_e_M.
void write_outcome_csv(std::ostream& os, const OutcomeTrace& trace);

}  // namespace ppfe
