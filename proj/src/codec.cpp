#include "ppfe/codec.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace ppfe {

namespace {

constexpr double kGainLimit = 1e300;
// Largest magnitude at which every integer is exactly representable in a double.
constexpr double kLatticeLimit = 9007199254740992.0;

}  // namespace

void CodecParams::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("delta must be > 0");
  if (scale == 0.0 || !std::isfinite(scale)) throw std::invalid_argument("s must be nonzero");
  if (!(growth > 0.0) || !std::isfinite(growth)) throw std::invalid_argument("a must be > 0");
}

CodecParams CodecConfig::channel(std::size_t i) const {
  return CodecParams{growth.at(i), step.at(i), scale, transparent};
}

void CodecConfig::validate(std::size_t channels) const {
  if (growth.size() != channels || step.size() != channels) {
    throw DimensionError("codec parameter arrays must have one entry per channel");
  }
  for (std::size_t i = 0; i < channels; ++i) channel(i).validate();
}

CodecState CodecState::bootstrap(Eigen::Index dim) { return CodecState{0, Vec::Zero(dim), false}; }

QuantizedVector quantize(const Vec& input, double step, RandomStream& rng) {
  if (!(step > 0.0)) throw std::invalid_argument("quantization step must be > 0");
  if (!input.allFinite()) throw NumericError("quantizer input is not finite");
  QuantizedVector out{Vec(input.size()), std::vector<std::int64_t>(input.size()),
                      Vec(input.size())};
  for (Eigen::Index l = 0; l < input.size(); ++l) {
    const double scaled = input(l) / step;
    const double d = std::floor(scaled);
    if (std::abs(d) + 1.0 >= kLatticeLimit) {
      throw OverflowError("quantizer input exceeds the exactly representable lattice range");
    }
    const double q = scaled - d;
    const bool up = rng.uniform() < q;
    const auto index = static_cast<std::int64_t>(d) + (up ? 1 : 0);
    out.lattice[l] = index;
    out.value(l) = static_cast<double>(index) * step;
    out.fraction(l) = q;
  }
  return out;
}

double reference_gain(double growth, std::size_t steps) {
  if (steps == 0) return 1.0;
  if (static_cast<double>(steps) * std::log(growth) > std::log(kGainLimit)) {
    throw OverflowError("reference gain a^" + std::to_string(steps) + " with a=" +
                        std::to_string(growth) + " exceeds 1e300");
  }
  return std::pow(growth, static_cast<double>(steps));
}

Vec encoder_input(const CodecState& state, const CodecParams& params, const Vec& y, std::size_t k) {
  if (k < state.t_ref) throw std::invalid_argument("encode step precedes the reference time");
  linalg::require_size(state.y_ref, y.size(), "codec reference");
  return (y - reference_gain(params.growth, k - state.t_ref) * state.y_ref) / params.scale;
}

EncodedPacket encode(const CodecState& state, const CodecParams& params, const Vec& y,
                     std::size_t k, RandomStream& rng, std::size_t channel) {
  const Vec input = encoder_input(state, params, y, k);
  EncodedPacket p;
  p.k = k;
  p.channel = channel;
  p.step = params.step;
  if (params.transparent) {
    if (!input.allFinite()) throw NumericError("encoder input is not finite");
    p.z = input;
    p.fraction = Vec::Zero(input.size());
    return p;
  }
  QuantizedVector q = quantize(input, params.step, rng);
  p.z = std::move(q.value);
  p.lattice = std::move(q.lattice);
  p.fraction = std::move(q.fraction);
  return p;
}

DecodeResult decode(const CodecState& state, const CodecParams& params, const Vec& z,
                    std::size_t k) {
  if (k < state.t_ref) throw std::invalid_argument("decode step precedes the reference time");
  linalg::require_size(state.y_ref, z.size(), "codec reference");
  Vec value = z * params.scale + reference_gain(params.growth, k - state.t_ref) * state.y_ref;
  CodecState next{k, value, true};
  return {std::move(value), std::move(next)};
}

CodecState ack(const CodecState& state, const Vec& decoded, std::size_t k) {
  if (k < state.t_ref) throw std::invalid_argument("ack step precedes the reference time");
  return CodecState{k, decoded, true};
}

DecodeResult eavesdrop_decode(const CodecState& state, const CodecParams& params, const Vec& z,
                              std::size_t k) {
  return decode(state, params, z, k);
}

EavesdropperDecoder::EavesdropperDecoder(EavesdropperPolicy policy, Eigen::Index dim)
    : policy_(policy), state_(CodecState::bootstrap(dim)) {}

std::optional<Vec> EavesdropperDecoder::step(const CodecParams& params, std::size_t k,
                                             bool legit_received, bool intercepted, const Vec& z) {
  std::optional<Vec> out;
  if (intercepted) {
    DecodeResult d = eavesdrop_decode(state_, params, z, k);
    out = d.value;
    if (policy_ == EavesdropperPolicy::OwnHistory) state_ = std::move(d.state);
  }
  if (policy_ == EavesdropperPolicy::OverhearAck && legit_received) {
    // Knows the new reference time; the value is only known if intercepted.
    state_ = CodecState{k, out ? *out : state_.y_ref, true};
  }
  return out;
}

std::string serialize_packet(const EncodedPacket& packet) {
  if (packet.lattice.size() != static_cast<std::size_t>(packet.z.size())) {
    throw std::invalid_argument("only lattice packets can be serialized");
  }
  char delta[32];
  std::snprintf(delta, sizeof delta, "%.17g", packet.step);
  std::ostringstream os;
  os << packet.k << ',' << packet.channel << ',' << delta;
  for (auto d : packet.lattice) os << ',' << d;
  return os.str();
}

EncodedPacket parse_packet(const std::string& line) {
  std::istringstream is(line);
  std::string field;
  std::vector<std::string> fields;
  while (std::getline(is, field, ',')) fields.push_back(field);
  if (fields.size() < 4) throw std::invalid_argument("packet needs k, channel, delta and data");
  EncodedPacket p;
  p.k = std::stoull(fields[0]);
  p.channel = std::stoull(fields[1]);
  p.step = std::stod(fields[2]);
  if (!(p.step > 0.0)) throw std::invalid_argument("packet delta must be > 0");
  const auto n = static_cast<Eigen::Index>(fields.size() - 3);
  p.z.resize(n);
  p.fraction = Vec::Zero(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const std::int64_t d = std::stoll(fields[static_cast<std::size_t>(l) + 3]);
    p.lattice.push_back(d);
    p.z(l) = static_cast<double>(d) * p.step;
  }
  return p;
}

}  // namespace ppfe
