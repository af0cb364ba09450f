#pragma once

#include "ppfe/linalg.hpp"
#include "ppfe/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ppfe {

/// Encoding parameters of one channel: z = Q_δ((y − a^{k−t}·y_ref) / s).
struct CodecParams {
  double growth = 1.0;  // a_i
  double step = 0.01;   // δ_i
  double scale = 1.0;   // s
  /// Test-only identity quantizer (zero encoding error).
  bool transparent = false;

  void validate() const;
};

/// Codec parameters for all channels; `scale` is shared.
struct CodecConfig {
  std::vector<double> growth;
  std::vector<double> step;
  double scale = 1.0;
  bool transparent = false;

  std::size_t channels() const { return growth.size(); }
  CodecParams channel(std::size_t i) const;
  void validate(std::size_t channels) const;
};

/// Reference bookkeeping shared by an encoder and the decoder that mirrors it.
/// Bootstrap (before any reception): t_ref = 0, y_ref = 0.
struct CodecState {
  std::size_t t_ref = 0;
  Vec y_ref;
  bool initialized = false;

  static CodecState bootstrap(Eigen::Index dim);
  bool operator==(const CodecState& o) const {
    return t_ref == o.t_ref && initialized == o.initialized && y_ref == o.y_ref;
  }
};

struct QuantizedVector {
  Vec value;                          // lattice points d·δ
  std::vector<std::int64_t> lattice;  // d per component
  Vec fraction;                       // q per component, in [0, 1)
};

/// Probabilistic uniform quantizer: with d = floor(z̄/δ), q = z̄/δ − d, returns d·δ with
/// probability 1 − q and (d+1)·δ with probability q. One uniform draw per component.
QuantizedVector quantize(const Vec& input, double step, RandomStream& rng);

struct EncodedPacket {
  std::size_t k = 0;
  std::size_t channel = 0;
  Vec z;
  std::vector<std::int64_t> lattice;  // empty for transparent packets
  double step = 0.0;
  Vec fraction;  // encoder-side q; never transmitted
};

/// a^steps, evaluated with an overflow guard at 1e300.
double reference_gain(double growth, std::size_t steps);

/// The real-valued quantizer input (y − a^{k−t}·y_ref) / s.
Vec encoder_input(const CodecState& state, const CodecParams& params, const Vec& y, std::size_t k);

/// Does not touch the reference; the encoder advances only on acknowledgment.
EncodedPacket encode(const CodecState& state, const CodecParams& params, const Vec& y,
                     std::size_t k, RandomStream& rng, std::size_t channel = 0);

struct DecodeResult {
  Vec value;
  CodecState state;
};

/// ȳ = z·s + a^{k−t}·y_ref; the returned state references (k, ȳ).
DecodeResult decode(const CodecState& state, const CodecParams& params, const Vec& z,
                    std::size_t k);

/// Encoder-side mirror of a successful legitimate decode at step k.
CodecState ack(const CodecState& state, const Vec& decoded, std::size_t k);

/// The public decoding formula driven by the eavesdropper's own reception history.
DecodeResult eavesdrop_decode(const CodecState& state, const CodecParams& params, const Vec& z,
                              std::size_t k);

enum class EavesdropperPolicy {
  OwnHistory,   // references advance only on the eavesdropper's own receptions
  OverhearAck,  // reference times follow the overheard legitimate ACKs
};

/// Stateful eavesdropper decoder for one channel.
class EavesdropperDecoder {
 public:
  EavesdropperDecoder(EavesdropperPolicy policy, Eigen::Index dim);

  /// Processes step k. Returns the decoded value when the packet was intercepted.
  std::optional<Vec> step(const CodecParams& params, std::size_t k, bool legit_received,
                          bool intercepted, const Vec& z);

  const CodecState& state() const { return state_; }

 private:
  EavesdropperPolicy policy_;
  CodecState state_;
};

/// "k,channel,delta,d_1,...,d_n" with delta printed to 17 significant digits.
std::string serialize_packet(const EncodedPacket& packet);
/// Inverse of serialize_packet; z is reconstructed as d·δ.
EncodedPacket parse_packet(const std::string& line);

}  // namespace ppfe
