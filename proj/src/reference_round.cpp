#include "hdt/protocol.hpp"
#include "protocol_internal.hpp"

namespace hdt::reference {

RoundResult run_round(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                      Variant variant, std::uint64_t seed, const RoundOptions& options) {
  detail::validate_bits(bits, pair);
  detail::validate_fault(options.fault, pair);
  const std::size_t n = pair.n();

  Rng rng(seed);
  const auto perm = draw_permutation(n, rng);

  RoundTranscript tr;
  tr.n = n;
  tr.t = pair.t();
  tr.variant = variant;
  tr.seed = seed;

  auto transmit = [&](ChannelFrame frame) {
    if (options.fault && options.fault->frame == frame.ordinal) {
      const auto ch = options.fault->channel;
      frame.symbols.set(ch, add_mod(frame.symbols[ch], options.fault->delta, kProtocolModulus));
    }
    if (options.record) tr.frames.push_back(frame);
    return frame;
  };

  std::vector<Residue> x(bits.begin(), bits.end());
  const auto first = transmit(encode(ResidueVector(kProtocolModulus, x), pair));
  const auto base = decode(first, pair);
  std::vector<ReceiverState> states;
  for (std::size_t i = 0; i < n; ++i) states.push_back(start_receiver(i, base[i], variant));
  if (options.record) {
    tr.bases.assign(base.entries().begin(), base.entries().end());
    tr.observations.assign(n, {});
  }

  std::size_t violations = 0;
  std::size_t ordinal = 0;
  auto repeat = [&](std::size_t p, Residue value) {
    auto frame = encode(detail::with_coordinate(bits, p, value), pair);
    frame.kind = ChannelFrame::Kind::repetition;
    frame.ordinal = ++ordinal;
    auto observed = decode(transmit(std::move(frame)), pair);
    if (options.record) {
      for (std::size_t i = 0; i < n; ++i) tr.observations[i].push_back(observed[i]);
    }
    return observed;
  };

  for (auto p : perm) {
    if (bits[p] == 0) continue;
    if (variant == Variant::subtractive) {
      auto observed = repeat(p, 0);
      for (std::size_t i = 0; i < n; ++i) {
        if (!detail::step_subtractive(states[i], observed[i])) ++violations;
      }
    } else {
      std::vector<std::vector<Residue>> six(n, std::vector<Residue>(6));
      for (Residue v = 0; v < kProtocolModulus; ++v) {
        auto observed = repeat(p, v);
        for (std::size_t i = 0; i < n; ++i) six[i][v] = observed[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!detail::step_periodic(states[i], six[i])) ++violations;
      }
    }
  }
  tr.frame_count = ordinal + 1;
  return detail::finish_round(std::move(tr), states, violations);
}

}  // namespace hdt::reference
