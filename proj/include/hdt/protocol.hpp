#pragma once

// One transmission round over t shared channels, mod 6:
//
//   1. senders put z = xB on the channels (initial frame)
//   2. every receiver decodes x' = zC^T and keeps x'_i
//   3. in a random order pi, for each sender whose bit is 1 the senders
//      re-transmit with that sender's coordinate changed:
//        subtractive: zeroed, one frame per 1-bit
//        periodic:    swept through 0..5, six frames per 1-bit
//   4. each receiver runs a small state machine over its decoded coordinate of
//      every repetition frame and concludes its own bit.
//
// Repetition frames carry no position information; receivers work purely from
// value differences. Rounds are delimited explicitly by the simulator.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdt/pair.hpp"
#include "hdt/residue.hpp"
#include "hdt/rng.hpp"

namespace hdt {

using Bits = std::vector<std::uint8_t>;

enum class Variant { subtractive, periodic };

std::string to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view text);

struct ChannelFrame {
  enum class Kind { initial, repetition };
  Kind kind = Kind::initial;
  std::size_t ordinal = 0;  // index within the round
  ResidueVector symbols;    // t residues mod 6

  friend bool operator==(const ChannelFrame&, const ChannelFrame&) = default;
};

/// z = xB mod 6 for x over Z_6 (length n).
ChannelFrame encode(const ResidueVector& x, const TransmissionPair& pair);
/// x' = zC^T mod 6.
ResidueVector decode(const ChannelFrame& frame, const TransmissionPair& pair);

/// Uniform permutation of {0..n-1}.
std::vector<std::size_t> draw_permutation(std::size_t n, Rng& rng);

struct Prefilter {
  std::vector<ChannelFrame> frames;
  /// Sender-side only: the position each frame (group) modifies.
  std::vector<std::size_t> schedule;
};

/// One frame per 1-bit, in pi-order, encoding x with that position zeroed.
Prefilter run_prefilter_subtractive(std::span<const std::uint8_t> bits,
                                    const TransmissionPair& pair, Rng& rng);
/// Six frames per 1-bit, in pi-order, encoding x with that position set to
/// 0, 1, ..., 5.
Prefilter run_prefilter_periodic(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                                 Rng& rng);

enum class Conclusion { unset, one, zero };

struct ReceiverState {
  std::size_t index = 0;
  Variant variant = Variant::subtractive;
  Residue base = 0;  // x'_i
  Residue reg = 0;   // r_i, starts at x'_i
  Conclusion concluded = Conclusion::unset;
  bool errored = false;
  bool finalized = false;
};

struct ReceiverOutput {
  std::uint8_t bit = 0;
  bool error = false;
  friend bool operator==(const ReceiverOutput&, const ReceiverOutput&) = default;
};

ReceiverState start_receiver(std::size_t index, Residue base, Variant variant);

/// diff = x'_i - x''_i mod 6: 0 nothing, 1 conclude one, 3 or 4 subtract from
/// the register. Throws ProtocolViolation for any other diff, and for a
/// second diff 1.
void receiver_step_subtractive(ReceiverState& state, Residue observed);
/// Minimal cyclic period of the six observations: 6 concludes one, anything
/// shorter is ignored. The sweep must also read base + c*(v-1) for some c in
/// {0,1,3,4}; otherwise ProtocolViolation.
void receiver_step_periodic(ReceiverState& state, std::span<const Residue> six);
/// Minimal cyclic period of a sequence (divides its length).
std::size_t cyclic_period(std::span<const Residue> values);

/// Unset becomes zero. Subtractive receivers additionally require
/// r_i == bit (mod 6); a mismatch or an earlier violation reports ERROR.
ReceiverOutput finalize_receiver(ReceiverState& state);

/// Adds `delta` (mod 6) to one channel symbol of one frame in transit.
struct Fault {
  std::size_t frame = 0;  // ordinal within the round, 0 = initial frame
  std::size_t channel = 0;
  Residue delta = 1;
};

struct RoundOptions {
  /// Keep every frame and every receiver's observations. Off for large n.
  bool record = true;
  std::optional<Fault> fault;
};

struct RoundTranscript {
  std::size_t n = 0;
  std::size_t t = 0;
  Variant variant = Variant::subtractive;
  std::uint64_t seed = 0;
  std::size_t frame_count = 0;
  /// Filled only when recording.
  std::vector<ChannelFrame> frames;
  std::vector<Residue> bases;                    // x'_i per receiver
  std::vector<std::vector<Residue>> observations;  // x''_i per repetition frame, arrival order
};

struct RoundResult {
  RoundTranscript transcript;
  std::vector<ReceiverOutput> outputs;
  std::vector<Residue> registers;  // r_i after the round
  /// Number of observations that violated the receivers' diff domain.
  std::size_t violations = 0;

  bool clean() const;
  Bits delivered() const;
};

/// Runs one round. Frames are produced incrementally from the initial frame
/// and receivers decode only the channels that changed; result is a pure
/// function of the arguments.
RoundResult run_round(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                      Variant variant, std::uint64_t seed, const RoundOptions& options = {});

namespace reference {
/// Literal round: every frame is encoded from scratch and fully decoded by
/// every receiver. Same output as hdt::run_round; quadratic, for tests.
RoundResult run_round(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                      Variant variant, std::uint64_t seed, const RoundOptions& options = {});
}  // namespace reference

struct MessageFault {
  std::size_t round = 0;
  Fault fault;
};

struct MessageOptions {
  bool record = false;
  std::optional<MessageFault> fault;
};

struct MessageResult {
  std::vector<Bits> received;              // per receiver, u bits
  std::vector<std::size_t> failed_rounds;  // rounds with any ERROR
  std::vector<RoundResult> rounds;         // only when recording
  std::size_t frame_total = 0;

  bool ok() const { return failed_rounds.empty(); }
};

/// Seed of round r inside a multi-round message.
std::uint64_t round_seed(std::uint64_t seed, std::size_t round);

/// messages[i] is sender i's u-bit message; round r carries bit r of each.
MessageResult send_message(const std::vector<Bits>& messages, const TransmissionPair& pair,
                           Variant variant, std::uint64_t seed, const MessageOptions& options = {});

/// "HDT-ROUND 1" dump of a recorded round.
void write_transcript(const RoundResult& round, std::ostream& out);

}  // namespace hdt
