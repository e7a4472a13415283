#include "hdt/protocol.hpp"

#include <algorithm>
#include <cstring>
#include <ostream>

#include "hdt/error.hpp"
#include "protocol_internal.hpp"

namespace hdt {

std::string to_string(Variant v) { return v == Variant::subtractive ? "subtractive" : "periodic"; }

std::optional<Variant> parse_variant(std::string_view text) {
  if (text == "subtractive") return Variant::subtractive;
  if (text == "periodic") return Variant::periodic;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Encoding / decoding

ChannelFrame encode(const ResidueVector& x, const TransmissionPair& pair) {
  if (x.modulus() != kProtocolModulus) throw InputError("encode: input must be over Z_6");
  if (x.size() != pair.n()) {
    throw InputError("encode: expected " + std::to_string(pair.n()) + " coordinates, got " +
                     std::to_string(x.size()));
  }
  return {ChannelFrame::Kind::initial, 0, vec_mat_mul(x, pair.encoder())};
}

ResidueVector decode(const ChannelFrame& frame, const TransmissionPair& pair) {
  if (frame.symbols.size() != pair.t()) {
    throw InputError("decode: expected " + std::to_string(pair.t()) + " symbols, got " +
                     std::to_string(frame.symbols.size()));
  }
  return mat_vec_mul(pair.decoder(), frame.symbols);
}

std::vector<std::size_t> draw_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  shuffle(perm, rng);
  return perm;
}

namespace detail {

void validate_bits(std::span<const std::uint8_t> bits, const TransmissionPair& pair) {
  if (bits.size() != pair.n()) {
    throw InputError("expected " + std::to_string(pair.n()) + " sender bits, got " +
                     std::to_string(bits.size()));
  }
  for (auto b : bits) {
    if (b > 1) throw InputError("sender bits must be 0 or 1");
  }
}

void validate_fault(const std::optional<Fault>& fault, const TransmissionPair& pair) {
  if (fault && fault->channel >= pair.t()) throw InputError("fault channel out of range");
  if (fault && fault->delta >= kProtocolModulus) throw InputError("fault delta must be in 0..5");
}

ResidueVector with_coordinate(std::span<const std::uint8_t> bits, std::size_t p, Residue value) {
  std::vector<Residue> x(bits.begin(), bits.end());
  x[p] = value;
  return ResidueVector(kProtocolModulus, std::move(x));
}

bool step_subtractive(ReceiverState& state, Residue observed) {
  const Residue diff = sub_mod(state.base, observed, kProtocolModulus);
  switch (diff) {
    case 0:
      return true;
    case 1:
      // Only the receiver's own position produces diff 1, and only once.
      if (state.concluded == Conclusion::one) {
        state.errored = true;
        return false;
      }
      state.concluded = Conclusion::one;
      return true;
    case 3:
    case 4:
      state.reg = sub_mod(state.reg, diff, kProtocolModulus);
      return true;
    default:
      state.errored = true;
      return false;
  }
}

// A clean sweep is base + c*(v-1) with c one of the certified coefficients.
// Anything else means a symbol was altered in transit.
bool sweep_is_progression(Residue base, std::span<const Residue> six) {
  if (six[1] != base) return false;
  const Residue step = sub_mod(six[2], six[1], kProtocolModulus);
  if (step == 2 || step == 5) return false;
  for (std::size_t v = 0; v < six.size(); ++v) {
    const auto expect = reduce(static_cast<std::int64_t>(base) +
                                   static_cast<std::int64_t>(step) * (static_cast<std::int64_t>(v) - 1),
                               kProtocolModulus);
    if (six[v] != expect) return false;
  }
  return true;
}

bool step_periodic(ReceiverState& state, std::span<const Residue> six) {
  if (!sweep_is_progression(state.base, six)) {
    state.errored = true;
    return false;
  }
  const auto period = cyclic_period(six);
  if (period == 6) {
    state.concluded = Conclusion::one;
    return true;
  }
  if (period == 1 || period == 2 || period == 3) return true;
  state.errored = true;
  return false;
}

RoundResult finish_round(RoundTranscript transcript, std::vector<ReceiverState>& states,
                         std::size_t violations) {
  RoundResult result;
  result.transcript = std::move(transcript);
  result.violations = violations;
  const auto n = static_cast<std::int64_t>(states.size());
  result.outputs.resize(states.size());
  result.registers.resize(states.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    result.outputs[i] = finalize_receiver(states[i]);
    result.registers[i] = states[i].reg;
  }
  return result;
}

}  // namespace detail

Prefilter run_prefilter_subtractive(std::span<const std::uint8_t> bits,
                                    const TransmissionPair& pair, Rng& rng) {
  detail::validate_bits(bits, pair);
  Prefilter out;
  for (auto p : draw_permutation(pair.n(), rng)) {
    if (bits[p] == 0) continue;
    auto frame = encode(detail::with_coordinate(bits, p, 0), pair);
    frame.kind = ChannelFrame::Kind::repetition;
    frame.ordinal = out.frames.size() + 1;
    out.frames.push_back(std::move(frame));
    out.schedule.push_back(p);
  }
  return out;
}

Prefilter run_prefilter_periodic(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                                 Rng& rng) {
  detail::validate_bits(bits, pair);
  Prefilter out;
  for (auto p : draw_permutation(pair.n(), rng)) {
    if (bits[p] == 0) continue;
    for (Residue v = 0; v < kProtocolModulus; ++v) {
      auto frame = encode(detail::with_coordinate(bits, p, v), pair);
      frame.kind = ChannelFrame::Kind::repetition;
      frame.ordinal = out.frames.size() + 1;
      out.frames.push_back(std::move(frame));
    }
    out.schedule.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Receiver state machine

ReceiverState start_receiver(std::size_t index, Residue base, Variant variant) {
  if (base >= kProtocolModulus) throw InputError("receiver base must be a residue mod 6");
  ReceiverState s;
  s.index = index;
  s.variant = variant;
  s.base = base;
  s.reg = base;
  return s;
}

void receiver_step_subtractive(ReceiverState& state, Residue observed) {
  if (state.finalized) throw InputError("receiver already finalized");
  if (state.variant != Variant::subtractive) throw InputError("not a subtractive receiver");
  if (observed >= kProtocolModulus) throw InputError("observation must be a residue mod 6");
  if (!detail::step_subtractive(state, observed)) {
    const auto diff = sub_mod(state.base, observed, kProtocolModulus);
    throw ProtocolViolation("receiver " + std::to_string(state.index + 1) + ": difference " +
                            std::to_string(diff) +
                            (diff == 1 ? " seen twice" : " is outside {0,1,3,4}"));
  }
}

std::size_t cyclic_period(std::span<const Residue> values) {
  const std::size_t len = values.size();
  for (std::size_t p = 1; p < len; ++p) {
    if (len % p != 0) continue;
    bool ok = true;
    for (std::size_t k = 0; k < len && ok; ++k) ok = values[k] == values[(k + p) % len];
    if (ok) return p;
  }
  return len;
}

void receiver_step_periodic(ReceiverState& state, std::span<const Residue> six) {
  if (state.finalized) throw InputError("receiver already finalized");
  if (state.variant != Variant::periodic) throw InputError("not a periodic receiver");
  if (six.size() != 6) throw InputError("periodic step needs exactly six observations");
  if (!detail::step_periodic(state, six)) {
    throw ProtocolViolation("receiver " + std::to_string(state.index + 1) +
                            ": sweep is not a progression with step in {0,1,3,4}");
  }
}

ReceiverOutput finalize_receiver(ReceiverState& state) {
  if (state.concluded == Conclusion::unset) state.concluded = Conclusion::zero;
  state.finalized = true;
  ReceiverOutput out;
  out.bit = state.concluded == Conclusion::one ? 1 : 0;
  out.error = state.errored;
  if (state.variant == Variant::subtractive && state.reg != out.bit) out.error = true;
  return out;
}

// ---------------------------------------------------------------------------
// Incremental round engine

namespace {

// Receiver-side incremental decoder: compares each frame with the initial one
// and pushes the changed channels through C^T.
class DeltaDecoder {
 public:
  DeltaDecoder(const TransmissionPair& pair, std::vector<Residue> first)
      : ct_(pair.decoder_by_channel()), first_(std::move(first)), acc_(pair.n(), 0),
        marked_(pair.n(), 0) {}

  // Fills touched() with the receivers whose decoded value moved (or may have).
  void receive(const std::vector<Residue>& frame) {
    clear();
    constexpr std::size_t kBlock = 256;
    const std::size_t t = frame.size();
    for (std::size_t start = 0; start < t; start += kBlock) {
      const std::size_t len = std::min(kBlock, t - start);
      if (std::memcmp(frame.data() + start, first_.data() + start, len * sizeof(Residue)) == 0) {
        continue;
      }
      for (std::size_t j = start; j < start + len; ++j) {
        if (frame[j] == first_[j]) continue;
        const Residue d = sub_mod(frame[j], first_[j], kProtocolModulus);
        for (const auto& e : ct_.row(j)) {
          if (!marked_[e.col]) {
            marked_[e.col] = 1;
            touched_.push_back(e.col);
          }
          acc_[e.col] = add_mod(acc_[e.col], mul_mod(d, e.value, kProtocolModulus),
                                kProtocolModulus);
        }
      }
    }
  }

  const std::vector<std::size_t>& touched() const { return touched_; }
  Residue delta(std::size_t k) const { return acc_[k]; }

 private:
  void clear() {
    for (auto k : touched_) {
      acc_[k] = 0;
      marked_[k] = 0;
    }
    touched_.clear();
  }

  const SparseResidueMatrix& ct_;
  std::vector<Residue> first_;
  std::vector<Residue> acc_;
  std::vector<std::uint8_t> marked_;
  std::vector<std::size_t> touched_;
};

class FaultInjector {
 public:
  explicit FaultInjector(const std::optional<Fault>& fault) : fault_(fault) {}

  void apply(std::size_t ordinal, std::vector<Residue>& frame) {
    if (fault_ && fault_->frame == ordinal) {
      frame[fault_->channel] = add_mod(frame[fault_->channel], fault_->delta, kProtocolModulus);
      active_ = true;
    }
  }
  void revert(std::vector<Residue>& frame) {
    if (active_) {
      frame[fault_->channel] = sub_mod(frame[fault_->channel], fault_->delta, kProtocolModulus);
      active_ = false;
    }
  }

 private:
  std::optional<Fault> fault_;
  bool active_ = false;
};

}  // namespace

RoundResult run_round(std::span<const std::uint8_t> bits, const TransmissionPair& pair,
                      Variant variant, std::uint64_t seed, const RoundOptions& options) {
  detail::validate_bits(bits, pair);
  detail::validate_fault(options.fault, pair);
  const std::size_t n = pair.n();
  const std::size_t t = pair.t();
  const auto& b = pair.encoder();

  Rng rng(seed);
  const auto perm = draw_permutation(n, rng);

  RoundTranscript tr;
  tr.n = n;
  tr.t = t;
  tr.variant = variant;
  tr.seed = seed;

  // Sender side: z = xB, kept clean; `buffer` is edited per frame and restored.
  std::vector<Residue> clean(t, 0);
  std::size_t weight = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (bits[p] == 0) continue;
    ++weight;
    for (const auto& e : b.row(p)) clean[e.col] = add_mod(clean[e.col], e.value, kProtocolModulus);
  }
  std::vector<Residue> buffer = clean;
  FaultInjector fault(options.fault);

  fault.apply(0, buffer);
  const ResidueVector first(kProtocolModulus, buffer);
  fault.revert(buffer);

  const ResidueVector base = mat_vec_mul(pair.decoder(), first);
  std::vector<ReceiverState> states(n);
  for (std::size_t i = 0; i < n; ++i) states[i] = start_receiver(i, base[i], variant);

  tr.frame_count = 1 + (variant == Variant::subtractive ? weight : 6 * weight);
  if (options.record) {
    tr.frames.reserve(tr.frame_count);
    tr.frames.push_back({ChannelFrame::Kind::initial, 0, first});
    tr.bases.assign(base.entries().begin(), base.entries().end());
    tr.observations.assign(n, {});
  }

  DeltaDecoder decoder(pair, std::vector<Residue>(first.entries().begin(), first.entries().end()));
  std::size_t violations = 0;
  std::size_t ordinal = 0;

  auto record_frame = [&](const std::vector<Residue>& frame) {
    if (!options.record) return;
    tr.frames.push_back({ChannelFrame::Kind::repetition, ordinal, ResidueVector(kProtocolModulus, frame)});
    for (std::size_t i = 0; i < n; ++i) tr.observations[i].push_back(base[i]);
    for (auto k : decoder.touched()) {
      tr.observations[k].back() = add_mod(base[k], decoder.delta(k), kProtocolModulus);
    }
  };

  if (variant == Variant::subtractive) {
    for (auto p : perm) {
      if (bits[p] == 0) continue;
      ++ordinal;
      for (const auto& e : b.row(p)) {
        buffer[e.col] = sub_mod(buffer[e.col], e.value, kProtocolModulus);
      }
      fault.apply(ordinal, buffer);
      decoder.receive(buffer);
      record_frame(buffer);
      for (auto k : decoder.touched()) {
        const Residue observed = add_mod(base[k], decoder.delta(k), kProtocolModulus);
        if (!detail::step_subtractive(states[k], observed)) ++violations;
      }
      fault.revert(buffer);
      for (const auto& e : b.row(p)) buffer[e.col] = clean[e.col];
    }
  } else {
    std::vector<std::array<Residue, 6>> sweep(n);
    std::vector<std::uint8_t> in_sweep(n, 0);
    std::vector<std::size_t> sweep_touched;
    for (auto p : perm) {
      if (bits[p] == 0) continue;
      for (Residue v = 0; v < kProtocolModulus; ++v) {
        ++ordinal;
        // x_p = 1 in the initial frame, so setting it to v adds (v - 1) * B_p.
        const Residue scale = sub_mod(v, 1, kProtocolModulus);
        for (const auto& e : b.row(p)) {
          buffer[e.col] = add_mod(clean[e.col], mul_mod(scale, e.value, kProtocolModulus),
                                  kProtocolModulus);
        }
        fault.apply(ordinal, buffer);
        decoder.receive(buffer);
        record_frame(buffer);
        for (auto k : decoder.touched()) {
          if (!in_sweep[k]) {
            in_sweep[k] = 1;
            sweep_touched.push_back(k);
            sweep[k].fill(base[k]);
          }
          sweep[k][v] = add_mod(base[k], decoder.delta(k), kProtocolModulus);
        }
        fault.revert(buffer);
      }
      for (const auto& e : b.row(p)) buffer[e.col] = clean[e.col];
      // Receivers outside sweep_touched saw a constant sequence: period 1.
      for (auto k : sweep_touched) {
        if (!detail::step_periodic(states[k], sweep[k])) ++violations;
        in_sweep[k] = 0;
      }
      sweep_touched.clear();
    }
  }

  return detail::finish_round(std::move(tr), states, violations);
}

bool RoundResult::clean() const {
  if (violations != 0) return false;
  return std::none_of(outputs.begin(), outputs.end(), [](const auto& o) { return o.error; });
}

Bits RoundResult::delivered() const {
  Bits out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(o.bit);
  return out;
}

// ---------------------------------------------------------------------------
// Messages

std::uint64_t round_seed(std::uint64_t seed, std::size_t round) { return derive_seed(seed, round); }

MessageResult send_message(const std::vector<Bits>& messages, const TransmissionPair& pair,
                           Variant variant, std::uint64_t seed, const MessageOptions& options) {
  if (messages.size() != pair.n()) {
    throw InputError("expected " + std::to_string(pair.n()) + " messages, got " +
                     std::to_string(messages.size()));
  }
  const std::size_t u = messages.front().size();
  for (const auto& m : messages) {
    if (m.size() != u) throw InputError("all messages must have the same length");
  }
  MessageResult out;
  out.received.assign(pair.n(), {});
  Bits column(pair.n());
  for (std::size_t r = 0; r < u; ++r) {
    for (std::size_t i = 0; i < pair.n(); ++i) column[i] = messages[i][r];
    RoundOptions ro;
    ro.record = options.record;
    if (options.fault && options.fault->round == r) ro.fault = options.fault->fault;
    auto round = run_round(column, pair, variant, round_seed(seed, r), ro);
    for (std::size_t i = 0; i < pair.n(); ++i) out.received[i].push_back(round.outputs[i].bit);
    if (!round.clean()) out.failed_rounds.push_back(r);
    out.frame_total += round.transcript.frame_count;
    if (options.record) out.rounds.push_back(std::move(round));
  }
  return out;
}

void write_transcript(const RoundResult& round, std::ostream& out) {
  const auto& tr = round.transcript;
  if (tr.frames.size() != tr.frame_count) {
    throw InputError("transcript was not recorded; rerun with recording enabled");
  }
  out << "HDT-ROUND 1\n" << tr.n << ' ' << tr.t << ' ' << to_string(tr.variant) << ' ' << tr.seed
      << '\n';
  for (const auto& frame : tr.frames) {
    out << (frame.kind == ChannelFrame::Kind::initial ? 'I' : 'R');
    for (auto s : frame.symbols.entries()) out << ' ' << s;
    out << '\n';
  }
  for (std::size_t i = 0; i < round.outputs.size(); ++i) {
    out << i + 1 << ' ' << static_cast<int>(round.outputs[i].bit) << ' '
        << (round.outputs[i].error ? 1 : 0) << '\n';
  }
}

}  // namespace hdt
