#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <sstream>

#include "generators.hpp"
#include "hdt/error.hpp"
#include "hdt/protocol.hpp"

namespace hdt {
namespace {

using testing::bits_of;
using testing::describe;
using testing::random_bits;
using testing::weight;

TransmissionPair two_by_four() {
  auto check = verify_pair(ResidueMatrix(6, 2, 4, {1, 1, 1, 0, 0, 0, 0, 1}),
                           ResidueMatrix(6, 2, 4, {1, 0, 0, 0, 1, 1, 1, 1}));
  return std::get<TransmissionPair>(std::move(check));
}

// A spread of certified pairs with nontrivial 3 and 4 coefficients.
std::vector<TransmissionPair> test_pairs() {
  std::vector<TransmissionPair> out{identity_pair(1), identity_pair(3), identity_pair(5),
                                    two_by_four()};
  for (auto [n, t] : {std::pair<std::size_t, std::size_t>{3, 2}, {4, 3}, {5, 3}, {6, 4}}) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      auto found = search_pair(n, t, 1'000'000, seed, PairMode::relaxed);
      if (found.pair) out.push_back(std::move(*found.pair));
    }
  }
  return out;
}

const std::vector<TransmissionPair>& pairs() {
  static const auto cached = test_pairs();
  return cached;
}

std::size_t coefficient_mix(const TransmissionPair& p) {
  std::set<Residue> seen;
  for (std::size_t i = 0; i < p.n(); ++i)
    for (const auto& e : p.product().row(i)) seen.insert(e.value);
  return seen.size();
}

TEST(TestPairs, IncludeThreesAndFours) {
  bool any = false;
  for (const auto& p : pairs()) any = any || coefficient_mix(p) == 3;  // {1,3,4}
  EXPECT_TRUE(any);
}

TEST(Encode, Examples) {
  const auto id = identity_pair(3);
  const ResidueVector x(6, std::vector<Residue>{1, 0, 1});
  EXPECT_EQ(encode(x, id).symbols, x);
  for (const auto& p : pairs()) {
    EXPECT_EQ(encode(ResidueVector(6, p.n()), p).symbols, ResidueVector(6, p.t()));
  }
  EXPECT_THROW(encode(ResidueVector(6, 4), id), InputError);
}

TEST(Encode, MatchesNaiveLinearCombination) {
  Rng rng(31);
  for (const auto& p : pairs()) {
    const auto b = p.encoder().to_dense();
    for (int trial = 0; trial < 30; ++trial) {
      const auto x = testing::random_vector(rng, 6, p.n());
      const auto z = encode(x, p).symbols;
      for (std::size_t j = 0; j < p.t(); ++j) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < p.n(); ++i) acc += static_cast<std::int64_t>(x[i]) * b.at(i, j);
        ASSERT_EQ(z[j], reduce(acc, 6));
      }
    }
  }
}

TEST(Encode, Linearity) {
  Rng rng(32);
  for (const auto& p : pairs()) {
    for (int trial = 0; trial < 30; ++trial) {
      const auto x = testing::random_vector(rng, 6, p.n());
      const auto y = testing::random_vector(rng, 6, p.n());
      std::vector<Residue> sum(p.n());
      for (std::size_t i = 0; i < p.n(); ++i) sum[i] = add_mod(x[i], y[i], 6);
      const auto zx = encode(x, p).symbols;
      const auto zy = encode(y, p).symbols;
      const auto zs = encode(ResidueVector(6, sum), p).symbols;
      for (std::size_t j = 0; j < p.t(); ++j) ASSERT_EQ(zs[j], add_mod(zx[j], zy[j], 6));
    }
  }
}

TEST(Decode, IdentityInverts) {
  const auto id = identity_pair(4);
  const ResidueVector x(6, std::vector<Residue>{1, 0, 1, 1});
  EXPECT_EQ(decode(encode(x, id), id), x);
}

TEST(Decode, UnitVectorsReadProductRows) {
  for (const auto& p : pairs()) {
    for (std::size_t k = 0; k < p.n(); ++k) {
      ResidueVector e(6, p.n());
      e.set(k, 1);
      const auto xp = decode(encode(e, p), p);
      for (std::size_t i = 0; i < p.n(); ++i) {
        ASSERT_EQ(xp[i], p.coefficient(k, i));
        if (i == k) {
          EXPECT_EQ(xp[i], 1u);
        } else {
          EXPECT_TRUE(xp[i] == 0 || xp[i] == 3 || xp[i] == 4);
        }
      }
    }
  }
}

TEST(Prefilter, SubtractiveFrameCounts) {
  const auto id = identity_pair(5);
  Rng rng(1);
  EXPECT_TRUE(run_prefilter_subtractive(Bits(5, 0), id, rng).frames.empty());
  const auto one = run_prefilter_subtractive(bits_of(0b00100, 5), id, rng);
  ASSERT_EQ(one.frames.size(), 1u);
  EXPECT_EQ(one.frames[0].symbols, ResidueVector(6, 5));
}

TEST(Prefilter, SubtractiveMultisetIsSeedIndependent) {
  const auto& p = pairs().back();
  const auto x = bits_of(0b10110, std::min<std::size_t>(5, p.n()));
  Bits bits(p.n(), 0);
  std::copy(x.begin(), x.end(), bits.begin());
  std::multiset<std::vector<Residue>> reference;
  std::set<std::vector<std::size_t>> orders;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const auto pre = run_prefilter_subtractive(bits, p, rng);
    ASSERT_EQ(pre.frames.size(), weight(bits));
    std::multiset<std::vector<Residue>> frames;
    for (const auto& f : pre.frames) {
      frames.insert(std::vector<Residue>(f.symbols.entries().begin(), f.symbols.entries().end()));
    }
    if (seed == 0) reference = frames;
    ASSERT_EQ(frames, reference);
    orders.insert(pre.schedule);
  }
  EXPECT_EQ(orders.size(), 6u);  // all 3! orders show up
}

TEST(Prefilter, PeriodicSweepsAreProgressions) {
  Rng rng(4);
  for (const auto& p : pairs()) {
    const auto bits = random_bits(rng, p.n());
    Rng r(17);
    const auto pre = run_prefilter_periodic(bits, p, r);
    ASSERT_EQ(pre.frames.size(), 6 * weight(bits));
    const auto base = decode(encode(ResidueVector(6, std::vector<Residue>(bits.begin(), bits.end())), p), p);
    for (std::size_t g = 0; g < pre.schedule.size(); ++g) {
      const auto pos = pre.schedule[g];
      for (Residue v = 0; v < 6; ++v) {
        const auto xp = decode(pre.frames[6 * g + v], p);
        for (std::size_t i = 0; i < p.n(); ++i) {
          const auto c = p.coefficient(pos, i);
          const auto expect = reduce(static_cast<std::int64_t>(base[i]) +
                                         static_cast<std::int64_t>(c) * (static_cast<std::int64_t>(v) - 1),
                                     6);
          ASSERT_EQ(xp[i], expect);
        }
      }
    }
  }
}

TEST(Receiver, SubtractiveExamples) {
  auto s = start_receiver(0, 1, Variant::subtractive);
  receiver_step_subtractive(s, 0);
  EXPECT_EQ(s.concluded, Conclusion::one);
  EXPECT_EQ(s.reg, 1u);  // diff 1 leaves the register alone

  auto t = start_receiver(0, 4, Variant::subtractive);
  receiver_step_subtractive(t, 1);
  EXPECT_EQ(t.reg, 1u);
  receiver_step_subtractive(t, 0);  // diff 4
  EXPECT_EQ(t.reg, 3u);
  receiver_step_subtractive(t, 4);  // diff 0
  EXPECT_EQ(t.reg, 3u);
  EXPECT_EQ(t.concluded, Conclusion::unset);

  auto twice = start_receiver(0, 1, Variant::subtractive);
  receiver_step_subtractive(twice, 0);
  EXPECT_THROW(receiver_step_subtractive(twice, 0), ProtocolViolation);

  auto u = start_receiver(0, 2, Variant::subtractive);
  EXPECT_THROW(receiver_step_subtractive(u, 0), ProtocolViolation);  // diff 2
  EXPECT_THROW(receiver_step_subtractive(u, 3), ProtocolViolation);  // diff 5
}

TEST(Receiver, FinalizeChecksRegister) {
  auto clean = start_receiver(0, 0, Variant::subtractive);
  EXPECT_EQ(finalize_receiver(clean), (ReceiverOutput{0, false}));
  EXPECT_EQ(clean.reg, 0u);

  auto one = start_receiver(0, 1, Variant::subtractive);
  receiver_step_subtractive(one, 0);
  EXPECT_EQ(finalize_receiver(one), (ReceiverOutput{1, false}));

  auto bad = start_receiver(0, 3, Variant::subtractive);
  EXPECT_EQ(finalize_receiver(bad), (ReceiverOutput{0, true}));
  EXPECT_THROW(receiver_step_subtractive(bad, 3), InputError);  // already finalized
}

std::vector<Residue> sweep(Residue base, Residue c) {
  std::vector<Residue> s(6);
  for (int v = 0; v < 6; ++v) s[v] = reduce(static_cast<std::int64_t>(base) + static_cast<std::int64_t>(c) * (v - 1), 6);
  return s;
}

TEST(Receiver, PeriodicExamples) {
  for (Residue base = 0; base < 6; ++base) {
    for (Residue c : {0u, 1u, 3u, 4u}) {
      EXPECT_EQ(cyclic_period(sweep(base, c)), period_of_scalar(c));
      auto s = start_receiver(0, base, Variant::periodic);
      receiver_step_periodic(s, sweep(base, c));
      EXPECT_EQ(s.concluded == Conclusion::one, c == 1) << "c=" << c;
    }
  }
  auto s = start_receiver(0, 2, Variant::periodic);
  auto bent = sweep(2, 3);
  bent[4] = add_mod(bent[4], 1, 6);
  EXPECT_THROW(receiver_step_periodic(s, bent), ProtocolViolation);
  auto wrong_base = start_receiver(0, 1, Variant::periodic);
  EXPECT_THROW(receiver_step_periodic(wrong_base, sweep(2, 0)), ProtocolViolation);
  EXPECT_THROW(receiver_step_periodic(wrong_base, std::vector<Residue>(5, 1)), InputError);
}

TEST(Receiver, CyclicPeriod) {
  EXPECT_EQ(cyclic_period(std::vector<Residue>{1, 1, 1, 1, 1, 1}), 1u);
  EXPECT_EQ(cyclic_period(std::vector<Residue>{1, 4, 1, 4, 1, 4}), 2u);
  EXPECT_EQ(cyclic_period(std::vector<Residue>{0, 4, 2, 0, 4, 2}), 3u);
  EXPECT_EQ(cyclic_period(std::vector<Residue>{0, 1, 2, 3, 4, 5}), 6u);
  EXPECT_EQ(cyclic_period(std::vector<Residue>{0, 1, 0, 1, 0, 0}), 6u);
}

TEST(RunRound, IdentityExample) {
  const auto id = identity_pair(3);
  const Bits x{1, 0, 1};
  const auto r = run_round(x, id, Variant::subtractive, 42);
  EXPECT_EQ(r.delivered(), x);
  EXPECT_TRUE(r.clean());
  EXPECT_EQ(r.transcript.frame_count, 3u);
  EXPECT_EQ(r.transcript.frames.size(), 3u);
  const auto q = run_round(x, id, Variant::periodic, 42);
  EXPECT_EQ(q.delivered(), x);
  EXPECT_EQ(q.transcript.frame_count, 13u);
}

TEST(RunRound, AllZeroHasOneFrame) {
  for (const auto& p : pairs()) {
    for (auto v : {Variant::subtractive, Variant::periodic}) {
      const auto r = run_round(Bits(p.n(), 0), p, v, 3);
      EXPECT_EQ(r.transcript.frame_count, 1u);
      EXPECT_EQ(r.delivered(), Bits(p.n(), 0));
      EXPECT_TRUE(r.clean());
      for (auto reg : r.registers) EXPECT_EQ(reg, 0u);
    }
  }
}

TEST(RunRound, RejectsBadInput) {
  const auto id = identity_pair(3);
  EXPECT_THROW(run_round(Bits{1, 0}, id, Variant::subtractive, 1), InputError);
  EXPECT_THROW(run_round(Bits{1, 2, 0}, id, Variant::subtractive, 1), InputError);
  RoundOptions o;
  o.fault = Fault{0, 3, 1};
  EXPECT_THROW(run_round(Bits{1, 0, 0}, id, Variant::subtractive, 1, o), InputError);
}

// Delivery plus the register and diff-domain invariants, exhaustively over
// x for every test pair.
TEST(RunRound, ExhaustiveCorrectnessAndInvariants) {
  for (const auto& p : pairs()) {
    const auto n = p.n();
    for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
      const auto x = bits_of(mask, n);
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto r = run_round(x, p, Variant::subtractive, seed);
        ASSERT_TRUE(r.clean()) << describe(x);
        ASSERT_EQ(r.delivered(), x) << describe(x) << " seed " << seed;
        ASSERT_EQ(r.transcript.frame_count, 1 + weight(x));
        for (std::size_t i = 0; i < n; ++i) {
          ASSERT_EQ(r.registers[i], x[i]);
          std::size_t ones = 0;
          for (auto obs : r.transcript.observations[i]) {
            const auto diff = sub_mod(r.transcript.bases[i], obs, 6);
            ASSERT_TRUE(diff == 0 || diff == 1 || diff == 3 || diff == 4);
            ones += diff == 1;
          }
          ASSERT_EQ(ones, x[i]);
        }
        const auto q = run_round(x, p, Variant::periodic, seed);
        ASSERT_TRUE(q.clean()) << describe(x);
        ASSERT_EQ(q.delivered(), x);
        ASSERT_EQ(q.transcript.frame_count, 1 + 6 * weight(x));
      }
    }
  }
}

void expect_same(const RoundResult& a, const RoundResult& b) {
  ASSERT_EQ(a.outputs, b.outputs);
  ASSERT_EQ(a.registers, b.registers);
  ASSERT_EQ(a.violations, b.violations);
  ASSERT_EQ(a.transcript.frame_count, b.transcript.frame_count);
  ASSERT_EQ(a.transcript.frames, b.transcript.frames);
  ASSERT_EQ(a.transcript.bases, b.transcript.bases);
  ASSERT_EQ(a.transcript.observations, b.transcript.observations);
}

TEST(RunRound, IncrementalEngineMatchesReference) {
  Rng rng(77);
  for (const auto& p : pairs()) {
    for (int trial = 0; trial < 40; ++trial) {
      const auto x = random_bits(rng, p.n());
      const auto seed = rng.next();
      for (auto v : {Variant::subtractive, Variant::periodic}) {
        RoundOptions o;
        if (trial % 2 == 1) {
          const auto w = weight(x);
          const std::size_t frames = 1 + (v == Variant::subtractive ? w : 6 * w);
          o.fault = Fault{static_cast<std::size_t>(rng.below(frames)),
                          static_cast<std::size_t>(rng.below(p.t())),
                          static_cast<Residue>(1 + rng.below(5))};
        }
        expect_same(run_round(x, p, v, seed, o), reference::run_round(x, p, v, seed, o));
      }
    }
  }
}

TEST(RunRound, IncrementalEngineMatchesReferenceOnLargerIdentity) {
  const auto id = identity_pair(300);
  Rng rng(5);
  const auto x = random_bits(rng, 300);
  for (auto v : {Variant::subtractive, Variant::periodic}) {
    expect_same(run_round(x, id, v, 9), reference::run_round(x, id, v, 9));
  }
}

TEST(RunRound, PeriodsInLiveRounds) {
  Rng rng(12);
  for (const auto& p : pairs()) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto x = random_bits(rng, p.n());
      const auto seed = rng.next();
      const auto r = run_round(x, p, Variant::periodic, seed);
      // The sender's schedule for the same seed tells which position swept.
      Rng replay(seed);
      const auto schedule = run_prefilter_periodic(x, p, replay).schedule;
      ASSERT_EQ(schedule.size(), weight(x));
      for (std::size_t g = 0; g < schedule.size(); ++g) {
        for (std::size_t i = 0; i < p.n(); ++i) {
          const auto& obs = r.transcript.observations[i];
          const std::span<const Residue> six(obs.data() + 6 * g, 6);
          ASSERT_EQ(cyclic_period(six), period_of_scalar(p.coefficient(schedule[g], i)));
        }
      }
    }
  }
}

TEST(RunRound, Deterministic) {
  const auto& p = pairs().back();
  Rng rng(8);
  const auto x = random_bits(rng, p.n());
  for (auto v : {Variant::subtractive, Variant::periodic}) {
    std::ostringstream a, b;
    write_transcript(run_round(x, p, v, 1234), a);
    write_transcript(run_round(x, p, v, 1234), b);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Transcript, Layout) {
  const auto r = run_round(Bits{1, 0, 1}, identity_pair(3), Variant::subtractive, 5);
  std::ostringstream os;
  write_transcript(r, os);
  std::istringstream in(os.str());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_EQ(lines.size(), 2u + 3u + 3u);
  EXPECT_EQ(lines[0], "HDT-ROUND 1");
  EXPECT_EQ(lines[1], "3 3 subtractive 5");
  EXPECT_EQ(lines[2], "I 1 0 1");
  // Two repetition frames, one per 1-bit, in permutation order.
  std::set<std::string> reps{lines[3], lines[4]};
  EXPECT_EQ(reps, (std::set<std::string>{"R 0 0 1", "R 1 0 0"}));
  EXPECT_EQ(lines[5], "1 1 0");
  EXPECT_EQ(lines[6], "2 0 0");
  EXPECT_EQ(lines[7], "3 1 0");

  RoundOptions quiet;
  quiet.record = false;
  std::ostringstream sink;
  EXPECT_THROW(write_transcript(run_round(Bits{1, 0, 1}, identity_pair(3), Variant::subtractive, 5, quiet), sink),
               InputError);
}

// A single altered symbol in any repetition frame is caught, for every input
// with at least one repetition frame, at n <= 6.
TEST(Faults, InjectionSweepIdentity) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto id = identity_pair(n);
    for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
      const auto x = bits_of(mask, n);
      const auto w = weight(x);
      for (auto v : {Variant::subtractive, Variant::periodic}) {
        const std::size_t frames = 1 + (v == Variant::subtractive ? w : 6 * w);
        for (std::size_t f = 1; f < frames; ++f) {
          for (std::size_t ch = 0; ch < n; ++ch) {
            RoundOptions o;
            o.record = false;
            o.fault = Fault{f, ch, 1};
            const auto r = run_round(x, id, v, mask * 31 + f, o);
            ASSERT_FALSE(r.clean()) << to_string(v) << " x=" << describe(x) << " frame " << f
                                    << " channel " << ch;
          }
        }
      }
    }
  }
}

TEST(Faults, AnyDeltaDetectedOnSearchedPairs) {
  Rng rng(606);
  for (const auto& p : pairs()) {
    for (int trial = 0; trial < 30; ++trial) {
      auto x = random_bits(rng, p.n());
      x[rng.below(p.n())] = 1;
      for (auto v : {Variant::subtractive, Variant::periodic}) {
        const auto w = weight(x);
        const std::size_t frames = 1 + (v == Variant::subtractive ? w : 6 * w);
        RoundOptions o;
        o.fault = Fault{static_cast<std::size_t>(1 + rng.below(frames - 1)),
                        static_cast<std::size_t>(rng.below(p.t())),
                        static_cast<Residue>(1 + rng.below(5))};
        const auto r = run_round(x, p, v, rng.next(), o);
        // A corrupted symbol on a channel no receiver reads cannot be seen.
        bool visible = false;
        for (const auto& e : p.decoder_by_channel().row(o.fault->channel)) {
          visible = visible || mul_mod(e.value, o.fault->delta, 6) != 0;
        }
        if (visible) {
          EXPECT_FALSE(r.clean()) << to_string(v) << " x=" << describe(x);
        } else {
          EXPECT_TRUE(r.clean());
        }
      }
    }
  }
}

// The periodic sweep re-reads the base value, so a corrupted initial frame is
// caught. The subtractive receiver only ever sees differences against the
// corrupted base and can be fooled: here receiver 2 reads base 1 and a single
// diff 1, a perfectly consistent story for x_2 = 1.
TEST(Faults, InitialFrameCorruption) {
  const auto id = identity_pair(2);
  RoundOptions o;
  o.fault = Fault{0, 1, 1};
  const auto sub = run_round(Bits{1, 0}, id, Variant::subtractive, 1, o);
  EXPECT_TRUE(sub.clean());
  EXPECT_EQ(sub.delivered(), (Bits{1, 1}));
  const auto per = run_round(Bits{1, 0}, id, Variant::periodic, 1, o);
  EXPECT_FALSE(per.clean());

  for (std::size_t n = 1; n <= 5; ++n) {
    const auto p = identity_pair(n);
    for (std::uint64_t mask = 1; mask < (1ull << n); ++mask) {
      for (std::size_t ch = 0; ch < n; ++ch) {
        RoundOptions f;
        f.fault = Fault{0, ch, 1};
        EXPECT_FALSE(run_round(bits_of(mask, n), p, Variant::periodic, mask, f).clean());
      }
    }
  }
}

TEST(Messages, EightBitMessagesOverIdentity) {
  Rng rng(3);
  std::vector<Bits> msgs;
  for (int i = 0; i < 4; ++i) msgs.push_back(random_bits(rng, 8));
  for (auto v : {Variant::subtractive, Variant::periodic}) {
    const auto out = send_message(msgs, identity_pair(4), v, 77);
    EXPECT_TRUE(out.ok());
    EXPECT_EQ(out.received, msgs);
    std::size_t expect_frames = 0;
    for (std::size_t r = 0; r < 8; ++r) {
      std::size_t w = 0;
      for (const auto& m : msgs) w += m[r];
      expect_frames += 1 + (v == Variant::subtractive ? w : 6 * w);
    }
    EXPECT_EQ(out.frame_total, expect_frames);
  }
}

TEST(Messages, SingleRoundReducesToRunRound) {
  const auto& p = pairs().back();
  Rng rng(9);
  const auto x = random_bits(rng, p.n());
  std::vector<Bits> msgs;
  for (auto b : x) msgs.push_back(Bits{b});
  MessageOptions mo;
  mo.record = true;
  const auto out = send_message(msgs, p, Variant::subtractive, 10, mo);
  const auto direct = run_round(x, p, Variant::subtractive, round_seed(10, 0));
  ASSERT_EQ(out.rounds.size(), 1u);
  expect_same(out.rounds[0], direct);
}

TEST(Messages, FaultFlagsRound) {
  std::vector<Bits> msgs{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}};
  MessageOptions mo;
  mo.fault = MessageFault{1, Fault{1, 0, 1}};
  const auto out = send_message(msgs, identity_pair(3), Variant::subtractive, 4, mo);
  EXPECT_EQ(out.failed_rounds, (std::vector<std::size_t>{1}));
  EXPECT_THROW(send_message({{1}, {0}}, identity_pair(3), Variant::subtractive, 1), InputError);
  EXPECT_THROW(send_message({{1}, {0, 1}, {1}}, identity_pair(3), Variant::subtractive, 1), InputError);
}

// Order of the three 1-positions, read off the identity pair's frames.
std::vector<std::size_t> frame_order(const RoundResult& r) {
  std::vector<std::size_t> order;
  const auto& first = r.transcript.frames[0].symbols;
  for (std::size_t f = 1; f < r.transcript.frames.size(); ++f) {
    const auto& s = r.transcript.frames[f].symbols;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] != first[j]) order.push_back(j);
    }
  }
  return order;
}

// Chi-square goodness of fit of the 3! orders over 10^4 rounds (5 degrees of
// freedom; 20.52 is the 0.999 quantile).
TEST(Permutations, OrdersAreUniformAcrossRounds) {
  const auto id = identity_pair(6);
  const Bits x{0, 1, 0, 1, 1, 0};
  std::vector<Bits> msgs(6, Bits(10000));
  for (std::size_t i = 0; i < 6; ++i) std::fill(msgs[i].begin(), msgs[i].end(), x[i]);
  MessageOptions mo;
  mo.record = true;
  const auto out = send_message(msgs, id, Variant::subtractive, 2718, mo);
  ASSERT_TRUE(out.ok());
  std::map<std::vector<std::size_t>, int> counts;
  std::size_t changed = 0;
  std::vector<std::size_t> previous;
  for (const auto& r : out.rounds) {
    const auto order = frame_order(r);
    ++counts[order];
    if (!previous.empty() && previous != order) ++changed;
    previous = order;
  }
  ASSERT_EQ(counts.size(), 6u);
  const double expected = 10000.0 / 6;
  double chi2 = 0;
  for (const auto& [order, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
  EXPECT_LT(chi2, 20.52);
  // Consecutive rounds differ with probability 5/6; allow 4 sigma.
  const double pairs_n = 9999, pd = 5.0 / 6;
  const double sigma = std::sqrt(pairs_n * pd * (1 - pd));
  EXPECT_NEAR(static_cast<double>(changed), pairs_n * pd, 4 * sigma);
}

TEST(Seeds, RoundSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::size_t r = 0; r < 1000; ++r) seen.insert(round_seed(1, r));
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
}  // namespace hdt
