#pragma once

// What a receiver learns about bits addressed to others.
//
// Receiver i's view of a subtractive round is its base value x'_i followed by
// the ordered differences x'_i - x''_i, one per repetition frame. Each
// difference is the coefficient (B C^T)_{p,i} of the zeroed position p, so the
// view is a random arrangement (driven by the permutation) of the multiset of
// column-i coefficients at the 1-positions of x. The "channels" view mode
// models a receiver that records every symbol of every frame instead.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "hdt/pair.hpp"
#include "hdt/protocol.hpp"

namespace hdt {

struct ObservationMultiset {
  std::size_t count0 = 0;
  std::size_t count1 = 0;
  std::size_t count3 = 0;
  std::size_t count4 = 0;

  std::size_t total() const { return count0 + count1 + count3 + count4; }
  friend bool operator==(const ObservationMultiset&, const ObservationMultiset&) = default;
  auto operator<=>(const ObservationMultiset&) const = default;
};

/// Tally of (B C^T)_{p,i} over the positions p with x_p = 1.
ObservationMultiset column_multiset(const TransmissionPair& pair, std::size_t i,
                                    std::span<const std::uint8_t> bits);

enum class ViewMode { receiver, channels };
std::string to_string(ViewMode mode);
std::optional<ViewMode> parse_view_mode(std::string_view text);

using View = std::vector<Residue>;
using Probability = boost::rational<std::int64_t>;

struct ViewDistribution {
  std::map<View, Probability> probabilities;

  Probability total() const;
  friend bool operator==(const ViewDistribution&, const ViewDistribution&) = default;
};

inline constexpr std::size_t kDefaultEnumerationCap = 8;

/// Enumerates all w! orders of the 1-positions and aggregates receiver i's
/// view. Throws InfeasibleError when w exceeds cap.
ViewDistribution view_distribution_exact(const TransmissionPair& pair,
                                         std::span<const std::uint8_t> bits, std::size_t i,
                                         ViewMode mode = ViewMode::receiver,
                                         std::size_t cap = kDefaultEnumerationCap);

/// Same distribution, built by enumerating distinct arrangements of the
/// per-position observations and weighting each by prod(c_k!) / w!. Scales to
/// larger w when many observations coincide.
ViewDistribution view_distribution_by_arrangement(const TransmissionPair& pair,
                                                  std::span<const std::uint8_t> bits,
                                                  std::size_t i,
                                                  ViewMode mode = ViewMode::receiver);

/// 1/2 sum |p - q|.
Probability total_variation(const ViewDistribution& a, const ViewDistribution& b);

struct Indistinguishability {
  bool equal = true;
  Probability distance{0};
};

/// Requires x_i == y_i; exact comparison of the two view distributions.
Indistinguishability indistinguishability(const TransmissionPair& pair,
                                          std::span<const std::uint8_t> x,
                                          std::span<const std::uint8_t> y, std::size_t i,
                                          ViewMode mode = ViewMode::receiver,
                                          std::size_t cap = kDefaultEnumerationCap);

struct LeakageQuery {
  std::size_t i = 0;  // observing receiver, 0-based
  std::size_t j = 1;  // foreign sender, 0-based
  double prior = 0.5;    // P(x_j = 1)
  double context = 0.5;  // P(x_k = 1) for every other k, independently
  ViewMode mode = ViewMode::receiver;
};

enum class LeakageMethod { exact, sample };
std::string to_string(LeakageMethod method);

struct LeakageReport {
  LeakageQuery query;
  LeakageMethod method = LeakageMethod::exact;
  std::size_t samples = 0;
  /// I(x_j ; view), bits.
  double leakage_bits = 0;
  /// I(x_j ; view | w, x_i): what the view reveals beyond the frame count and
  /// the receiver's own bit.
  double excess_bits = 0;
  /// I(x_j ; w): the part carried by the frame count alone.
  double weight_bits = 0;
  /// Delta-method standard error of leakage_bits (sampling only).
  double std_error = 0;
};

/// Upper bound on enumerated (x, arrangement) pairs in exact mode.
inline constexpr std::uint64_t kDefaultLeakageWorkCap = 20'000'000;

/// Exact enumeration over all x in {0,1}^n and all distinct arrangements.
/// Throws InfeasibleError when the work exceeds work_cap, InputError when i == j.
LeakageReport bit_leakage_exact(const TransmissionPair& pair, const LeakageQuery& query,
                                std::uint64_t work_cap = kDefaultLeakageWorkCap);

/// Monte-Carlo: draws x from the prior, runs real rounds with fresh seeds and
/// estimates the mutual informations from the observed views (Miller-Madow
/// corrected).
LeakageReport bit_leakage_sampled(const TransmissionPair& pair, const LeakageQuery& query,
                                  std::size_t samples, std::uint64_t seed);

/// "key: value" report, one field per line. Indices are printed 1-based.
void write_leakage_report(const LeakageReport& report, const std::string& pair_id,
                          std::ostream& out);

}  // namespace hdt
