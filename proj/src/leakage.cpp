#include "hdt/leakage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include <boost/multiprecision/cpp_int.hpp>

#include "hdt/error.hpp"

namespace hdt {

using ExactProbability = boost::multiprecision::cpp_rational;

std::string to_string(ViewMode mode) { return mode == ViewMode::receiver ? "receiver" : "channels"; }

std::optional<ViewMode> parse_view_mode(std::string_view text) {
  if (text == "receiver") return ViewMode::receiver;
  if (text == "channels") return ViewMode::channels;
  return std::nullopt;
}

std::string to_string(LeakageMethod method) {
  return method == LeakageMethod::exact ? "exact" : "sample";
}

ObservationMultiset column_multiset(const TransmissionPair& pair, std::size_t i,
                                    std::span<const std::uint8_t> bits) {
  if (i >= pair.n()) throw InputError("receiver index out of range");
  if (bits.size() != pair.n()) throw InputError("bit vector length must equal n");
  ObservationMultiset out;
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (bits[p] == 0) continue;
    switch (pair.coefficient(p, i)) {
      case 0: ++out.count0; break;
      case 1: ++out.count1; break;
      case 3: ++out.count3; break;
      case 4: ++out.count4; break;
      default: throw InputError("pair is not certified: coefficient outside {0,1,3,4}");
    }
  }
  return out;
}

Probability ViewDistribution::total() const {
  Probability sum{0};
  for (const auto& [view, p] : probabilities) sum += p;
  return sum;
}

namespace {

std::int64_t factorial(std::size_t k) {
  if (k > 20) throw InfeasibleError("factorial overflow: more than 20 repetition frames");
  std::int64_t f = 1;
  for (std::size_t q = 2; q <= k; ++q) f *= static_cast<std::int64_t>(q);
  return f;
}

// The fixed view prefix plus one observation chunk per 1-position, computed
// by actually encoding and decoding each repetition frame.
struct PositionObservations {
  View header;
  std::vector<View> chunks;  // in increasing position order
};

PositionObservations observe_positions(const TransmissionPair& pair,
                                       std::span<const std::uint8_t> bits, std::size_t i,
                                       ViewMode mode) {
  if (i >= pair.n()) throw InputError("receiver index out of range");
  if (bits.size() != pair.n()) throw InputError("bit vector length must equal n");
  for (auto b : bits) {
    if (b > 1) throw InputError("bits must be 0 or 1");
  }
  std::vector<Residue> x(bits.begin(), bits.end());
  const auto initial = encode(ResidueVector(kProtocolModulus, x), pair);
  const Residue base = decode(initial, pair)[i];

  PositionObservations out;
  if (mode == ViewMode::receiver) {
    out.header = {base};
  } else {
    out.header.assign(initial.symbols.entries().begin(), initial.symbols.entries().end());
  }
  for (std::size_t p = 0; p < bits.size(); ++p) {
    if (bits[p] == 0) continue;
    x[p] = 0;
    const auto frame = encode(ResidueVector(kProtocolModulus, x), pair);
    x[p] = 1;
    if (mode == ViewMode::receiver) {
      out.chunks.push_back({sub_mod(base, decode(frame, pair)[i], kProtocolModulus)});
    } else {
      out.chunks.emplace_back(frame.symbols.entries().begin(), frame.symbols.entries().end());
    }
  }
  return out;
}

View assemble(const PositionObservations& obs, std::span<const std::size_t> order) {
  View v = obs.header;
  for (auto k : order) v.insert(v.end(), obs.chunks[k].begin(), obs.chunks[k].end());
  return v;
}

// Distinct chunk classes: ids[k] is the class of chunk k, ids sorted ascending.
std::vector<std::size_t> chunk_classes(const PositionObservations& obs,
                                       std::vector<View>& representatives) {
  std::map<View, std::size_t> ids;
  for (const auto& c : obs.chunks) ids.emplace(c, 0);
  std::size_t next = 0;
  for (auto& [view, id] : ids) {
    id = next++;
    representatives.push_back(view);
  }
  std::vector<std::size_t> out;
  for (const auto& c : obs.chunks) out.push_back(ids.at(c));
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t arrangement_count(const std::vector<std::size_t>& sorted_ids) {
  // multinomial w! / prod(c!) without overflow for w <= 20
  std::uint64_t result = 1;
  std::size_t placed = 0;
  std::size_t k = 0;
  while (k < sorted_ids.size()) {
    std::size_t run = 1;
    while (k + run < sorted_ids.size() && sorted_ids[k + run] == sorted_ids[k]) ++run;
    for (std::size_t r = 1; r <= run; ++r) {
      ++placed;
      result = result * placed / r;
    }
    k += run;
  }
  return result;
}

template <typename Visit>
void for_each_arrangement(const PositionObservations& obs, Visit&& visit) {
  std::vector<View> reps;
  auto ids = chunk_classes(obs, reps);
  std::int64_t same = 1;
  for (std::size_t k = 0; k < ids.size();) {
    std::size_t run = 1;
    while (k + run < ids.size() && ids[k + run] == ids[k]) ++run;
    same *= factorial(run);
    k += run;
  }
  const Probability p(same, factorial(ids.size()));
  do {
    View v = obs.header;
    for (auto id : ids) v.insert(v.end(), reps[id].begin(), reps[id].end());
    visit(v, p);
  } while (std::next_permutation(ids.begin(), ids.end()));
}

}  // namespace

ViewDistribution view_distribution_exact(const TransmissionPair& pair,
                                         std::span<const std::uint8_t> bits, std::size_t i,
                                         ViewMode mode, std::size_t cap) {
  const auto obs = observe_positions(pair, bits, i, mode);
  const std::size_t w = obs.chunks.size();
  if (w > cap) {
    throw InfeasibleError("Hamming weight " + std::to_string(w) + " exceeds the enumeration cap " +
                          std::to_string(cap) + "; use sampling instead");
  }
  const std::int64_t orders = factorial(w);
  ViewDistribution out;
  if (w == 0) {
    out.probabilities[obs.header] = Probability(1);
    return out;
  }

  // One block per leading position, merged in block order.
  std::vector<std::map<View, std::int64_t>> blocks(w);
  const auto block_count = static_cast<std::int64_t>(w);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t lead = 0; lead < block_count; ++lead) {
    std::vector<std::size_t> order(w);
    std::iota(order.begin(), order.end(), 0);
    std::rotate(order.begin(), order.begin() + lead, order.begin() + lead + 1);
    auto& counts = blocks[lead];
    do {
      ++counts[assemble(obs, order)];
    } while (std::next_permutation(order.begin() + 1, order.end()));
  }
  std::map<View, std::int64_t> merged;
  for (const auto& block : blocks) {
    for (const auto& [view, c] : block) merged[view] += c;
  }
  for (const auto& [view, c] : merged) out.probabilities[view] = Probability(c, orders);
  return out;
}

ViewDistribution view_distribution_by_arrangement(const TransmissionPair& pair,
                                                  std::span<const std::uint8_t> bits,
                                                  std::size_t i, ViewMode mode) {
  const auto obs = observe_positions(pair, bits, i, mode);
  ViewDistribution out;
  for_each_arrangement(obs, [&](const View& v, const Probability& p) {
    out.probabilities[v] += p;
  });
  return out;
}

Probability total_variation(const ViewDistribution& a, const ViewDistribution& b) {
  Probability sum{0};
  for (const auto& [view, p] : a.probabilities) {
    auto it = b.probabilities.find(view);
    Probability q = it == b.probabilities.end() ? Probability(0) : it->second;
    sum += p > q ? p - q : q - p;
  }
  for (const auto& [view, q] : b.probabilities) {
    if (!a.probabilities.count(view)) sum += q;
  }
  return sum / 2;
}

Indistinguishability indistinguishability(const TransmissionPair& pair,
                                          std::span<const std::uint8_t> x,
                                          std::span<const std::uint8_t> y, std::size_t i,
                                          ViewMode mode, std::size_t cap) {
  if (x.size() != pair.n() || y.size() != pair.n()) throw InputError("bit vector length must equal n");
  if (i >= pair.n()) throw InputError("receiver index out of range");
  if (x[i] != y[i]) throw InputError("indistinguishability needs x_i == y_i");
  auto dx = view_distribution_exact(pair, x, i, mode, cap);
  auto dy = view_distribution_exact(pair, y, i, mode, cap);
  Indistinguishability out;
  out.distance = total_variation(dx, dy);
  out.equal = dx == dy;
  return out;
}

// ---------------------------------------------------------------------------
// Mutual information

namespace {

// Joint mass of (key, x_j). Key = [w, x_i, view...]; w and x_i are functions
// of the view, so prefixing them leaves I(x_j; view) unchanged.
template <typename P>
using Joint = std::map<View, std::array<P, 2>>;

View keyed(const View& view, std::size_t w, std::uint8_t own) {
  View key{static_cast<Residue>(w), own};
  key.insert(key.end(), view.begin(), view.end());
  return key;
}

template <typename P>
Joint<P> project(const Joint<P>& joint, std::size_t prefix) {
  Joint<P> out;
  for (const auto& [key, mass] : joint) {
    View head(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(prefix));
    auto& slot = out[head];
    slot[0] += mass[0];
    slot[1] += mass[1];
  }
  return out;
}

double log2_ratio(const ExactProbability& r) {
  if (r == 1) return 0.0;
  return static_cast<double>(std::log2(static_cast<long double>(r)));
}

// I(x_j ; key) with exact rationals; terms with ratio exactly 1 vanish exactly.
double mutual_information(const Joint<ExactProbability>& joint) {
  std::array<ExactProbability, 2> marginal{0, 0};
  for (const auto& [key, mass] : joint) {
    marginal[0] += mass[0];
    marginal[1] += mass[1];
  }
  long double sum = 0;
  for (const auto& [key, mass] : joint) {
    const ExactProbability pk = mass[0] + mass[1];
    for (int b = 0; b < 2; ++b) {
      if (mass[b] == 0) continue;
      const ExactProbability ratio = mass[b] / (pk * marginal[b]);
      sum += static_cast<long double>(mass[b]) * log2_ratio(ratio);
    }
  }
  return static_cast<double>(sum);
}

// I(x_j ; key | key prefix of length `prefix`).
double conditional_mutual_information(const Joint<ExactProbability>& joint, std::size_t prefix) {
  const auto groups = project(joint, prefix);
  long double sum = 0;
  for (const auto& [key, mass] : joint) {
    const View head(key.begin(), key.begin() + static_cast<std::ptrdiff_t>(prefix));
    const auto& g = groups.at(head);
    const ExactProbability pg = g[0] + g[1];
    const ExactProbability pk = mass[0] + mass[1];
    for (int b = 0; b < 2; ++b) {
      if (mass[b] == 0) continue;
      const ExactProbability ratio = mass[b] * pg / (pk * g[b]);
      sum += static_cast<long double>(mass[b]) * log2_ratio(ratio);
    }
  }
  return static_cast<double>(sum);
}

ExactProbability to_exact(double p) {
  // Decimal inputs such as 0.3 are taken at 12 significant decimals.
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("probabilities must lie in [0, 1]");
  const std::int64_t scale = 1'000'000'000'000;
  return ExactProbability(static_cast<std::int64_t>(std::llround(p * static_cast<double>(scale))),
                          scale);
}

void check_query(const TransmissionPair& pair, const LeakageQuery& q) {
  if (q.i >= pair.n() || q.j >= pair.n()) throw InputError("receiver/sender index out of range");
  if (q.i == q.j) throw InputError("bit leakage needs j != i");
}

}  // namespace

LeakageReport bit_leakage_exact(const TransmissionPair& pair, const LeakageQuery& query,
                                std::uint64_t work_cap) {
  check_query(pair, query);
  const std::size_t n = pair.n();
  if (n > 24) throw InfeasibleError("exact leakage enumerates 2^n inputs; n = " + std::to_string(n));
  const ExactProbability prior = to_exact(query.prior);
  const ExactProbability context = to_exact(query.context);

  Joint<ExactProbability> joint;
  std::uint64_t work = 0;
  Bits x(n);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    std::size_t w = 0;
    ExactProbability px = 1;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = static_cast<std::uint8_t>((code >> k) & 1u);
      w += x[k];
      const ExactProbability& q = k == query.j ? prior : context;
      px *= x[k] ? q : 1 - q;
    }
    if (px == 0) continue;
    const auto obs = observe_positions(pair, x, query.i, query.mode);
    std::vector<View> reps;
    work += arrangement_count(chunk_classes(obs, reps));
    if (work > work_cap) {
      throw InfeasibleError("exact leakage needs more than " + std::to_string(work_cap) +
                            " enumerated views; use sampling instead");
    }
    for_each_arrangement(obs, [&](const View& v, const Probability& p) {
      joint[keyed(v, w, x[query.i])][x[query.j]] +=
          px * ExactProbability(p.numerator(), p.denominator());
    });
  }

  LeakageReport out;
  out.query = query;
  out.method = LeakageMethod::exact;
  out.leakage_bits = mutual_information(joint);
  out.excess_bits = conditional_mutual_information(joint, 2);
  out.weight_bits = mutual_information(project(joint, 1));
  return out;
}

LeakageReport bit_leakage_sampled(const TransmissionPair& pair, const LeakageQuery& query,
                                  std::size_t samples, std::uint64_t seed) {
  check_query(pair, query);
  if (samples == 0) throw InputError("sampling needs at least one sample");
  if (!(query.prior >= 0 && query.prior <= 1 && query.context >= 0 && query.context <= 1)) {
    throw InputError("probabilities must lie in [0, 1]");
  }
  const std::size_t n = pair.n();
  Rng rng(seed);
  Joint<double> counts;
  Bits x(n);
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t w = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double q = k == query.j ? query.prior : query.context;
      x[k] = rng.unit() < q ? 1 : 0;
      w += x[k];
    }
    const auto round = run_round(x, pair, Variant::subtractive, rng.next());
    const auto& tr = round.transcript;
    View view;
    if (query.mode == ViewMode::receiver) {
      view.push_back(tr.bases[query.i]);
      for (auto o : tr.observations[query.i]) {
        view.push_back(sub_mod(tr.bases[query.i], o, kProtocolModulus));
      }
    } else {
      for (const auto& f : tr.frames) {
        view.insert(view.end(), f.symbols.entries().begin(), f.symbols.entries().end());
      }
    }
    counts[keyed(view, w, x[query.i])][x[query.j]] += 1.0;
  }

  const double total = static_cast<double>(samples);
  auto plug_in = [total](const Joint<double>& joint, double* second_moment, std::int64_t* cells) {
    std::array<double, 2> marginal{0, 0};
    for (const auto& [key, c] : joint) {
      marginal[0] += c[0];
      marginal[1] += c[1];
    }
    double mi = 0;
    double m2 = 0;
    std::size_t nonzero = 0;
    for (const auto& [key, c] : joint) {
      const double ck = c[0] + c[1];
      for (int b = 0; b < 2; ++b) {
        if (c[b] == 0) continue;
        ++nonzero;
        const double l = std::log2(c[b] * total / (ck * marginal[b]));
        mi += c[b] / total * l;
        m2 += c[b] / total * l * l;
      }
    }
    if (second_moment) *second_moment = m2;
    if (cells) {
      const auto kb = static_cast<std::int64_t>((marginal[0] > 0) + (marginal[1] > 0));
      // Miller-Madow: (K_joint - K_key - K_bit + 1), may be negative
      *cells = static_cast<std::int64_t>(nonzero) + 1 - static_cast<std::int64_t>(joint.size()) - kb;
    }
    return mi;
  };
  auto corrected = [&](const Joint<double>& joint, double* m2) {
    std::int64_t dof = 0;
    const double mi = plug_in(joint, m2, &dof);
    return mi - static_cast<double>(dof) / (2.0 * total * std::log(2.0));
  };

  LeakageReport out;
  out.query = query;
  out.method = LeakageMethod::sample;
  out.samples = samples;
  double m2 = 0;
  out.leakage_bits = corrected(counts, &m2);
  const double raw = plug_in(counts, nullptr, nullptr);
  out.std_error = std::sqrt(std::max(0.0, m2 - raw * raw) / total);
  out.weight_bits = corrected(project(counts, 1), nullptr);
  out.excess_bits = out.leakage_bits - corrected(project(counts, 2), nullptr);
  return out;
}

void write_leakage_report(const LeakageReport& report, const std::string& pair_id,
                          std::ostream& out) {
  const auto& q = report.query;
  out << "pair: " << pair_id << '\n'
      << "i: " << q.i + 1 << '\n'
      << "j: " << q.j + 1 << '\n'
      << "prior: " << q.prior << '\n'
      << "context: " << q.context << '\n'
      << "view: " << to_string(q.mode) << '\n'
      << "method: " << to_string(report.method) << '\n'
      << "samples: " << report.samples << '\n'
      << std::fixed << std::setprecision(9)
      << "leakage_bits: " << report.leakage_bits << '\n'
      << "excess_bits: " << report.excess_bits << '\n'
      << "weight_bits: " << report.weight_bits << '\n';
  if (report.method == LeakageMethod::sample) {
    out << "std_error: " << report.std_error << '\n'
        << "ci_low: " << report.leakage_bits - 3 * report.std_error << '\n'
        << "ci_high: " << report.leakage_bits + 3 * report.std_error << '\n';
  }
  out << std::defaultfloat;
}

}  // namespace hdt
