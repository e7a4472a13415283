#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "hdt/error.hpp"
#include "hdt/leakage.hpp"
#include "hdt/pair.hpp"
#include "hdt/poly.hpp"
#include "hdt/protocol.hpp"

namespace hdt::cli {
namespace {

struct Failure {
  int code;
  std::string tag;
  std::string detail;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed, std::ostream& out) {
  if (seed) return *seed;
  std::random_device rd;
  const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  out << "note: seed drawn from entropy; pass --seed " << s << " to replay\n";
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoError, "io", "cannot open " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TransmissionPair open_pair(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoError, "io", "cannot open " + path};
  return load_pair(in);
}

Bits parse_bit_string(const std::string& text) {
  Bits out;
  for (char c : text) {
    if (c == '0' || c == '1') {
      out.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      throw Failure{kUsage, "usage", std::string("bits must be 0 or 1, got '") + c + "'"};
    }
  }
  return out;
}

// -- gen --------------------------------------------------------------------

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  std::size_t t = 0;
  std::uint64_t budget = 1'000'000;
  std::optional<std::uint64_t> seed;
  std::string mode = "canonical";
  std::string out_path;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  std::ostringstream body;
  std::optional<TransmissionPair> pair;
  if (a.kind == "identity") {
    pair = identity_pair(a.n);
  } else {
    if (a.t == 0) throw Failure{kUsage, "usage", "gen search needs --t"};
    auto mode = parse_pair_mode(a.mode);
    if (!mode) throw Failure{kUsage, "usage", "unknown mode " + a.mode};
    const auto seed = resolve_seed(a.seed, body);
    auto found = search_pair(a.n, a.t, a.budget, seed, *mode);
    body << "nodes: " << found.nodes << '\n';
    if (!found.pair) {
      body << "exhausted: " << (found.proved_infeasible ? "yes" : "no") << '\n';
      throw Failure{kFailure, "no-pair-found", body.str()};
    }
    pair = std::move(found.pair);
    body << "seed: " << seed << '\n';
  }
  std::ofstream file(a.out_path, std::ios::binary);
  if (!file) throw Failure{kIoError, "io", "cannot write " + a.out_path};
  save_pair(*pair, file);
  file.close();
  if (!file) throw Failure{kIoError, "io", "write failed for " + a.out_path};

  out << "OK\n"
      << "n: " << pair->n() << '\n'
      << "t: " << pair->t() << '\n'
      << "mode: " << to_string(pair->mode()) << '\n'
      << "certified: yes\n"
      << body.str() << "written: " << a.out_path << '\n';
  return kOk;
}

// -- verify -----------------------------------------------------------------

int cmd_verify(const std::string& path, std::ostream& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kIoError, "io", "cannot open " + path};
  const auto file = read_pair_file(in);
  auto check = verify_pair(file.b, file.c, file.mode);
  if (auto* failure = std::get_if<StructuralFailure>(&check)) {
    throw Failure{kFailure, "structure", "offending: " + failure->describe() + '\n'};
  }
  const auto& pair = std::get<TransmissionPair>(check);
  out << "OK\n"
      << "n: " << pair.n() << '\n'
      << "t: " << pair.t() << '\n'
      << "mode: " << to_string(pair.mode()) << '\n'
      << "U: " << pair.u().nnz() << '\n'
      << "V: " << pair.v().nnz() << '\n';
  if (pair.mode() == PairMode::relaxed) {
    out << "note: relaxed pair, entries range over Z_6 rather than {0,1}\n";
  }
  return kOk;
}

// -- repcheck ---------------------------------------------------------------

int cmd_repcheck(const std::string& f_path, const std::string& g_path, const std::string& modulus,
                 const std::vector<std::string>& required, std::ostream& out) {
  Factorization fac = [&] {
    try {
      return Factorization::parse(modulus);
    } catch (const InputError& e) {
      throw Failure{kUsage, "usage", std::string("bad --modulus: ") + e.what()};
    }
  }();
  std::vector<RepresentationKind> kinds;
  for (const auto& r : required) {
    auto k = parse_representation_kind(r);
    if (!k) throw Failure{kUsage, "usage", "unknown kind " + r};
    kinds.push_back(*k);
  }
  const auto f = SparsePolynomial::parse(read_file(f_path), fac.modulus());
  const auto g = SparsePolynomial::parse(read_file(g_path), fac.modulus());

  std::ostringstream body;
  body << "modulus: " << fac.modulus() << " = " << fac.to_string() << '\n';
  const auto found = classify(f, g, fac);
  body << "kinds:";
  if (found.empty()) body << " none";
  for (auto k : {RepresentationKind::alternative, RepresentationKind::zero_a_strong,
                 RepresentationKind::one_a_strong}) {
    if (found.count(k)) body << ' ' << to_string(k);
  }
  body << '\n';

  std::optional<RepresentationKind> first_missing;
  for (auto k : {RepresentationKind::alternative, RepresentationKind::zero_a_strong,
                 RepresentationKind::one_a_strong}) {
    RepresentationWitness w = k == RepresentationKind::alternative     ? is_alternative(f, g, fac)
                              : k == RepresentationKind::zero_a_strong ? is_0_a_strong(f, g, fac)
                                                                       : is_1_a_strong(f, g, fac);
    body << to_string(k) << ": " << (w.verdict ? "yes" : "no");
    if (!w.verdict) {
      body << " (witness " << w.failing_monomial->to_string() << ':';
      for (std::size_t i = 0; i < fac.size(); ++i) {
        body << " mod " << fac.factors()[i].value() << (w.per_prime_agreement[i] ? " agree" : " differ");
        if (i + 1 < fac.size()) body << ',';
      }
      body << ')';
      if (!first_missing && std::find(kinds.begin(), kinds.end(), k) != kinds.end()) {
        first_missing = k;
      }
    }
    body << '\n';
  }
  if (first_missing) throw Failure{kFailure, "not-" + to_string(*first_missing), body.str()};
  out << "OK\n" << body.str();
  return kOk;
}

// -- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string pair_path;
  std::string bits;
  std::string messages;
  std::string message_file;
  std::string variant = "subtractive";
  std::optional<std::uint64_t> seed;
  std::string transcript;
  std::string inject;  // round:frame:channel[:delta], 1-based round and channel
};

std::vector<Bits> collect_messages(const SimulateArgs& a, std::size_t n) {
  const int given = !a.bits.empty() + !a.messages.empty() + !a.message_file.empty();
  if (given != 1) {
    throw Failure{kUsage, "usage", "give exactly one of --bits, --messages, --message-file"};
  }
  std::vector<Bits> out;
  if (!a.bits.empty()) {
    std::string text = a.bits;
    std::replace(text.begin(), text.end(), ',', ' ');
    for (auto b : parse_bit_string(text)) out.push_back({b});
  } else {
    std::string text = a.messages.empty() ? read_file(a.message_file) : a.messages;
    if (!a.messages.empty()) std::replace(text.begin(), text.end(), ',', '\n');
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
      auto bits = parse_bit_string(line);
      if (!bits.empty()) out.push_back(std::move(bits));
    }
  }
  if (out.size() != n) {
    throw Failure{kUsage, "usage",
                  "pair has n = " + std::to_string(n) + " senders, got " +
                      std::to_string(out.size()) + " messages"};
  }
  return out;
}

std::optional<MessageFault> parse_inject(const std::string& spec) {
  if (spec.empty()) return std::nullopt;
  std::vector<std::uint64_t> parts;
  std::istringstream ss(spec);
  for (std::string piece; std::getline(ss, piece, ':');) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stoull(piece, &used));
      if (used != piece.size()) throw std::invalid_argument(piece);
    } catch (const std::exception&) {
      throw Failure{kUsage, "usage", "--inject expects round:frame:channel[:delta]"};
    }
  }
  if (parts.size() < 3 || parts.size() > 4 || parts[0] == 0 || parts[2] == 0) {
    throw Failure{kUsage, "usage", "--inject expects round:frame:channel[:delta] (1-based round, channel)"};
  }
  MessageFault f;
  f.round = parts[0] - 1;
  f.fault.frame = parts[1];
  f.fault.channel = parts[2] - 1;
  f.fault.delta = parts.size() == 4 ? static_cast<Residue>(parts[3]) : 1;
  return f;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const auto pair = open_pair(a.pair_path);
  const auto messages = collect_messages(a, pair.n());
  const auto variant = parse_variant(a.variant);
  if (!variant) throw Failure{kUsage, "usage", "unknown variant " + a.variant};
  std::ostringstream body;
  const auto seed = resolve_seed(a.seed, body);

  MessageOptions opts;
  opts.record = !a.transcript.empty();
  opts.fault = parse_inject(a.inject);
  const auto result = send_message(messages, pair, *variant, seed, opts);

  if (!a.transcript.empty()) {
    std::ofstream file(a.transcript, std::ios::binary);
    if (!file) throw Failure{kIoError, "io", "cannot write " + a.transcript};
    for (const auto& round : result.rounds) write_transcript(round, file);
  }

  const std::size_t u = messages.front().size();
  body << "variant: " << to_string(*variant) << '\n'
       << "seed: " << seed << '\n'
       << "rounds: " << u << '\n'
       << "frames: " << result.frame_total << '\n'
       << "delivered:\n";
  for (std::size_t i = 0; i < result.received.size(); ++i) {
    body << "R" << i + 1 << ' ';
    for (auto b : result.received[i]) body << static_cast<int>(b);
    body << '\n';
  }
  if (!result.ok()) {
    body << "error rounds:";
    for (auto r : result.failed_rounds) body << ' ' << r + 1;
    body << '\n';
    throw Failure{kFailure, "error-detected", body.str()};
  }
  out << "OK\n" << body.str();
  return kOk;
}

// -- leakage ----------------------------------------------------------------

struct LeakageArgs {
  std::string pair_path;
  std::size_t i = 0;
  std::size_t j = 0;
  std::string method = "exact";
  std::size_t samples = 100'000;
  std::optional<std::uint64_t> seed;
  double prior = 0.5;
  double context = 0.5;
  std::string view = "receiver";
};

int cmd_leakage(const LeakageArgs& a, std::ostream& out) {
  if (a.i == 0 || a.j == 0) throw Failure{kUsage, "usage", "--i and --j are 1-based"};
  if (a.i == a.j) throw Failure{kUsage, "usage", "--i and --j must differ"};
  const auto pair = open_pair(a.pair_path);
  if (a.i > pair.n() || a.j > pair.n()) throw Failure{kUsage, "usage", "index exceeds n"};
  auto mode = parse_view_mode(a.view);
  if (!mode) throw Failure{kUsage, "usage", "unknown view " + a.view};

  LeakageQuery q{a.i - 1, a.j - 1, a.prior, a.context, *mode};
  std::ostringstream body;
  LeakageReport report;
  if (a.method == "exact") {
    try {
      report = bit_leakage_exact(pair, q);
    } catch (const InfeasibleError& e) {
      throw Failure{kUsage, "infeasible",
                    std::string(e.what()) + "\nhint: rerun with --method sample --samples N\n"};
    }
  } else if (a.method == "sample") {
    const auto seed = resolve_seed(a.seed, body);
    body << "seed: " << seed << '\n';
    report = bit_leakage_sampled(pair, q, a.samples, seed);
  } else {
    throw Failure{kUsage, "usage", "unknown method " + a.method};
  }
  write_leakage_report(report, a.pair_path, body);
  body << "note: the repetition count reveals the Hamming weight of x to every receiver\n";
  out << "OK\n" << body.str();
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-density multi-channel transmission simulator", "hdt"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate and certify an encoder/decoder pair");
  gen_cmd->add_option("kind", gen.kind, "identity | search")
      ->required()
      ->check(CLI::IsMember({"identity", "search"}));
  gen_cmd->add_option("--n", gen.n, "Number of senders")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--t", gen.t, "Number of channels (search)");
  gen_cmd->add_option("--budget", gen.budget, "Search node budget");
  gen_cmd->add_option("--seed", gen.seed, "Search seed");
  gen_cmd->add_option("--mode", gen.mode, "canonical | relaxed");
  gen_cmd->add_option("--out", gen.out_path, "Output pair file")->required();

  std::string verify_path;
  auto* verify_cmd = app.add_subcommand("verify", "Certify a pair file");
  verify_cmd->add_option("pair", verify_path, "Pair file")->required();

  std::string f_path, g_path, modulus = "2*3";
  std::vector<std::string> required_kinds;
  auto* rep_cmd = app.add_subcommand("repcheck", "Classify g as a representation of f");
  rep_cmd->add_option("f", f_path, "File with f")->required();
  rep_cmd->add_option("g", g_path, "File with g")->required();
  rep_cmd->add_option("--modulus", modulus, "Prime-power factorization, e.g. 2*3 or 2^2*3");
  rep_cmd->add_option("--require", required_kinds,
                      "Fail unless g is this kind (alternative, 0-a-strong, 1-a-strong)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Transmit messages through a pair");
  sim_cmd->add_option("pair", sim.pair_path, "Pair file")->required();
  sim_cmd->add_option("--bits", sim.bits, "One bit per sender, a single round (101 or 1,0,1)");
  sim_cmd->add_option("--messages", sim.messages, "Comma-separated per-sender bit strings");
  sim_cmd->add_option("--message-file", sim.message_file, "One line of bits per sender");
  sim_cmd->add_option("--variant", sim.variant, "subtractive | periodic");
  sim_cmd->add_option("--seed", sim.seed, "Permutation seed");
  sim_cmd->add_option("--transcript", sim.transcript, "Write HDT-ROUND transcript here");
  sim_cmd->add_option("--inject", sim.inject,
                      "Corrupt one symbol: round:frame:channel[:delta] (round, channel 1-based; frame 0 is the initial frame)");

  LeakageArgs leak;
  auto* leak_cmd = app.add_subcommand("leakage", "Measure what receiver i learns about bit j");
  leak_cmd->add_option("pair", leak.pair_path, "Pair file")->required();
  leak_cmd->add_option("--i", leak.i, "Observing receiver (1-based)")->required();
  leak_cmd->add_option("--j", leak.j, "Foreign sender (1-based)")->required();
  leak_cmd->add_option("--method", leak.method, "exact | sample");
  leak_cmd->add_option("--samples", leak.samples, "Rounds to sample");
  leak_cmd->add_option("--seed", leak.seed, "Sampling seed");
  leak_cmd->add_option("--prior", leak.prior, "P(x_j = 1)")->check(CLI::Range(0.0, 1.0));
  leak_cmd->add_option("--context", leak.context, "P(x_k = 1) for the other senders")
      ->check(CLI::Range(0.0, 1.0));
  leak_cmd->add_option("--view", leak.view, "receiver | channels");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    out << "FAIL usage\n";
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen, out);
    if (verify_cmd->parsed()) return cmd_verify(verify_path, out);
    if (rep_cmd->parsed()) return cmd_repcheck(f_path, g_path, modulus, required_kinds, out);
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (leak_cmd->parsed()) return cmd_leakage(leak, out);
  } catch (const Failure& f) {
    out << "FAIL " << f.tag << '\n' << f.detail;
    if (!f.detail.empty() && f.detail.back() != '\n') out << '\n';
    return f.code;
  } catch (const ParseError& e) {
    out << "FAIL parse\n" << e.what() << '\n';
    return kIoError;
  } catch (const IntegrityError& e) {
    out << "FAIL integrity\n" << e.what() << '\n';
    return kFailure;
  } catch (const InfeasibleError& e) {
    out << "FAIL infeasible\n" << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    out << "FAIL usage\n" << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    out << "FAIL io\n" << e.what() << '\n';
    return kIoError;
  }
  return kUsage;
}

}  // namespace hdt::cli
