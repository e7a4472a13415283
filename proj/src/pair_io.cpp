#include <fstream>
#include <iterator>
#include <sstream>

#include "hdt/error.hpp"
#include "hdt/pair.hpp"
#include "pair_internal.hpp"

namespace hdt {
namespace {

constexpr std::string_view kMagic = "HDT-PAIR 1";

void write_matrix(const SparseResidueMatrix& m, std::ostream& out) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    std::size_t k = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      Residue v = 0;
      if (k < row.size() && row[k].col == j) v = row[k++].value;
      if (j != 0) out << ' ';
      out << static_cast<char>('0' + v);
    }
    out << '\n';
  }
}

std::vector<std::string> split_lines(std::istream& in) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (text.empty()) throw ParseError(1, "empty pair file");
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      throw ParseError(lines.size() + 1, "missing trailing newline (truncated file?)");
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

std::size_t parse_dimension(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos || tok.size() > 9) {
    throw ParseError(line, "bad dimension '" + tok + "'");
  }
  auto v = std::stoul(tok);
  if (v == 0) throw ParseError(line, "dimensions must be positive");
  return v;
}

ResidueMatrix read_matrix(const std::vector<std::string>& lines, std::size_t first,
                          std::size_t n, std::size_t t) {
  std::vector<Residue> entries;
  entries.reserve(n * t);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lineno = first + i + 1;
    if (first + i >= lines.size()) throw ParseError(lineno, "file ends inside a matrix");
    auto row = tokens(lines[first + i]);
    if (row.size() != t) {
      throw ParseError(lineno, "expected " + std::to_string(t) + " entries, got " +
                                   std::to_string(row.size()));
    }
    for (const auto& tok : row) {
      if (tok.size() != 1 || tok[0] < '0' || tok[0] > '5') {
        throw ParseError(lineno, "entries must be digits 0-5, got '" + tok + "'");
      }
      entries.push_back(static_cast<Residue>(tok[0] - '0'));
    }
  }
  return ResidueMatrix(kProtocolModulus, n, t, std::move(entries));
}

}  // namespace

void save_pair(const TransmissionPair& pair, std::ostream& out) {
  out << kMagic << '\n' << pair.n() << ' ' << pair.t() << ' ' << to_string(pair.mode()) << '\n';
  write_matrix(pair.encoder(), out);
  out << "C\n";
  write_matrix(pair.decoder(), out);
}

void save_pair(const TransmissionPair& pair, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  save_pair(pair, out);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

PairFile read_pair_file(std::istream& in) {
  auto lines = split_lines(in);
  if (lines[0] != kMagic) throw ParseError(1, "expected header '" + std::string(kMagic) + "'");
  if (lines.size() < 2) throw ParseError(2, "missing 'n t mode' line");
  auto dims = tokens(lines[1]);
  if (dims.size() != 3) throw ParseError(2, "expected 'n t mode'");
  PairFile file;
  file.n = parse_dimension(dims[0], 2);
  file.t = parse_dimension(dims[1], 2);
  auto mode = parse_pair_mode(dims[2]);
  if (!mode) throw ParseError(2, "unknown mode '" + dims[2] + "'");
  file.mode = *mode;

  file.b = read_matrix(lines, 2, file.n, file.t);
  const std::size_t sep = 2 + file.n;
  if (sep >= lines.size()) throw ParseError(sep + 1, "missing 'C' separator");
  if (lines[sep] != "C") throw ParseError(sep + 1, "expected 'C' separator");
  file.c = read_matrix(lines, sep + 1, file.n, file.t);
  const std::size_t end = sep + 1 + file.n;
  if (end != lines.size()) throw ParseError(end + 1, "trailing content after C matrix");
  return file;
}

TransmissionPair load_pair(std::istream& in) {
  auto file = read_pair_file(in);
  auto check = verify_pair(file.b, file.c, file.mode);
  if (auto* failure = std::get_if<StructuralFailure>(&check)) {
    throw IntegrityError("pair fails certification: " + failure->describe());
  }
  auto pair = std::get<TransmissionPair>(std::move(check));
  detail::set_pair_metadata(pair, {file.mode, PairOrigin::file, {}, {}});
  return pair;
}

TransmissionPair load_pair(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return load_pair(in);
}

}  // namespace hdt
