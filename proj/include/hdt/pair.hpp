#pragma once

// Encoder/decoder matrix pairs (B, C) over Z_6 whose product has the shape
//
//     B * C^T == I + 4U + 3V  (mod 6)
//
// with U, V zero-diagonal 0/1 matrices of disjoint support. A TransmissionPair
// only exists in certified form: the sole ways to obtain one are verify_pair,
// identity_pair, search_pair and load_pair, all of which run the structural
// check.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include "hdt/poly.hpp"
#include "hdt/residue.hpp"

namespace hdt {

enum class PairMode { canonical, relaxed };
enum class PairOrigin { matrices, identity, search, file };

std::string to_string(PairMode mode);
std::optional<PairMode> parse_pair_mode(std::string_view text);

struct PairMetadata {
  PairMode mode = PairMode::canonical;
  PairOrigin origin = PairOrigin::matrices;
  std::optional<std::uint64_t> seed;           // set for origin == search
  std::optional<std::uint64_t> search_budget;  // set for origin == search
};

class TransmissionPair {
 public:
  std::size_t n() const { return b_.rows(); }
  std::size_t t() const { return b_.cols(); }

  /// B, n x t; row i is what sender i adds onto the channels.
  const SparseResidueMatrix& encoder() const { return b_; }
  /// C, n x t; row i is what receiver i reads off the channels.
  const SparseResidueMatrix& decoder() const { return c_; }
  /// C^T, t x n; row j lists the receivers that read channel j.
  const SparseResidueMatrix& decoder_by_channel() const { return ct_; }
  /// B C^T mod 6.
  const SparseResidueMatrix& product() const { return product_; }
  /// Positions of the 4-coefficients.
  const SparseResidueMatrix& u() const { return u_; }
  /// Positions of the 3-coefficients.
  const SparseResidueMatrix& v() const { return v_; }
  const PairMetadata& metadata() const { return meta_; }
  PairMode mode() const { return meta_.mode; }

  /// Coefficient of sender p's bit in receiver i's decoded value.
  Residue coefficient(std::size_t p, std::size_t i) const { return product_.at(p, i); }

  /// Matrix-level equality; metadata is ignored.
  friend bool operator==(const TransmissionPair& a, const TransmissionPair& b) {
    return a.meta_.mode == b.meta_.mode && a.b_ == b.b_ && a.c_ == b.c_;
  }

 private:
  friend class PairCertifier;
  TransmissionPair() = default;

  SparseResidueMatrix b_, c_, ct_, product_, u_, v_;
  PairMetadata meta_;
};

struct StructuralFailure {
  enum class Kind {
    entry_range,   // canonical pair with a B or C entry outside {0,1}
    diagonal,      // (B C^T)_ii != 1
    off_diagonal,  // (B C^T)_ik not in {0,3,4}
  };
  Kind kind;
  std::size_t row;  // 0-based
  std::size_t col;  // 0-based
  Residue value;
  char matrix = 'P';  // 'B' or 'C' for entry_range, 'P' for the product

  /// 1-based coordinates, e.g. "off-diagonal (1,2) = 1".
  std::string describe() const;
};

using PairCheck = std::variant<TransmissionPair, StructuralFailure>;

/// Certifies B, C (mod 6, same shape). On failure reports the first offending
/// coordinate in row-major order. Throws InputError on shape or modulus errors.
PairCheck verify_pair(const ResidueMatrix& b, const ResidueMatrix& c,
                      PairMode mode = PairMode::canonical);
PairCheck verify_pair(const SparseResidueMatrix& b, const SparseResidueMatrix& c,
                      PairMode mode = PairMode::canonical);

/// B = C = I_n, t = n. Linear in n.
TransmissionPair identity_pair(std::size_t n);

struct SearchOutcome {
  std::optional<TransmissionPair> pair;
  std::uint64_t nodes = 0;
  /// True when the whole space was explored without finding a pair.
  bool proved_infeasible = false;
};

/// Depth-first search over rows b_1, c_1, b_2, c_2, ... with the structural
/// predicate as pruning test. When t >= n the padded identity is tried first.
/// Candidate order per depth is a seeded shuffle, so the result is a pure
/// function of (n, t, budget, seed, mode). budget counts expanded nodes.
SearchOutcome search_pair(std::size_t n, std::size_t t, std::uint64_t budget, std::uint64_t seed,
                          PairMode mode = PairMode::canonical);

/// sum_i x_i y_i over Z_6, variables x1..xn, y1..yn.
SparsePolynomial dot_product_poly(std::size_t n);
/// Expands sum_j (sum_i b_ij x_i)(sum_k c_kj y_k) mod 6.
SparsePolynomial pair_to_bilinear_poly(const TransmissionPair& pair);

// -- file format "HDT-PAIR 1" -----------------------------------------------

/// Parsed but not yet certified file contents.
struct PairFile {
  std::size_t n = 0;
  std::size_t t = 0;
  PairMode mode = PairMode::canonical;
  ResidueMatrix b;
  ResidueMatrix c;
};

void save_pair(const TransmissionPair& pair, std::ostream& out);
void save_pair(const TransmissionPair& pair, const std::filesystem::path& path);

/// Throws ParseError (with line number) on malformed input.
PairFile read_pair_file(std::istream& in);
/// read_pair_file + verify_pair; throws IntegrityError when certification fails.
TransmissionPair load_pair(std::istream& in);
TransmissionPair load_pair(const std::filesystem::path& path);

}  // namespace hdt
