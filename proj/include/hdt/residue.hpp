#pragma once

// Exact arithmetic over Z_m: vectors, dense and sparse matrices, CRT splitting
// and scalar periods. Every stored residue is canonical, i.e. in [0, m-1].
//
// The dense kernels come in two flavours: the ones in namespace hdt are
// OpenMP-parallel, the ones in hdt::reference are plain serial loops kept as
// the oracle for tests and the baseline for the benchmark.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hdt {

using Residue = std::uint32_t;

/// The modulus the transmission protocol runs over.
inline constexpr Residue kProtocolModulus = 6;

inline Residue add_mod(Residue a, Residue b, Residue m) {
  return static_cast<Residue>((static_cast<std::uint64_t>(a) + b) % m);
}
inline Residue sub_mod(Residue a, Residue b, Residue m) {
  return static_cast<Residue>((static_cast<std::uint64_t>(a) + m - b % m) % m);
}
inline Residue mul_mod(Residue a, Residue b, Residue m) {
  return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % m);
}
/// Reduces any signed integer to its canonical residue.
Residue reduce(std::int64_t value, Residue m);

/// A composite (or prime-power) modulus together with its prime-power
/// decomposition. The decomposition is supplied by the caller, never computed.
class Factorization {
 public:
  struct PrimePower {
    Residue prime;
    unsigned exponent;
    Residue value() const;  // prime^exponent
    friend bool operator==(const PrimePower&, const PrimePower&) = default;
  };

  /// Throws InputError unless primes are strictly increasing, prime, e >= 1,
  /// and the product fits in a Residue.
  explicit Factorization(std::vector<PrimePower> factors);

  /// 6 = 2 * 3.
  static Factorization six();
  /// Parses "2*3", "2^2*3", "3^2".
  static Factorization parse(std::string_view text);

  Residue modulus() const { return modulus_; }
  std::span<const PrimePower> factors() const { return factors_; }
  std::size_t size() const { return factors_.size(); }
  std::string to_string() const;

  friend bool operator==(const Factorization&, const Factorization&) = default;

 private:
  std::vector<PrimePower> factors_;
  Residue modulus_ = 1;
};

class ResidueVector {
 public:
  ResidueVector() = default;
  /// Zero vector.
  ResidueVector(Residue modulus, std::size_t size);
  /// Throws InputError if any entry is >= modulus.
  ResidueVector(Residue modulus, std::vector<Residue> entries);
  /// Reduces arbitrary integers into canonical range.
  static ResidueVector reduced(Residue modulus, std::span<const std::int64_t> values);

  Residue modulus() const { return modulus_; }
  std::size_t size() const { return entries_.size(); }
  Residue operator[](std::size_t i) const { return entries_[i]; }
  void set(std::size_t i, Residue value);
  std::span<const Residue> entries() const { return entries_; }
  std::span<Residue> mutable_entries() { return entries_; }

  friend bool operator==(const ResidueVector&, const ResidueVector&) = default;

 private:
  Residue modulus_ = 1;
  std::vector<Residue> entries_;
};

/// Dense row-major matrix over Z_m.
class ResidueMatrix {
 public:
  ResidueMatrix() = default;
  ResidueMatrix(Residue modulus, std::size_t rows, std::size_t cols);
  /// Throws InputError on size mismatch or unreduced entries.
  ResidueMatrix(Residue modulus, std::size_t rows, std::size_t cols, std::vector<Residue> entries);
  static ResidueMatrix identity(Residue modulus, std::size_t n);

  Residue modulus() const { return modulus_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Residue at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }
  void set(std::size_t i, std::size_t j, Residue value);
  std::span<const Residue> row(std::size_t i) const {
    return std::span<const Residue>(entries_).subspan(i * cols_, cols_);
  }
  std::span<const Residue> entries() const { return entries_; }

  friend bool operator==(const ResidueMatrix&, const ResidueMatrix&) = default;

 private:
  Residue modulus_ = 1;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Residue> entries_;
};

/// Compressed-row matrix over Z_m; only nonzero residues are stored, column
/// indices increase within each row.
class SparseResidueMatrix {
 public:
  struct Entry {
    std::size_t col;
    Residue value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  struct Triplet {
    std::size_t row;
    std::size_t col;
    Residue value;
  };

  SparseResidueMatrix() = default;
  static SparseResidueMatrix from_dense(const ResidueMatrix& dense);
  /// Duplicate coordinates are summed mod m; zero sums are dropped.
  static SparseResidueMatrix from_triplets(Residue modulus, std::size_t rows, std::size_t cols,
                                           std::vector<Triplet> triplets);
  static SparseResidueMatrix identity(Residue modulus, std::size_t n);

  Residue modulus() const { return modulus_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  std::span<const Entry> row(std::size_t i) const {
    return std::span<const Entry>(entries_).subspan(row_start_[i], row_start_[i + 1] - row_start_[i]);
  }
  /// Binary search within row i; 0 when absent.
  Residue at(std::size_t i, std::size_t j) const;

  SparseResidueMatrix transposed() const;
  ResidueMatrix to_dense() const;

  friend bool operator==(const SparseResidueMatrix&, const SparseResidueMatrix&) = default;

 private:
  Residue modulus_ = 1;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_start_{0};
  std::vector<Entry> entries_;
};

// -- parallel kernels -------------------------------------------------------

/// result_j = sum_i x_i * M_ij mod m.
ResidueVector vec_mat_mul(const ResidueVector& x, const ResidueMatrix& m);
/// Same contract over a sparse M (scatter over rows with x_i != 0).
ResidueVector vec_mat_mul(const ResidueVector& x, const SparseResidueMatrix& m);
/// result_i = sum_j M_ij * v_j mod m, i.e. v * M^T.
ResidueVector mat_vec_mul(const SparseResidueMatrix& m, const ResidueVector& v);
/// result_ik = sum_j A_ij * B_kj mod m, i.e. A * B^T.
ResidueMatrix mat_mat_mul_transposed(const ResidueMatrix& a, const ResidueMatrix& b);
SparseResidueMatrix mat_mat_mul_transposed(const SparseResidueMatrix& a,
                                           const SparseResidueMatrix& b);

// -- serial reference kernels ----------------------------------------------

namespace reference {
ResidueVector vec_mat_mul(const ResidueVector& x, const ResidueMatrix& m);
ResidueMatrix mat_mat_mul_transposed(const ResidueMatrix& a, const ResidueMatrix& b);
}  // namespace reference

// -- scalars ------------------------------------------------------------------

/// Component i is r mod p_i^{e_i}.
std::vector<Residue> crt_split(Residue r, const Factorization& f);
/// Inverse of crt_split.
Residue crt_combine(std::span<const Residue> components, const Factorization& f);

/// Smallest positive p with c*(v+p) == c*v (mod m) for every v. For m = 6 this
/// is one of {1, 2, 3, 6}.
Residue period_of_scalar(Residue c, Residue m = kProtocolModulus);

}  // namespace hdt
