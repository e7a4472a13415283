#include "hdt/residue.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>

#include "hdt/error.hpp"

namespace hdt {
namespace {

bool is_prime(Residue p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

void require_modulus(Residue m) {
  if (m == 0) throw InputError("modulus must be positive");
}

void require_same_modulus(Residue a, Residue b) {
  if (a != b) {
    throw InputError("modulus mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::uint64_t parse_uint(std::string_view text) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw InputError("not a non-negative integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

Residue reduce(std::int64_t value, Residue m) {
  require_modulus(m);
  auto r = value % static_cast<std::int64_t>(m);
  if (r < 0) r += m;
  return static_cast<Residue>(r);
}

// ---------------------------------------------------------------------------
// Factorization

Residue Factorization::PrimePower::value() const {
  std::uint64_t v = 1;
  for (unsigned e = 0; e < exponent; ++e) v *= prime;
  return static_cast<Residue>(v);
}

Factorization::Factorization(std::vector<PrimePower> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InputError("factorization needs at least one prime power");
  std::uint64_t product = 1;
  Residue previous = 0;
  for (const auto& f : factors_) {
    if (!is_prime(f.prime)) throw InputError(std::to_string(f.prime) + " is not prime");
    if (f.exponent == 0) throw InputError("exponents must be >= 1");
    if (f.prime <= previous) throw InputError("primes must be strictly increasing");
    previous = f.prime;
    for (unsigned e = 0; e < f.exponent; ++e) {
      product *= f.prime;
      if (product > std::numeric_limits<Residue>::max()) {
        throw InputError("modulus exceeds 32-bit range");
      }
    }
  }
  modulus_ = static_cast<Residue>(product);
}

Factorization Factorization::six() { return Factorization({{2, 1}, {3, 1}}); }

Factorization Factorization::parse(std::string_view text) {
  std::vector<PrimePower> factors;
  std::string compact;
  for (char c : text) {
    if (c != ' ' && c != '\t') compact.push_back(c);
  }
  std::string_view rest = compact;
  while (true) {
    auto star = rest.find('*');
    auto piece = rest.substr(0, star);
    auto caret = piece.find('^');
    PrimePower pp{};
    if (caret == std::string_view::npos) {
      pp.prime = static_cast<Residue>(parse_uint(piece));
      pp.exponent = 1;
    } else {
      pp.prime = static_cast<Residue>(parse_uint(piece.substr(0, caret)));
      pp.exponent = static_cast<unsigned>(parse_uint(piece.substr(caret + 1)));
    }
    factors.push_back(pp);
    if (star == std::string_view::npos) break;
    rest = rest.substr(star + 1);
  }
  return Factorization(std::move(factors));
}

std::string Factorization::to_string() const {
  std::string out;
  for (const auto& f : factors_) {
    if (!out.empty()) out += '*';
    out += std::to_string(f.prime);
    if (f.exponent != 1) out += '^' + std::to_string(f.exponent);
  }
  return out;
}

// ---------------------------------------------------------------------------
// ResidueVector

ResidueVector::ResidueVector(Residue modulus, std::size_t size)
    : modulus_(modulus), entries_(size, 0) {
  require_modulus(modulus);
}

ResidueVector::ResidueVector(Residue modulus, std::vector<Residue> entries)
    : modulus_(modulus), entries_(std::move(entries)) {
  require_modulus(modulus);
  for (auto e : entries_) {
    if (e >= modulus_) throw InputError("vector entry not reduced mod " + std::to_string(modulus_));
  }
}

ResidueVector ResidueVector::reduced(Residue modulus, std::span<const std::int64_t> values) {
  std::vector<Residue> entries;
  entries.reserve(values.size());
  for (auto v : values) entries.push_back(reduce(v, modulus));
  return ResidueVector(modulus, std::move(entries));
}

void ResidueVector::set(std::size_t i, Residue value) {
  if (value >= modulus_) throw InputError("vector entry not reduced");
  entries_.at(i) = value;
}

// ---------------------------------------------------------------------------
// ResidueMatrix

ResidueMatrix::ResidueMatrix(Residue modulus, std::size_t rows, std::size_t cols)
    : modulus_(modulus), rows_(rows), cols_(cols), entries_(rows * cols, 0) {
  require_modulus(modulus);
}

ResidueMatrix::ResidueMatrix(Residue modulus, std::size_t rows, std::size_t cols,
                             std::vector<Residue> entries)
    : modulus_(modulus), rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require_modulus(modulus);
  if (entries_.size() != rows * cols) {
    throw InputError("matrix needs " + std::to_string(rows * cols) + " entries, got " +
                     std::to_string(entries_.size()));
  }
  for (auto e : entries_) {
    if (e >= modulus_) throw InputError("matrix entry not reduced mod " + std::to_string(modulus_));
  }
}

ResidueMatrix ResidueMatrix::identity(Residue modulus, std::size_t n) {
  ResidueMatrix out(modulus, n, n);
  for (std::size_t i = 0; i < n; ++i) out.set(i, i, 1 % modulus);
  return out;
}

void ResidueMatrix::set(std::size_t i, std::size_t j, Residue value) {
  if (i >= rows_ || j >= cols_) throw InputError("matrix index out of range");
  if (value >= modulus_) throw InputError("matrix entry not reduced");
  entries_[i * cols_ + j] = value;
}

// ---------------------------------------------------------------------------
// SparseResidueMatrix

SparseResidueMatrix SparseResidueMatrix::from_dense(const ResidueMatrix& dense) {
  SparseResidueMatrix out;
  out.modulus_ = dense.modulus();
  out.rows_ = dense.rows();
  out.cols_ = dense.cols();
  out.row_start_.assign(1, 0);
  out.row_start_.reserve(dense.rows() + 1);
  for (std::size_t i = 0; i < dense.rows(); ++i) {
    auto row = dense.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0) out.entries_.push_back({j, row[j]});
    }
    out.row_start_.push_back(out.entries_.size());
  }
  return out;
}

SparseResidueMatrix SparseResidueMatrix::from_triplets(Residue modulus, std::size_t rows,
                                                       std::size_t cols,
                                                       std::vector<Triplet> triplets) {
  require_modulus(modulus);
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) throw InputError("triplet index out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseResidueMatrix out;
  out.modulus_ = modulus;
  out.rows_ = rows;
  out.cols_ = cols;
  out.row_start_.assign(rows + 1, 0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    while (k < triplets.size() && triplets[k].row == i) {
      std::size_t col = triplets[k].col;
      Residue sum = 0;
      while (k < triplets.size() && triplets[k].row == i && triplets[k].col == col) {
        sum = add_mod(sum, triplets[k].value % modulus, modulus);
        ++k;
      }
      if (sum != 0) out.entries_.push_back({col, sum});
    }
    out.row_start_[i + 1] = out.entries_.size();
  }
  return out;
}

SparseResidueMatrix SparseResidueMatrix::identity(Residue modulus, std::size_t n) {
  require_modulus(modulus);
  SparseResidueMatrix out;
  out.modulus_ = modulus;
  out.rows_ = n;
  out.cols_ = n;
  out.row_start_.resize(n + 1);
  if (modulus == 1) {
    std::fill(out.row_start_.begin(), out.row_start_.end(), 0);
    return out;
  }
  out.entries_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.row_start_[i] = i;
    out.entries_.push_back({i, 1});
  }
  out.row_start_[n] = n;
  return out;
}

Residue SparseResidueMatrix::at(std::size_t i, std::size_t j) const {
  auto r = row(i);
  auto it = std::lower_bound(r.begin(), r.end(), j,
                             [](const Entry& e, std::size_t col) { return e.col < col; });
  return (it != r.end() && it->col == j) ? it->value : 0;
}

SparseResidueMatrix SparseResidueMatrix::transposed() const {
  SparseResidueMatrix out;
  out.modulus_ = modulus_;
  out.rows_ = cols_;
  out.cols_ = rows_;
  out.row_start_.assign(cols_ + 1, 0);
  for (const auto& e : entries_) ++out.row_start_[e.col + 1];
  std::partial_sum(out.row_start_.begin(), out.row_start_.end(), out.row_start_.begin());
  out.entries_.resize(entries_.size());
  std::vector<std::size_t> cursor(out.row_start_.begin(), out.row_start_.end() - 1);
  // Walking source rows in order keeps each output row sorted by column.
  for (std::size_t i = 0; i < rows_; ++i) {
    for (const auto& e : row(i)) out.entries_[cursor[e.col]++] = {i, e.value};
  }
  return out;
}

ResidueMatrix SparseResidueMatrix::to_dense() const {
  ResidueMatrix out(modulus_, rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (const auto& e : row(i)) out.set(i, e.col, e.value);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parallel kernels

ResidueVector vec_mat_mul(const ResidueVector& x, const ResidueMatrix& m) {
  require_same_modulus(x.modulus(), m.modulus());
  if (x.size() != m.rows()) {
    throw InputError("vec_mat_mul: vector length " + std::to_string(x.size()) + " vs " +
                     std::to_string(m.rows()) + " rows");
  }
  const Residue mod = m.modulus();
  const auto rows = static_cast<std::int64_t>(m.rows());
  const auto cols = static_cast<std::int64_t>(m.cols());
  std::vector<Residue> out(m.cols(), 0);
  auto xs = x.entries();
  auto ms = m.entries();
#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    std::uint64_t acc = 0;
    for (std::int64_t i = 0; i < rows; ++i) {
      acc += (static_cast<std::uint64_t>(xs[i]) * ms[i * cols + j]) % mod;
    }
    out[j] = static_cast<Residue>(acc % mod);
  }
  return ResidueVector(mod, std::move(out));
}

ResidueVector vec_mat_mul(const ResidueVector& x, const SparseResidueMatrix& m) {
  require_same_modulus(x.modulus(), m.modulus());
  if (x.size() != m.rows()) throw InputError("vec_mat_mul: length mismatch");
  const Residue mod = m.modulus();
  std::vector<Residue> out(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (x[i] == 0) continue;
    for (const auto& e : m.row(i)) {
      out[e.col] = add_mod(out[e.col], mul_mod(x[i], e.value, mod), mod);
    }
  }
  return ResidueVector(mod, std::move(out));
}

ResidueVector mat_vec_mul(const SparseResidueMatrix& m, const ResidueVector& v) {
  require_same_modulus(v.modulus(), m.modulus());
  if (v.size() != m.cols()) throw InputError("mat_vec_mul: length mismatch");
  const Residue mod = m.modulus();
  const auto rows = static_cast<std::int64_t>(m.rows());
  std::vector<Residue> out(m.rows(), 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < rows; ++i) {
    std::uint64_t acc = 0;
    for (const auto& e : m.row(static_cast<std::size_t>(i))) {
      acc += (static_cast<std::uint64_t>(e.value) * v[e.col]) % mod;
    }
    out[i] = static_cast<Residue>(acc % mod);
  }
  return ResidueVector(mod, std::move(out));
}

ResidueMatrix mat_mat_mul_transposed(const ResidueMatrix& a, const ResidueMatrix& b) {
  require_same_modulus(a.modulus(), b.modulus());
  if (a.cols() != b.cols()) throw InputError("mat_mat_mul_transposed: column count mismatch");
  const Residue mod = a.modulus();
  const auto n = static_cast<std::int64_t>(a.rows());
  const std::size_t k_rows = b.rows();
  const std::size_t inner = a.cols();
  std::vector<Residue> out(a.rows() * k_rows, 0);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    auto ar = a.row(static_cast<std::size_t>(i));
    for (std::size_t k = 0; k < k_rows; ++k) {
      auto br = b.row(k);
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < inner; ++j) {
        acc += (static_cast<std::uint64_t>(ar[j]) * br[j]) % mod;
      }
      out[static_cast<std::size_t>(i) * k_rows + k] = static_cast<Residue>(acc % mod);
    }
  }
  return ResidueMatrix(mod, a.rows(), k_rows, std::move(out));
}

SparseResidueMatrix mat_mat_mul_transposed(const SparseResidueMatrix& a,
                                           const SparseResidueMatrix& b) {
  require_same_modulus(a.modulus(), b.modulus());
  if (a.cols() != b.cols()) throw InputError("mat_mat_mul_transposed: column count mismatch");
  const Residue mod = a.modulus();
  const SparseResidueMatrix bt = b.transposed();  // rows indexed by the shared dimension
  const auto n = static_cast<std::int64_t>(a.rows());
  std::vector<std::vector<SparseResidueMatrix::Triplet>> rows_out(a.rows());
#pragma omp parallel
  {
    std::vector<std::uint64_t> acc(b.rows(), 0);
    std::vector<std::size_t> touched;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto row = static_cast<std::size_t>(i);
      for (const auto& ea : a.row(row)) {
        for (const auto& eb : bt.row(ea.col)) {
          if (acc[eb.col] == 0) touched.push_back(eb.col);
          // +mod keeps the "touched" marker nonzero even when the term vanishes.
          acc[eb.col] += (static_cast<std::uint64_t>(ea.value) * eb.value) % mod + mod;
        }
      }
      std::sort(touched.begin(), touched.end());
      for (auto k : touched) {
        auto value = static_cast<Residue>(acc[k] % mod);
        if (value != 0) rows_out[row].push_back({row, k, value});
        acc[k] = 0;
      }
      touched.clear();
    }
  }
  std::vector<SparseResidueMatrix::Triplet> all;
  for (auto& r : rows_out) all.insert(all.end(), r.begin(), r.end());
  return SparseResidueMatrix::from_triplets(mod, a.rows(), b.rows(), std::move(all));
}

// ---------------------------------------------------------------------------
// Serial references

namespace reference {

ResidueVector vec_mat_mul(const ResidueVector& x, const ResidueMatrix& m) {
  require_same_modulus(x.modulus(), m.modulus());
  if (x.size() != m.rows()) throw InputError("vec_mat_mul: length mismatch");
  const Residue mod = m.modulus();
  std::vector<Residue> out(m.cols(), 0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out[j] = add_mod(out[j], mul_mod(x[i], m.at(i, j), mod), mod);
    }
  }
  return ResidueVector(mod, std::move(out));
}

ResidueMatrix mat_mat_mul_transposed(const ResidueMatrix& a, const ResidueMatrix& b) {
  require_same_modulus(a.modulus(), b.modulus());
  if (a.cols() != b.cols()) throw InputError("mat_mat_mul_transposed: column count mismatch");
  const Residue mod = a.modulus();
  ResidueMatrix out(mod, a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < b.rows(); ++k) {
      Residue acc = 0;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        acc = add_mod(acc, mul_mod(a.at(i, j), b.at(k, j), mod), mod);
      }
      out.set(i, k, acc);
    }
  }
  return out;
}

}  // namespace reference

// ---------------------------------------------------------------------------
// Scalars

std::vector<Residue> crt_split(Residue r, const Factorization& f) {
  if (r >= f.modulus()) throw InputError("residue not reduced mod " + std::to_string(f.modulus()));
  std::vector<Residue> out;
  out.reserve(f.size());
  for (const auto& pp : f.factors()) out.push_back(r % pp.value());
  return out;
}

Residue crt_combine(std::span<const Residue> components, const Factorization& f) {
  if (components.size() != f.size()) throw InputError("crt_combine: component count mismatch");
  // Garner-free search: walk the arithmetic progression of the first component
  // and fold in one modulus at a time.
  std::uint64_t value = 0;
  std::uint64_t step = 1;
  for (std::size_t i = 0; i < components.size(); ++i) {
    const std::uint64_t q = f.factors()[i].value();
    if (components[i] >= q) throw InputError("crt_combine: component not reduced");
    while (value % q != components[i]) value += step;
    step *= q;
  }
  return static_cast<Residue>(value);
}

Residue period_of_scalar(Residue c, Residue m) {
  require_modulus(m);
  if (c >= m) throw InputError("scalar not reduced mod " + std::to_string(m));
  for (Residue p = 1; p < m; ++p) {
    if (mul_mod(c, p, m) == 0) return p;
  }
  return m;
}

}  // namespace hdt
