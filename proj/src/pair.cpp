#include "hdt/pair.hpp"

#include <algorithm>
#include <bit>
#include <random>

#include "hdt/error.hpp"
#include "hdt/rng.hpp"
#include "pair_internal.hpp"

namespace hdt {

std::string to_string(PairMode mode) {
  return mode == PairMode::canonical ? "canonical" : "relaxed";
}

std::optional<PairMode> parse_pair_mode(std::string_view text) {
  if (text == "canonical") return PairMode::canonical;
  if (text == "relaxed") return PairMode::relaxed;
  return std::nullopt;
}

std::string StructuralFailure::describe() const {
  std::string where = "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
  switch (kind) {
    case Kind::entry_range:
      return std::string("entry ") + matrix + where + " = " + std::to_string(value) +
             " outside {0,1}";
    case Kind::diagonal:
      return "diagonal " + where + " = " + std::to_string(value) + ", expected 1";
    case Kind::off_diagonal:
      return "off-diagonal " + where + " = " + std::to_string(value) + ", expected 0, 3 or 4";
  }
  return where;
}

class PairCertifier {
 public:
  static PairCheck certify(const SparseResidueMatrix& b, const SparseResidueMatrix& c,
                           PairMode mode) {
    if (b.modulus() != kProtocolModulus || c.modulus() != kProtocolModulus) {
      throw InputError("pair matrices must be over Z_6");
    }
    if (b.rows() != c.rows() || b.cols() != c.cols()) {
      throw InputError("B and C must have the same shape");
    }
    if (b.rows() == 0 || b.cols() == 0) throw InputError("pair needs n >= 1 and t >= 1");

    if (mode == PairMode::canonical) {
      for (const auto* m : {&b, &c}) {
        for (std::size_t i = 0; i < m->rows(); ++i) {
          for (const auto& e : m->row(i)) {
            if (e.value > 1) {
              return StructuralFailure{StructuralFailure::Kind::entry_range, i, e.col, e.value,
                                       m == &b ? 'B' : 'C'};
            }
          }
        }
      }
    }

    TransmissionPair pair;
    pair.product_ = mat_mat_mul_transposed(b, c);
    const std::size_t n = b.rows();
    std::vector<SparseResidueMatrix::Triplet> us, vs;
    for (std::size_t i = 0; i < n; ++i) {
      Residue diag = 0;
      std::optional<StructuralFailure> off;
      for (const auto& e : pair.product_.row(i)) {
        if (e.col == i) {
          diag = e.value;
        } else if (e.value == 4) {
          us.push_back({i, e.col, 1});
        } else if (e.value == 3) {
          vs.push_back({i, e.col, 1});
        } else if (!off) {
          off = StructuralFailure{StructuralFailure::Kind::off_diagonal, i, e.col, e.value};
        }
      }
      // Row-major order: the diagonal wins only if it precedes the bad off-diagonal.
      if (diag != 1 && (!off || off->col > i)) {
        return StructuralFailure{StructuralFailure::Kind::diagonal, i, i, diag};
      }
      if (off) return *off;
    }
    pair.b_ = b;
    pair.c_ = c;
    pair.ct_ = c.transposed();
    pair.u_ = SparseResidueMatrix::from_triplets(kProtocolModulus, n, n, std::move(us));
    pair.v_ = SparseResidueMatrix::from_triplets(kProtocolModulus, n, n, std::move(vs));
    pair.meta_.mode = mode;
    return pair;
  }

  static void set_metadata(TransmissionPair& pair, PairMetadata meta) {
    meta.mode = pair.meta_.mode;
    pair.meta_ = meta;
  }
};

PairCheck verify_pair(const SparseResidueMatrix& b, const SparseResidueMatrix& c, PairMode mode) {
  return PairCertifier::certify(b, c, mode);
}

PairCheck verify_pair(const ResidueMatrix& b, const ResidueMatrix& c, PairMode mode) {
  if (b.rows() != c.rows() || b.cols() != c.cols()) {
    throw InputError("B and C must have the same shape");
  }
  return PairCertifier::certify(SparseResidueMatrix::from_dense(b),
                                SparseResidueMatrix::from_dense(c), mode);
}

void detail::set_pair_metadata(TransmissionPair& pair, const PairMetadata& meta) {
  PairCertifier::set_metadata(pair, meta);
}

TransmissionPair identity_pair(std::size_t n) {
  if (n == 0) throw InputError("identity_pair needs n >= 1");
  auto id = SparseResidueMatrix::identity(kProtocolModulus, n);
  auto pair = std::get<TransmissionPair>(PairCertifier::certify(id, id, PairMode::canonical));
  PairCertifier::set_metadata(pair, {PairMode::canonical, PairOrigin::identity, {}, {}});
  return pair;
}

// ---------------------------------------------------------------------------
// Search

namespace {

bool allowed_cross(Residue v) { return v == 0 || v == 3 || v == 4; }

// Candidate rows: every nonzero vector of {0,1}^t (canonical) or Z_6^t
// (relaxed), addressed by index.
class CandidateSpace {
 public:
  CandidateSpace(std::size_t t, PairMode mode) : t_(t), base_(mode == PairMode::canonical ? 2 : 6) {
    std::uint64_t count = 1;
    for (std::size_t j = 0; j < t; ++j) {
      count *= base_;
      if (count > (1u << 20)) throw InputError("search space per row too large; lower t");
    }
    rows_.reserve(count - 1);
    for (std::uint64_t code = 1; code < count; ++code) {
      std::vector<std::uint8_t> row(t);
      auto c = code;
      for (std::size_t j = 0; j < t; ++j) {
        row[j] = static_cast<std::uint8_t>(c % base_);
        c /= base_;
      }
      rows_.push_back(std::move(row));
      masks_.push_back(static_cast<std::uint32_t>(code));
    }
  }

  std::size_t size() const { return rows_.size(); }
  const std::vector<std::uint8_t>& row(std::size_t k) const { return rows_[k]; }

  Residue dot(std::size_t a, std::size_t b) const {
    if (base_ == 2) return static_cast<Residue>(std::popcount(masks_[a] & masks_[b]) % 6);
    unsigned acc = 0;
    for (std::size_t j = 0; j < t_; ++j) acc += rows_[a][j] * rows_[b][j];
    return acc % 6;
  }

 private:
  std::size_t t_;
  unsigned base_;
  std::vector<std::vector<std::uint8_t>> rows_;
  std::vector<std::uint32_t> masks_;
};

ResidueMatrix rows_to_matrix(const CandidateSpace& space, const std::vector<std::size_t>& picks,
                             std::size_t t) {
  std::vector<Residue> entries;
  entries.reserve(picks.size() * t);
  for (auto k : picks) {
    for (auto v : space.row(k)) entries.push_back(v);
  }
  return ResidueMatrix(kProtocolModulus, picks.size(), t, std::move(entries));
}

}  // namespace

SearchOutcome search_pair(std::size_t n, std::size_t t, std::uint64_t budget, std::uint64_t seed,
                          PairMode mode) {
  if (n == 0 || t == 0) throw InputError("search_pair needs n >= 1 and t >= 1");
  SearchOutcome out;
  const PairMetadata meta{mode, PairOrigin::search, seed, budget};

  if (t >= n && budget >= 1) {
    out.nodes = 1;
    ResidueMatrix pad(kProtocolModulus, n, t);
    for (std::size_t i = 0; i < n; ++i) pad.set(i, i, 1);
    auto check = verify_pair(pad, pad, mode);
    auto pair = std::get<TransmissionPair>(std::move(check));
    PairCertifier::set_metadata(pair, meta);
    out.pair = std::move(pair);
    return out;
  }

  const CandidateSpace space(t, mode);
  const std::size_t depth_count = 2 * n;
  std::vector<std::vector<std::size_t>> order(depth_count);
  {
    Rng rng(seed);
    std::vector<std::size_t> base(space.size());
    for (std::size_t k = 0; k < base.size(); ++k) base[k] = k;
    for (auto& o : order) {
      o = base;
      shuffle(o, rng);
    }
  }

  std::vector<std::size_t> b_rows(n), c_rows(n);
  std::vector<std::size_t> cursor(depth_count, 0);
  std::size_t depth = 0;

  auto consistent = [&](std::size_t d, std::size_t cand) {
    const std::size_t i = d / 2;
    if (d % 2 == 0) {
      for (std::size_t k = 0; k < i; ++k) {
        if (!allowed_cross(space.dot(cand, c_rows[k]))) return false;
      }
    } else {
      if (space.dot(b_rows[i], cand) != 1) return false;
      for (std::size_t k = 0; k < i; ++k) {
        if (!allowed_cross(space.dot(b_rows[k], cand))) return false;
      }
    }
    return true;
  };

  // Iterative DFS; cursor[d] is the next position to try in order[d].
  while (true) {
    if (depth == depth_count) {
      std::vector<std::size_t> bs(b_rows), cs(c_rows);
      auto check = verify_pair(rows_to_matrix(space, bs, t), rows_to_matrix(space, cs, t), mode);
      auto pair = std::get<TransmissionPair>(std::move(check));
      PairCertifier::set_metadata(pair, meta);
      out.pair = std::move(pair);
      return out;
    }
    bool advanced = false;
    auto& cur = cursor[depth];
    while (cur < order[depth].size()) {
      const auto cand = order[depth][cur++];
      if (!consistent(depth, cand)) continue;
      if (out.nodes >= budget) return out;
      ++out.nodes;
      (depth % 2 == 0 ? b_rows : c_rows)[depth / 2] = cand;
      ++depth;
      advanced = true;
      break;
    }
    if (advanced) continue;
    cursor[depth] = 0;
    if (depth == 0) {
      out.proved_infeasible = true;
      return out;
    }
    --depth;
  }
}

// ---------------------------------------------------------------------------
// Polynomials

SparsePolynomial dot_product_poly(std::size_t n) {
  if (n == 0) throw InputError("dot_product_poly needs n >= 1");
  SparsePolynomial out(kProtocolModulus);
  for (std::size_t i = 1; i <= n; ++i) {
    auto idx = static_cast<unsigned>(i);
    out.add_term(Monomial{{Variable{'x', idx}, 1}, {Variable{'y', idx}, 1}}, 1);
  }
  return out;
}

SparsePolynomial pair_to_bilinear_poly(const TransmissionPair& pair) {
  SparsePolynomial out(kProtocolModulus);
  const auto& bt = pair.encoder().transposed();
  const auto& ct = pair.decoder_by_channel();
  for (std::size_t j = 0; j < pair.t(); ++j) {
    for (const auto& eb : bt.row(j)) {
      for (const auto& ec : ct.row(j)) {
        Monomial mono{{Variable{'x', static_cast<unsigned>(eb.col + 1)}, 1},
                      {Variable{'y', static_cast<unsigned>(ec.col + 1)}, 1}};
        out.add_term(mono, static_cast<std::int64_t>(eb.value) * ec.value);
      }
    }
  }
  return out;
}

}  // namespace hdt
