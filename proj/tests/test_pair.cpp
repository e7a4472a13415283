#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "hdt/error.hpp"
#include "hdt/pair.hpp"

namespace hdt {
namespace {

TransmissionPair certified(const ResidueMatrix& b, const ResidueMatrix& c,
                           PairMode mode = PairMode::canonical) {
  auto check = verify_pair(b, c, mode);
  if (auto* f = std::get_if<StructuralFailure>(&check)) {
    ADD_FAILURE() << "unexpected failure: " << f->describe();
  }
  return std::get<TransmissionPair>(std::move(check));
}

// b1 = 1110, b2 = 0001, c1 = 1000, c2 = 1111: BC^T = [[1,3],[0,1]].
TransmissionPair two_by_four() {
  return certified(ResidueMatrix(6, 2, 4, {1, 1, 1, 0, 0, 0, 0, 1}),
                   ResidueMatrix(6, 2, 4, {1, 0, 0, 0, 1, 1, 1, 1}));
}

std::string saved(const TransmissionPair& p) {
  std::ostringstream os;
  save_pair(p, os);
  return os.str();
}

TEST(VerifyPair, IdentitySucceeds) {
  for (std::size_t n : {1u, 3u, 7u}) {
    const auto p = certified(ResidueMatrix::identity(6, n), ResidueMatrix::identity(6, n));
    EXPECT_EQ(p.n(), n);
    EXPECT_EQ(p.t(), n);
    EXPECT_EQ(p.u().nnz(), 0u);
    EXPECT_EQ(p.v().nnz(), 0u);
  }
}

TEST(VerifyPair, AllOnesColumnFailsAtOneTwo) {
  const ResidueMatrix ones(6, 2, 1, {1, 1});
  const auto check = verify_pair(ones, ones);
  const auto* f = std::get_if<StructuralFailure>(&check);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->kind, StructuralFailure::Kind::off_diagonal);
  EXPECT_EQ(f->row, 0u);
  EXPECT_EQ(f->col, 1u);
  EXPECT_EQ(f->value, 1u);
  EXPECT_EQ(f->describe(), "off-diagonal (1,2) = 1, expected 0, 3 or 4");
}

TEST(VerifyPair, RejectsTwoOffDiagonal) {
  // b1.c2 = 2 is 1-a-strong-compatible but excluded by the 3g + 4h form.
  const ResidueMatrix b(6, 2, 3, {1, 1, 0, 0, 0, 1});
  const ResidueMatrix c(6, 2, 3, {1, 0, 0, 1, 1, 1});
  const auto check = verify_pair(b, c);
  const auto* f = std::get_if<StructuralFailure>(&check);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->value, 2u);
  EXPECT_EQ(f->row, 0u);
  EXPECT_EQ(f->col, 1u);
}

TEST(VerifyPair, DiagonalAndRangeFailures) {
  const auto check = verify_pair(ResidueMatrix(6, 2, 2, {1, 0, 0, 0}), ResidueMatrix::identity(6, 2));
  const auto* f = std::get_if<StructuralFailure>(&check);
  ASSERT_NE(f, nullptr);
  EXPECT_EQ(f->kind, StructuralFailure::Kind::diagonal);
  EXPECT_EQ(f->describe(), "diagonal (2,2) = 0, expected 1");

  const ResidueMatrix five(6, 1, 1, {5});
  const auto r = verify_pair(five, five);
  const auto* g = std::get_if<StructuralFailure>(&r);
  ASSERT_NE(g, nullptr);
  EXPECT_EQ(g->kind, StructuralFailure::Kind::entry_range);
  EXPECT_EQ(g->matrix, 'B');
  // 5 * 5 = 25 = 1 mod 6, so relaxed mode accepts it.
  EXPECT_TRUE(std::holds_alternative<TransmissionPair>(verify_pair(five, five, PairMode::relaxed)));
}

TEST(VerifyPair, ShapeAndModulusErrors) {
  EXPECT_THROW(verify_pair(ResidueMatrix::identity(6, 2), ResidueMatrix::identity(6, 3)), InputError);
  EXPECT_THROW(verify_pair(ResidueMatrix::identity(4, 2), ResidueMatrix::identity(4, 2)), InputError);
}

TEST(VerifyPair, DecomposesIntoUAndV) {
  const auto p = two_by_four();
  EXPECT_EQ(p.coefficient(0, 1), 3u);
  EXPECT_EQ(p.coefficient(1, 0), 0u);
  EXPECT_EQ(p.v().at(0, 1), 1u);
  EXPECT_EQ(p.u().nnz(), 0u);
}

// Every certified pair: U, V are 0/1 with zero diagonal and disjoint
// supports, and I + 4U + 3V reassembles B C^T.
void expect_structure(const TransmissionPair& p) {
  const auto n = p.n();
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_EQ(p.u().at(i, i), 0u);
    EXPECT_EQ(p.v().at(i, i), 0u);
    for (std::size_t k = 0; k < n; ++k) {
      const auto u = p.u().at(i, k);
      const auto v = p.v().at(i, k);
      ASSERT_LE(u, 1u);
      ASSERT_LE(v, 1u);
      ASSERT_EQ(u * v, 0u);
      const Residue expect = static_cast<Residue>(((i == k ? 1 : 0) + 4 * u + 3 * v) % 6);
      ASSERT_EQ(p.coefficient(i, k), expect);
    }
  }
  const auto naive = testing::naive_product_transposed(p.encoder().to_dense(), p.decoder().to_dense());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) ASSERT_EQ(p.coefficient(i, k), reduce(naive[i][k], 6));
}

TEST(IdentityPair, SmallAndLarge) {
  EXPECT_EQ(identity_pair(1).t(), 1u);
  expect_structure(identity_pair(3));
  const auto big = identity_pair(100);
  EXPECT_EQ(big.product(), SparseResidueMatrix::identity(6, 100));
  EXPECT_EQ(big.metadata().origin, PairOrigin::identity);
  EXPECT_THROW(identity_pair(0), InputError);
}

TEST(SearchPair, TwoByOneIsInfeasible) {
  const auto out = search_pair(2, 1, 1000, 1);
  EXPECT_FALSE(out.pair);
  EXPECT_TRUE(out.proved_infeasible);
}

TEST(SearchPair, SquareReturnsIdentityFirst) {
  for (std::size_t n = 1; n <= 6; ++n) {
    const auto out = search_pair(n, n, 1, 9);
    ASSERT_TRUE(out.pair);
    EXPECT_EQ(out.pair->product(), SparseResidueMatrix::identity(6, n));
  }
}

TEST(SearchPair, FourByFourSeedOneCertifies) {
  const auto out = search_pair(4, 4, 1'000'000, 1);
  ASSERT_TRUE(out.pair);
  expect_structure(*out.pair);
  EXPECT_TRUE(is_1_a_strong(dot_product_poly(4), pair_to_bilinear_poly(*out.pair),
                            Factorization::six())
                  .verdict);
  EXPECT_EQ(out.pair->metadata().origin, PairOrigin::search);
  EXPECT_EQ(out.pair->metadata().seed, 1u);
}

TEST(SearchPair, Deterministic) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto a = search_pair(5, 3, 100000, seed, PairMode::relaxed);
    const auto b = search_pair(5, 3, 100000, seed, PairMode::relaxed);
    ASSERT_TRUE(a.pair);
    ASSERT_TRUE(b.pair);
    EXPECT_EQ(saved(*a.pair), saved(*b.pair));
    EXPECT_EQ(a.nodes, b.nodes);
  }
}

TEST(SearchPair, BudgetIsRespected) {
  const auto out = search_pair(6, 5, 1000, 1);
  EXPECT_FALSE(out.pair);
  EXPECT_FALSE(out.proved_infeasible);
  EXPECT_EQ(out.nodes, 1000u);
  EXPECT_FALSE(search_pair(3, 3, 0, 1).pair);
}

TEST(SearchPair, RelaxedPairsWithFewerChannels) {
  for (std::size_t n = 3; n <= 6; ++n) {
    const auto out = search_pair(n, n - 1, 1'000'000, 1, PairMode::relaxed);
    ASSERT_TRUE(out.pair) << "n=" << n;
    EXPECT_EQ(out.pair->mode(), PairMode::relaxed);
    expect_structure(*out.pair);
  }
}

TEST(Bilinear, DotProductPoly) {
  EXPECT_EQ(dot_product_poly(1).to_string(), "x1*y1");
  EXPECT_EQ(dot_product_poly(3), SparsePolynomial::parse("x1*y1 + x2*y2 + x3*y3", 6));
  EXPECT_EQ(dot_product_poly(10).size(), 10u);
}

TEST(Bilinear, ExpansionExamples) {
  EXPECT_EQ(pair_to_bilinear_poly(identity_pair(2)), SparsePolynomial::parse("x1*y1 + x2*y2", 6));
  // All-ones 2x3 has diagonal 3, so it never becomes a pair to expand.
  const ResidueMatrix ones(6, 2, 3, std::vector<Residue>(6, 1));
  ASSERT_TRUE(std::holds_alternative<StructuralFailure>(verify_pair(ones, ones, PairMode::relaxed)));
  const auto p = two_by_four();
  EXPECT_EQ(pair_to_bilinear_poly(p), SparsePolynomial::parse("x1*y1 + 3*x1*y2 + x2*y2", 6));
}

TEST(Bilinear, ExpansionMatchesProductForRandomCertifiedPairs) {
  for (std::size_t n = 2; n <= 4; ++n) {
    for (std::size_t t = 2; t <= 4; ++t) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto out = search_pair(n, t, 200000, seed, PairMode::relaxed);
        if (!out.pair) continue;
        const auto poly = pair_to_bilinear_poly(*out.pair);
        const auto product = mat_mat_mul_transposed(out.pair->encoder().to_dense(),
                                                    out.pair->decoder().to_dense());
        for (unsigned i = 1; i <= n; ++i)
          for (unsigned k = 1; k <= n; ++k) {
            const Monomial mono{{Variable{'x', i}, 1}, {Variable{'y', k}, 1}};
            ASSERT_EQ(poly.coefficient(mono), product.at(i - 1, k - 1));
          }
        EXPECT_TRUE(is_1_a_strong(dot_product_poly(n), poly, Factorization::six()).verdict);
      }
    }
  }
}

TEST(PairFile, RoundTrip) {
  for (const auto& p : {identity_pair(3), two_by_four(),
                        *search_pair(4, 3, 100000, 1, PairMode::relaxed).pair}) {
    const auto text = saved(p);
    std::istringstream in(text);
    const auto back = load_pair(in);
    EXPECT_EQ(back, p);
    EXPECT_EQ(saved(back), text);
    EXPECT_EQ(back.metadata().origin, PairOrigin::file);
  }
}

TEST(PairFile, ExactLayout) {
  EXPECT_EQ(saved(identity_pair(2)), "HDT-PAIR 1\n2 2 canonical\n1 0\n0 1\nC\n1 0\n0 1\n");
}

TEST(PairFile, CorruptedDiagonalIsIntegrityError) {
  std::istringstream in("HDT-PAIR 1\n3 3 canonical\n1 0 0\n0 0 0\n0 0 1\nC\n1 0 0\n0 1 0\n0 0 1\n");
  try {
    load_pair(in);
    FAIL() << "expected IntegrityError";
  } catch (const IntegrityError& e) {
    EXPECT_NE(std::string(e.what()).find("(2,2)"), std::string::npos) << e.what();
  }
}

int parse_error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_pair_file(in);
  } catch (const ParseError& e) {
    return static_cast<int>(e.line());
  }
  return -1;
}

TEST(PairFile, ParseErrorsCarryLineNumbers) {
  const std::string good = "HDT-PAIR 1\n2 2 canonical\n1 0\n0 1\nC\n1 0\n0 1\n";
  EXPECT_EQ(parse_error_line(good), -1);
  EXPECT_GT(parse_error_line(good.substr(0, good.size() - 1)), 0);  // no trailing newline
  EXPECT_GT(parse_error_line("HDT-PAIR 1\n2 2 canonical\n1 0\n"), 0);  // truncated
  EXPECT_EQ(parse_error_line("HDT-PAIR 2\n"), 1);
  EXPECT_EQ(parse_error_line("HDT-PAIR 1\n2 2 fancy\n"), 2);
  EXPECT_EQ(parse_error_line("HDT-PAIR 1\n2 2 canonical\n1 0\n0 7\nC\n1 0\n0 1\n"), 4);
  EXPECT_EQ(parse_error_line("HDT-PAIR 1\n2 2 canonical\n1 0\n0 1\nD\n1 0\n0 1\n"), 5);
  EXPECT_EQ(parse_error_line("HDT-PAIR 1\n2 2 canonical\n1 0\n0 1\nC\n1 0\n0 1\nextra\n"), 8);
  EXPECT_EQ(parse_error_line("HDT-PAIR 1\n2 2 canonical\n1 0 1\n0 1\nC\n1 0\n0 1\n"), 3);
}

}  // namespace
}  // namespace hdt
