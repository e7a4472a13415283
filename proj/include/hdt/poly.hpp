#pragma once

// Sparse polynomials over Z_m and the three "representation" relations between
// them (alternative, 0-a-strong, 1-a-strong) for composite m.
//
// Text grammar, whitespace ignored:
//   poly   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := integer | var ('^' integer)?
//   var    := lowercase letter followed by a positive index, e.g. x1, y12
// Integer factors multiply into the coefficient; repeated monomials add up.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hdt/residue.hpp"

namespace hdt {

struct Variable {
  char letter = 'x';
  unsigned index = 1;  // 1-based

  auto operator<=>(const Variable&) const = default;
  std::string to_string() const { return letter + std::to_string(index); }
};

/// A product of variables with positive exponents. The empty product is the
/// constant monomial. x1 and x1^2 are distinct monomials.
class Monomial {
 public:
  Monomial() = default;
  /// Drops zero exponents; multiplies repeated variables.
  Monomial(std::initializer_list<std::pair<Variable, unsigned>> powers);

  static Monomial of(Variable v, unsigned exponent = 1);
  Monomial operator*(const Monomial& other) const;

  const std::map<Variable, unsigned>& powers() const { return powers_; }
  bool is_constant() const { return powers_.empty(); }
  unsigned degree() const;
  std::string to_string() const;

  auto operator<=>(const Monomial&) const = default;

 private:
  std::map<Variable, unsigned> powers_;
};

class SparsePolynomial {
 public:
  explicit SparsePolynomial(Residue modulus = kProtocolModulus);

  static SparsePolynomial parse(std::string_view text, Residue modulus);

  Residue modulus() const { return modulus_; }
  /// Stored terms only; every coefficient is nonzero mod m.
  const std::map<Monomial, Residue>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  Residue coefficient(const Monomial& mono) const;

  /// Adds coeff (reduced mod m) to the monomial's coefficient.
  void add_term(const Monomial& mono, std::int64_t coeff);
  std::string to_string() const;

  friend bool operator==(const SparsePolynomial&, const SparsePolynomial&) = default;

 private:
  Residue modulus_;
  std::map<Monomial, Residue> terms_;
};

enum class RepresentationKind { alternative, zero_a_strong, one_a_strong };

std::string to_string(RepresentationKind kind);
std::optional<RepresentationKind> parse_representation_kind(std::string_view text);

struct RepresentationWitness {
  bool verdict = true;
  /// Set iff verdict is false: the first offending monomial in monomial order.
  std::optional<Monomial> failing_monomial;
  /// For the failing monomial: a == b mod p_i^{e_i}, per prime power.
  std::vector<bool> per_prime_agreement;
};

/// Component i is a == b (mod p_i^{e_i}).
std::vector<bool> coeff_agreement(Residue a, Residue b, const Factorization& f);

/// Every monomial agrees modulo at least one prime power.
RepresentationWitness is_alternative(const SparsePolynomial& f, const SparsePolynomial& g,
                                     const Factorization& fac);
/// Alternative, and wherever a_I != b_I mod p_i^{e_i}, b_I == 0 mod p_i^{e_i}.
RepresentationWitness is_0_a_strong(const SparsePolynomial& f, const SparsePolynomial& g,
                                    const Factorization& fac);
/// Alternative, and disagreement at any prime power only where a_I == 0 mod m.
RepresentationWitness is_1_a_strong(const SparsePolynomial& f, const SparsePolynomial& g,
                                    const Factorization& fac);

std::set<RepresentationKind> classify(const SparsePolynomial& f, const SparsePolynomial& g,
                                      const Factorization& fac);

}  // namespace hdt
