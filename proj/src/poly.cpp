#include "hdt/poly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "hdt/error.hpp"

namespace hdt {

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::initializer_list<std::pair<Variable, unsigned>> powers) {
  for (const auto& [var, exp] : powers) {
    if (exp != 0) powers_[var] += exp;
  }
}

Monomial Monomial::of(Variable v, unsigned exponent) { return Monomial{{v, exponent}}; }

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out = *this;
  for (const auto& [var, exp] : other.powers_) out.powers_[var] += exp;
  return out;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& [var, exp] : powers_) d += exp;
  return d;
}

std::string Monomial::to_string() const {
  if (powers_.empty()) return "1";
  std::string out;
  for (const auto& [var, exp] : powers_) {
    if (!out.empty()) out += '*';
    out += var.to_string();
    if (exp != 1) out += '^' + std::to_string(exp);
  }
  return out;
}

// ---------------------------------------------------------------------------
// SparsePolynomial

SparsePolynomial::SparsePolynomial(Residue modulus) : modulus_(modulus) {
  if (modulus == 0) throw InputError("modulus must be positive");
}

Residue SparsePolynomial::coefficient(const Monomial& mono) const {
  auto it = terms_.find(mono);
  return it == terms_.end() ? 0 : it->second;
}

void SparsePolynomial::add_term(const Monomial& mono, std::int64_t coeff) {
  Residue sum = add_mod(coefficient(mono), reduce(coeff, modulus_), modulus_);
  if (sum == 0) {
    terms_.erase(mono);
  } else {
    terms_[mono] = sum;
  }
}

std::string SparsePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [mono, coeff] : terms_) {
    if (!out.empty()) out += " + ";
    if (mono.is_constant()) {
      out += std::to_string(coeff);
    } else if (coeff == 1) {
      out += mono.to_string();
    } else {
      out += std::to_string(coeff) + '*' + mono.to_string();
    }
  }
  return out;
}

namespace {

class PolyParser {
 public:
  PolyParser(std::string_view text, Residue modulus) : modulus_(modulus) {
    for (char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) text_.push_back(c);
    }
  }

  SparsePolynomial run() {
    SparsePolynomial out(modulus_);
    if (text_.empty()) throw ParseError(0, "empty polynomial");
    while (true) {
      term(out);
      if (pos_ == text_.size()) break;
      expect('+');
    }
    return out;
  }

 private:
  void term(SparsePolynomial& out) {
    Residue coeff = 1;
    Monomial mono;
    while (true) {
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        auto factor = static_cast<Residue>(number() % modulus_);
        coeff = mul_mod(coeff, factor, modulus_);
      } else if (pos_ < text_.size() && std::islower(static_cast<unsigned char>(text_[pos_]))) {
        Variable v{text_[pos_++], 0};
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          fail("variable needs an index");
        }
        auto idx = number();
        if (idx == 0) fail("variable indices start at 1");
        v.index = static_cast<unsigned>(idx);
        unsigned exp = 1;
        if (pos_ < text_.size() && text_[pos_] == '^') {
          ++pos_;
          exp = static_cast<unsigned>(number());
        }
        mono = mono * Monomial::of(v, exp);
      } else {
        fail("expected coefficient or variable");
      }
      if (pos_ < text_.size() && text_[pos_] == '*') {
        ++pos_;
        continue;
      }
      break;
    }
    out.add_term(mono, coeff);
  }

  std::uint64_t number() {
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      fail("expected a number");
    }
    std::uint64_t value = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      value = value * 10 + static_cast<std::uint64_t>(text_[pos_++] - '0');
      if (value > 0xFFFFFFFFull) fail("number too large");
    }
    return value;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(0, what + " at offset " + std::to_string(pos_) + " in '" + text_ + "'");
  }

  std::string text_;
  std::size_t pos_ = 0;
  Residue modulus_;
};

}  // namespace

SparsePolynomial SparsePolynomial::parse(std::string_view text, Residue modulus) {
  return PolyParser(text, modulus).run();
}

// ---------------------------------------------------------------------------
// Representation predicates

std::string to_string(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::alternative: return "alternative";
    case RepresentationKind::zero_a_strong: return "0-a-strong";
    case RepresentationKind::one_a_strong: return "1-a-strong";
  }
  return "?";
}

std::optional<RepresentationKind> parse_representation_kind(std::string_view text) {
  for (auto k : {RepresentationKind::alternative, RepresentationKind::zero_a_strong,
                 RepresentationKind::one_a_strong}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::vector<bool> coeff_agreement(Residue a, Residue b, const Factorization& f) {
  if (a >= f.modulus() || b >= f.modulus()) throw InputError("coefficients must be reduced");
  std::vector<bool> out;
  out.reserve(f.size());
  for (const auto& pp : f.factors()) out.push_back(a % pp.value() == b % pp.value());
  return out;
}

namespace {

// Per-monomial acceptance test; gets (a, b, agreement).
using MonomialCheck = std::function<bool(Residue, Residue, const std::vector<bool>&)>;

RepresentationWitness check_all(const SparsePolynomial& f, const SparsePolynomial& g,
                                const Factorization& fac, const MonomialCheck& ok) {
  if (f.modulus() != g.modulus() || f.modulus() != fac.modulus()) {
    throw InputError("polynomials and factorization must share the modulus");
  }
  // Union of supports, in monomial order. Monomials absent from both have
  // a = b = 0 and pass every clause.
  std::set<Monomial> support;
  for (const auto& [mono, c] : f.terms()) support.insert(mono);
  for (const auto& [mono, c] : g.terms()) support.insert(mono);

  for (const auto& mono : support) {
    Residue a = f.coefficient(mono);
    Residue b = g.coefficient(mono);
    auto agree = coeff_agreement(a, b, fac);
    if (!ok(a, b, agree)) return {false, mono, std::move(agree)};
  }
  return {};
}

bool any_of(const std::vector<bool>& v) { return std::find(v.begin(), v.end(), true) != v.end(); }

}  // namespace

RepresentationWitness is_alternative(const SparsePolynomial& f, const SparsePolynomial& g,
                                     const Factorization& fac) {
  return check_all(f, g, fac, [](Residue, Residue, const std::vector<bool>& agree) {
    return any_of(agree);
  });
}

RepresentationWitness is_0_a_strong(const SparsePolynomial& f, const SparsePolynomial& g,
                                    const Factorization& fac) {
  return check_all(f, g, fac, [&fac](Residue, Residue b, const std::vector<bool>& agree) {
    if (!any_of(agree)) return false;
    for (std::size_t i = 0; i < agree.size(); ++i) {
      if (!agree[i] && b % fac.factors()[i].value() != 0) return false;
    }
    return true;
  });
}

RepresentationWitness is_1_a_strong(const SparsePolynomial& f, const SparsePolynomial& g,
                                    const Factorization& fac) {
  return check_all(f, g, fac, [](Residue a, Residue, const std::vector<bool>& agree) {
    if (!any_of(agree)) return false;
    for (bool ok : agree) {
      if (!ok && a != 0) return false;
    }
    return true;
  });
}

std::set<RepresentationKind> classify(const SparsePolynomial& f, const SparsePolynomial& g,
                                      const Factorization& fac) {
  std::set<RepresentationKind> out;
  if (is_alternative(f, g, fac).verdict) out.insert(RepresentationKind::alternative);
  if (is_0_a_strong(f, g, fac).verdict) out.insert(RepresentationKind::zero_a_strong);
  if (is_1_a_strong(f, g, fac).verdict) out.insert(RepresentationKind::one_a_strong);
  return out;
}

}  // namespace hdt
