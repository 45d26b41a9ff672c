#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "legweb/rational.hpp"
#include "legweb/symbol.hpp"

namespace legweb::sym {

// Sparse exponent vector, factors sorted by symbol id, exponents > 0.
struct Monomial {
    std::vector<std::pair<SymbolId, int>> factors;

    int degree() const;
    int degree_in(const std::vector<SymbolId>& vars) const;
    int exponent_of(SymbolId s) const;
    bool divides(const Monomial& other) const;
    Monomial operator*(const Monomial& other) const;
    // Quotient; caller guarantees divisibility.
    Monomial operator/(const Monomial& other) const;
    bool operator==(const Monomial& other) const { return factors == other.factors; }
    std::string str() const;
};

// Graded-lex, higher degree first; a total multiplicative order so leading
// terms behave under exact division.
struct MonoCmp {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
  public:
    using TermMap = std::map<Monomial, Rat, MonoCmp>;

    Poly() = default;
    static Poly zero() { return Poly(); }
    static Poly constant(const Rat& c);
    static Poly constant(long n, long d = 1) { return constant(rat(n, d)); }
    static Poly variable(SymbolId s, int exp = 1);

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Nonzero rational value if the poly is a constant.
    std::optional<Rat> as_constant() const;
    std::size_t term_count() const { return terms_.size(); }
    const TermMap& terms() const { return terms_; }

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(const Rat& c) const;
    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    bool operator==(const Poly& o) const { return terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    Poly pow(int e) const;

    // Leading term under the canonical order.
    const Monomial& leading_monomial() const;
    Rat leading_coefficient() const;

    int total_degree() const;
    int degree_in(SymbolId v) const;
    int degree_in(const std::vector<SymbolId>& vars) const;

    bool contains_symbol(SymbolId s) const;
    std::vector<SymbolId> support() const;

    // Simultaneous substitution. Cyclic binding sets are rejected.
    Poly substitute(const std::map<SymbolId, Poly>& bindings) const;

    // Formal partial derivative.
    Poly partial(SymbolId v) const;

    // Coefficients of v^0..v^deg as polynomials free of v.
    std::vector<Poly> coefficients_in(SymbolId v) const;

    // p as sum over monomials in `vars` with var-free coefficients.
    struct Collected {
        std::map<std::vector<int>, Poly> coefficients; // exponent tuple aligned with vars
        int degree = -1;                               // -1 encodes the zero polynomial
    };
    Collected collect(const std::vector<SymbolId>& vars) const;

    // Common scaling weight of all monomials, or the first witness pair of
    // monomials with different weights.
    struct WeightWitness {
        Monomial a, b;
        int weight_a = 0, weight_b = 0;
    };
    std::variant<int, WeightWitness> weight() const;

    // Canonical text: monomials in order, explicit rational coefficients.
    std::string str() const;

    void add_term(const Monomial& m, const Rat& c); // normalizing insert

  private:
    TermMap terms_;
};

inline Poly operator*(const Rat& c, const Poly& p) { return p * c; }

int monomial_weight(const Monomial& m);

// Expression parser for data files and tests. Grammar: + - * ^ ( ) with
// integer and a/b rational literals; identifiers are interned on sight.
Poly parse_poly(const std::string& text);

// p and q proportional by a nonzero rational constant (0 ∝ 0 holds).
bool proportional(const Poly& p, const Poly& q);

std::optional<Poly> divide_exact(const Poly& num, const Poly& den);

} // namespace legweb::sym
