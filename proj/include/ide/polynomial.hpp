#pragma once

#include "ide/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ide {

struct ParseError : IdeError {
    using IdeError::IdeError;
};

class PolynomialMap;

// Exponent vector, one entry per variable. std::map's lexicographic key
// order doubles as the monomial order (leading term = last map entry).
using Exponents = std::vector<std::uint32_t>;

// Sparse multivariate polynomial with exact rational coefficients over a
// fixed, ordered list of named variables. Zero coefficients are never
// stored, so two polynomials over the same variable list are equal iff
// their term maps are equal.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static Polynomial constant(std::vector<std::string> vars, const Rational& c);
    static Polynomial variable(std::vector<std::string> vars, const std::string& name);
    static Polynomial monomial(std::vector<std::string> vars, Exponents e, const Rational& c);

    const std::vector<std::string>& variables() const { return vars_; }
    const std::map<Exponents, Rational>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // Value of a constant polynomial (0 for the zero polynomial).
    Rational constant_value() const;
    int total_degree() const;  // -1 for the zero polynomial

    Polynomial operator-() const;
    Polynomial& operator+=(const Polynomial& rhs);
    Polynomial& operator-=(const Polynomial& rhs);
    friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs) { return lhs += rhs; }
    friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs) { return lhs -= rhs; }
    friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
    Polynomial& operator*=(const Polynomial& rhs) { return *this = *this * rhs; }
    Polynomial operator*(const Rational& c) const;
    friend Polynomial operator*(const Rational& c, const Polynomial& p) { return p * c; }
    Polynomial pow(unsigned k) const;

    bool operator==(const Polynomial&) const = default;

    Polynomial differentiate(const std::string& var) const;

    double evaluate(std::span<const double> point) const;
    Rational evaluate_exact(std::span<const Rational> point) const;

    // Substitutes exact values for a subset of the variables; the result is
    // a polynomial over the remaining variables, in their original order.
    Polynomial substitute(const std::map<std::string, Rational>& values) const;

    // Re-embeds into another variable list (a superset or reordering). Any
    // variable actually used must appear in new_vars.
    Polynomial with_variables(std::vector<std::string> new_vars) const;

    // Exact substitution x_i -> map.components()[i]; result lives over the
    // map's domain variables.
    Polynomial compose(const PolynomialMap& map) const;

    // Divides out the rational content and fixes the leading coefficient to
    // be positive. Zero stays zero.
    Polynomial primitive_part() const;
    // Sign-normalized copy: leading coefficient positive (content kept).
    Polynomial sign_normalized() const;

    // Exact polynomial division; nullopt if divisor does not divide *this.
    std::optional<Polynomial> divide_exact(const Polynomial& divisor) const;

    std::string to_string() const;

  private:
    std::vector<std::string> vars_;
    std::map<Exponents, Rational> terms_;

    void add_term(const Exponents& e, const Rational& c);
    std::size_t var_index(const std::string& name) const;
};

// Grammar:
//   expression ::= ('+'|'-')? term (('+'|'-') term)*
//   term       ::= factor ('*' factor)*
//   factor     ::= base ('^' nonneg-int)?
//   base       ::= rational-literal | identifier | '(' expression ')'
// Rational literals are decimals or "p/q"; identifiers must be in vars.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& vars);

// Polynomial map R^p -> R^k, one component per codomain coordinate.
class PolynomialMap {
  public:
    PolynomialMap() = default;
    PolynomialMap(std::vector<std::string> domain_vars, std::vector<Polynomial> components);

    static PolynomialMap identity(const std::vector<std::string>& vars);

    const std::vector<std::string>& domain_variables() const { return domain_vars_; }
    const std::vector<Polynomial>& components() const { return components_; }
    std::size_t domain_dimension() const { return domain_vars_.size(); }
    std::size_t codomain_dimension() const { return components_.size(); }

    std::vector<double> evaluate(std::span<const double> point) const;

    // (*this) o inner : composes each component with inner.
    PolynomialMap compose(const PolynomialMap& inner) const;

  private:
    std::vector<std::string> domain_vars_;
    std::vector<Polynomial> components_;
};

// Dense matrix of polynomials over a shared variable list (row-major).
class PolynomialMatrix {
  public:
    PolynomialMatrix() = default;
    PolynomialMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> vars);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    const std::vector<std::string>& variables() const { return vars_; }

    Polynomial& at(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const Polynomial& at(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    bool operator==(const PolynomialMatrix&) const = default;

    // Row-major double evaluation at a point.
    std::vector<double> evaluate(std::span<const double> point) const;

    PolynomialMatrix with_variables(const std::vector<std::string>& new_vars) const;
    PolynomialMatrix augmented_with_column(const std::vector<Polynomial>& column) const;

    // Exact determinant: cofactor expansion for size <= 4, fraction-free
    // Bareiss elimination above. Square input of size <= size_limit only.
    Polynomial determinant(std::size_t size_limit = 8) const;
    Polynomial determinant_cofactor() const;
    Polynomial determinant_bareiss() const;

    // All k x k minors with zeros removed and duplicates removed up to sign.
    std::vector<Polynomial> minors_of_order(std::size_t k, std::size_t size_limit = 8) const;

    // Rank over the field of rational functions, via fraction-free
    // elimination with symbolic pivots, cross-checked against the exact
    // rank at `samples` random rational points.
    int generic_rank(int samples = 5) const;

    // Exact rank of the evaluated matrix at an exact rational point.
    int rank_at(std::span<const Rational> point) const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::string> vars_;
    std::vector<Polynomial> entries_;

    int symbolic_rank() const;
};

// Jacobian of a list of polynomials: entry (i, j) = d f_i / d var_j.
PolynomialMatrix jacobian(const std::vector<Polynomial>& fs, const std::vector<std::string>& vars);

}  // namespace ide
