#include "ide/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>
#include <sstream>

namespace ide {

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

Polynomial Polynomial::constant(std::vector<std::string> vars, const Rational& c) {
    Polynomial p(std::move(vars));
    if (c != 0) p.terms_.emplace(Exponents(p.vars_.size(), 0), c);
    return p;
}

Polynomial Polynomial::variable(std::vector<std::string> vars, const std::string& name) {
    Polynomial p(std::move(vars));
    Exponents e(p.vars_.size(), 0);
    e[p.var_index(name)] = 1;
    p.terms_.emplace(std::move(e), Rational(1));
    return p;
}

Polynomial Polynomial::monomial(std::vector<std::string> vars, Exponents e, const Rational& c) {
    Polynomial p(std::move(vars));
    if (e.size() != p.vars_.size()) throw IdeError("monomial exponent arity mismatch");
    if (c != 0) p.terms_.emplace(std::move(e), c);
    return p;
}

std::size_t Polynomial::var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw IdeError("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - vars_.begin());
}

bool Polynomial::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() > 1) return false;
    const auto& e = terms_.begin()->first;
    return std::all_of(e.begin(), e.end(), [](std::uint32_t k) { return k == 0; });
}

Rational Polynomial::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw IdeError("polynomial is not constant");
    return terms_.begin()->second;
}

int Polynomial::total_degree() const {
    int deg = -1;
    for (const auto& [e, c] : terms_) {
        int d = std::accumulate(e.begin(), e.end(), 0);
        deg = std::max(deg, d);
    }
    return deg;
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Polynomial Polynomial::operator-() const {
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
    return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
    if (vars_ != rhs.vars_) throw IdeError("polynomial variable lists differ");
    for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
    if (vars_ != rhs.vars_) throw IdeError("polynomial variable lists differ");
    for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
    return *this;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
    if (lhs.vars_ != rhs.vars_) throw IdeError("polynomial variable lists differ");
    Polynomial out(lhs.vars_);
    Exponents e(lhs.vars_.size());
    for (const auto& [ea, ca] : lhs.terms_) {
        for (const auto& [eb, cb] : rhs.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

Polynomial Polynomial::operator*(const Rational& c) const {
    Polynomial out(vars_);
    if (c == 0) return out;
    for (const auto& [e, coeff] : terms_) out.terms_.emplace(e, coeff * c);
    return out;
}

Polynomial Polynomial::pow(unsigned k) const {
    Polynomial out = constant(vars_, 1);
    for (unsigned i = 0; i < k; ++i) out *= *this;
    return out;
}

Polynomial Polynomial::differentiate(const std::string& var) const {
    std::size_t j = var_index(var);
    Polynomial out(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[j] == 0) continue;
        Exponents de = e;
        de[j] -= 1;
        out.add_term(de, c * Rational(e[j]));
    }
    return out;
}

double Polynomial::evaluate(std::span<const double> point) const {
    if (point.size() != vars_.size()) throw IdeError("evaluation point dimension mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = to_double(c);
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) t *= point[i];
        sum += t;
    }
    return sum;
}

Rational Polynomial::evaluate_exact(std::span<const Rational> point) const {
    if (point.size() != vars_.size()) throw IdeError("evaluation point dimension mismatch");
    Rational sum(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (std::uint32_t k = 0; k < e[i]; ++k) t *= point[i];
        sum += t;
    }
    return sum;
}

Polynomial Polynomial::substitute(const std::map<std::string, Rational>& values) const {
    std::vector<std::string> kept;
    std::vector<std::size_t> kept_idx;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (!values.count(vars_[i])) {
            kept.push_back(vars_[i]);
            kept_idx.push_back(i);
        }
    }
    Polynomial out(kept);
    for (const auto& [e, c] : terms_) {
        Rational coeff = c;
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = values.find(vars_[i]);
            if (it == values.end()) continue;
            for (std::uint32_t k = 0; k < e[i]; ++k) coeff *= it->second;
        }
        Exponents ne(kept.size());
        for (std::size_t j = 0; j < kept_idx.size(); ++j) ne[j] = e[kept_idx[j]];
        out.add_term(ne, coeff);
    }
    return out;
}

Polynomial Polynomial::with_variables(std::vector<std::string> new_vars) const {
    std::vector<std::optional<std::size_t>> slot(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(new_vars.begin(), new_vars.end(), vars_[i]);
        if (it != new_vars.end()) slot[i] = static_cast<std::size_t>(it - new_vars.begin());
    }
    Polynomial out(std::move(new_vars));
    for (const auto& [e, c] : terms_) {
        Exponents ne(out.vars_.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!slot[i]) throw IdeError("variable '" + vars_[i] + "' missing from new variable list");
            ne[*slot[i]] = e[i];
        }
        out.add_term(ne, c);
    }
    return out;
}

Polynomial Polynomial::compose(const PolynomialMap& map) const {
    if (map.codomain_dimension() != vars_.size())
        throw IdeError("compose: map component count does not match variable count");
    const auto& dv = map.domain_variables();
    Polynomial out(dv);
    // Memoize powers of the map components.
    std::vector<std::vector<Polynomial>> powers(vars_.size());
    auto power = [&](std::size_t i, std::uint32_t k) -> const Polynomial& {
        auto& cache = powers[i];
        if (cache.empty()) cache.push_back(Polynomial::constant(dv, 1));
        while (cache.size() <= k) cache.push_back(cache.back() * map.components()[i]);
        return cache[k];
    };
    for (const auto& [e, c] : terms_) {
        Polynomial t = Polynomial::constant(dv, c);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) t *= power(i, e[i]);
        out += t;
    }
    return out;
}

Polynomial Polynomial::sign_normalized() const {
    if (terms_.empty()) return *this;
    if (terms_.rbegin()->second < 0) return -*this;
    return *this;
}

Polynomial Polynomial::primitive_part() const {
    if (terms_.empty()) return *this;
    Integer num_gcd = 0, den_lcm = 1;
    for (const auto& [e, c] : terms_) {
        num_gcd = gcd(num_gcd, Integer(abs(numerator(c))));
        den_lcm = lcm(den_lcm, Integer(denominator(c)));
    }
    Rational content(num_gcd, den_lcm);
    Polynomial out = *this * (Rational(1) / content);
    return out.sign_normalized();
}

std::optional<Polynomial> Polynomial::divide_exact(const Polynomial& divisor) const {
    if (vars_ != divisor.vars_) throw IdeError("polynomial variable lists differ");
    if (divisor.is_zero()) throw IdeError("division by the zero polynomial");
    Polynomial q(vars_);
    Polynomial r = *this;
    const auto& [ge, gc] = *divisor.terms_.rbegin();
    while (!r.is_zero()) {
        const auto& [re, rc] = *r.terms_.rbegin();
        Exponents qe(re.size());
        for (std::size_t i = 0; i < re.size(); ++i) {
            if (re[i] < ge[i]) return std::nullopt;
            qe[i] = re[i] - ge[i];
        }
        Polynomial t = Polynomial::monomial(vars_, qe, rc / gc);
        q += t;
        r -= t * divisor;
    }
    return q;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) {
                os << "-";
                a = -a;
            }
        } else {
            os << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_vars = std::any_of(e.begin(), e.end(), [](std::uint32_t k) { return k > 0; });
        if (!has_vars || a != 1) {
            os << rational_to_string(a);
            if (has_vars) os << "*";
        }
        bool sep = false;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (sep) os << "*";
            sep = true;
            os << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("syntax error at position " + std::to_string(pos) + ": " + what +
                         " in '" + text + "'");
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    std::string read_digits() {
        std::string out;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
            out += text[pos++];
        return out;
    }

    // Decimal or p/q literal; the leading digits have already been seen.
    Rational read_number() {
        std::string digits = read_digits();
        if (digits.empty()) fail("expected number");
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::string frac = read_digits();
            return parse_rational(digits + "." + frac);
        }
        // "p/q" is a literal only when followed by an integer.
        if (pos < text.size() && text[pos] == '/') {
            std::size_t save = pos;
            ++pos;
            skip_ws();
            std::string den = read_digits();
            if (den.empty()) {
                pos = save;
                fail("expected integer denominator after '/'");
            }
            return parse_rational(digits + "/" + den);
        }
        return parse_rational(digits);
    }

    std::string read_identifier() {
        std::string out;
        if (pos < text.size() &&
            (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                         text[pos] == '_'))
                out += text[pos++];
        }
        return out;
    }

    Polynomial parse_base() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            Polynomial inner = parse_expression();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return Polynomial::constant(vars, read_number());
        }
        std::string id = read_identifier();
        if (id.empty()) fail(std::string("unexpected character '") + c + "'");
        if (std::find(vars.begin(), vars.end(), id) == vars.end())
            throw ParseError("unknown identifier '" + id + "' in '" + text + "'");
        return Polynomial::variable(vars, id);
    }

    Polynomial parse_factor() {
        Polynomial base = parse_base();
        if (eat('^')) {
            skip_ws();
            if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
                fail("expected non-negative integer exponent");
            std::string digits = read_digits();
            if (pos < text.size() && (text[pos] == '.' || text[pos] == '/'))
                throw ParseError("non-integer exponent at position " + std::to_string(pos) +
                                 " in '" + text + "'");
            unsigned long k = std::stoul(digits);
            return base.pow(static_cast<unsigned>(k));
        }
        return base;
    }

    Polynomial parse_term() {
        Polynomial p = parse_factor();
        while (eat('*')) p *= parse_factor();
        return p;
    }

    Polynomial parse_expression() {
        bool neg = false;
        if (eat('-'))
            neg = true;
        else
            eat('+');
        Polynomial p = parse_term();
        if (neg) p = -p;
        while (true) {
            if (eat('+'))
                p += parse_term();
            else if (eat('-'))
                p -= parse_term();
            else
                break;
        }
        return p;
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& vars) {
    Parser parser{text, vars};
    Polynomial p = parser.parse_expression();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    return p;
}

// ---------------------------------------------------------------------------
// PolynomialMap
// ---------------------------------------------------------------------------

PolynomialMap::PolynomialMap(std::vector<std::string> domain_vars,
                             std::vector<Polynomial> components)
    : domain_vars_(std::move(domain_vars)), components_(std::move(components)) {
    for (const auto& c : components_)
        if (c.variables() != domain_vars_)
            throw IdeError("map component uses a different variable list");
}

PolynomialMap PolynomialMap::identity(const std::vector<std::string>& vars) {
    std::vector<Polynomial> comps;
    comps.reserve(vars.size());
    for (const auto& v : vars) comps.push_back(Polynomial::variable(vars, v));
    return PolynomialMap(vars, std::move(comps));
}

std::vector<double> PolynomialMap::evaluate(std::span<const double> point) const {
    std::vector<double> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back(c.evaluate(point));
    return out;
}

PolynomialMap PolynomialMap::compose(const PolynomialMap& inner) const {
    if (inner.codomain_dimension() != domain_dimension())
        throw IdeError("map composition arity mismatch");
    std::vector<Polynomial> comps;
    comps.reserve(components_.size());
    for (const auto& c : components_) comps.push_back(c.compose(inner));
    return PolynomialMap(inner.domain_variables(), std::move(comps));
}

// ---------------------------------------------------------------------------
// PolynomialMatrix
// ---------------------------------------------------------------------------

PolynomialMatrix::PolynomialMatrix(std::size_t rows, std::size_t cols,
                                   std::vector<std::string> vars)
    : rows_(rows), cols_(cols), vars_(std::move(vars)),
      entries_(rows * cols, Polynomial(vars_)) {}

std::vector<double> PolynomialMatrix::evaluate(std::span<const double> point) const {
    std::vector<double> out(rows_ * cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out[i] = entries_[i].evaluate(point);
    return out;
}

PolynomialMatrix PolynomialMatrix::with_variables(const std::vector<std::string>& new_vars) const {
    PolynomialMatrix out(rows_, cols_, new_vars);
    for (std::size_t i = 0; i < entries_.size(); ++i)
        out.entries_[i] = entries_[i].with_variables(new_vars);
    return out;
}

PolynomialMatrix PolynomialMatrix::augmented_with_column(
    const std::vector<Polynomial>& column) const {
    if (column.size() != rows_) throw IdeError("augmented column has wrong length");
    PolynomialMatrix out(rows_, cols_ + 1, vars_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) out.at(i, j) = at(i, j);
        out.at(i, cols_) = column[i];
    }
    return out;
}

Polynomial PolynomialMatrix::determinant_cofactor() const {
    if (rows_ != cols_) throw IdeError("determinant of a non-square matrix");
    if (rows_ == 0) return Polynomial::constant(vars_, 1);
    if (rows_ == 1) return at(0, 0);
    Polynomial det(vars_);
    for (std::size_t j = 0; j < cols_; ++j) {
        if (at(0, j).is_zero()) continue;
        PolynomialMatrix sub(rows_ - 1, cols_ - 1, vars_);
        for (std::size_t r = 1; r < rows_; ++r) {
            std::size_t cc = 0;
            for (std::size_t c = 0; c < cols_; ++c) {
                if (c == j) continue;
                sub.at(r - 1, cc++) = at(r, c);
            }
        }
        Polynomial term = at(0, j) * sub.determinant_cofactor();
        if (j % 2 == 0)
            det += term;
        else
            det -= term;
    }
    return det;
}

Polynomial PolynomialMatrix::determinant_bareiss() const {
    if (rows_ != cols_) throw IdeError("determinant of a non-square matrix");
    const std::size_t n = rows_;
    if (n == 0) return Polynomial::constant(vars_, 1);
    std::vector<Polynomial> m = entries_;
    auto e = [&](std::size_t i, std::size_t j) -> Polynomial& { return m[i * n + j]; };
    Polynomial prev = Polynomial::constant(vars_, 1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (e(k, k).is_zero()) {
            std::size_t p = k + 1;
            while (p < n && e(p, k).is_zero()) ++p;
            if (p == n) return Polynomial(vars_);  // singular
            for (std::size_t j = 0; j < n; ++j) std::swap(e(k, j), e(p, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Polynomial num = e(i, j) * e(k, k) - e(i, k) * e(k, j);
                auto q = num.divide_exact(prev);
                if (!q) throw IdeError("internal error: Bareiss division not exact");
                e(i, j) = std::move(*q);
            }
            e(i, k) = Polynomial(vars_);
        }
        prev = e(k, k);
    }
    Polynomial det = e(n - 1, n - 1);
    return sign < 0 ? -det : det;
}

Polynomial PolynomialMatrix::determinant(std::size_t size_limit) const {
    if (rows_ != cols_) throw IdeError("determinant of a non-square matrix");
    if (rows_ > size_limit)
        throw IdeError("determinant size " + std::to_string(rows_) + " exceeds limit " +
                       std::to_string(size_limit));
    return rows_ <= 4 ? determinant_cofactor() : determinant_bareiss();
}

namespace {

// Enumerates all k-subsets of {0,...,n-1} in lexicographic order.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    std::size_t i = k;
    while (i-- > 0) {
        if (idx[i] + (k - i) < n) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> first_combination(std::size_t k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    return idx;
}

std::vector<Rational> random_rational_point(std::size_t n, std::mt19937_64& rng) {
    std::uniform_int_distribution<long> num(-997, 997);
    std::uniform_int_distribution<long> den(1, 31);
    std::vector<Rational> p;
    p.reserve(n);
    for (std::size_t i = 0; i < n; ++i) p.emplace_back(Integer(num(rng)), Integer(den(rng)));
    return p;
}

int exact_rank(std::vector<std::vector<Rational>> m) {
    if (m.empty()) return 0;
    const std::size_t rows = m.size(), cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols && r < rows; ++j) {
        std::size_t p = r;
        while (p < rows && m[p][j] == 0) ++p;
        if (p == rows) continue;
        std::swap(m[r], m[p]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (m[i][j] == 0) continue;
            Rational factor = m[i][j] / m[r][j];
            for (std::size_t c = j; c < cols; ++c) m[i][c] -= factor * m[r][c];
        }
        ++r;
    }
    return static_cast<int>(r);
}

}  // namespace

std::vector<Polynomial> PolynomialMatrix::minors_of_order(std::size_t k,
                                                          std::size_t size_limit) const {
    if (k == 0 || k > std::min(rows_, cols_))
        throw IdeError("minor order " + std::to_string(k) + " out of range for " +
                       std::to_string(rows_) + "x" + std::to_string(cols_));
    if (k > size_limit) throw IdeError("minor order exceeds determinant size limit");
    std::vector<Polynomial> out;
    std::vector<Polynomial> seen;
    auto row_idx = first_combination(k);
    do {
        // Skip row selections containing an identically zero row.
        bool zero_row = false;
        for (std::size_t r : row_idx) {
            bool all_zero = true;
            for (std::size_t c = 0; c < cols_ && all_zero; ++c)
                all_zero = at(r, c).is_zero();
            if (all_zero) {
                zero_row = true;
                break;
            }
        }
        if (zero_row) continue;
        auto col_idx = first_combination(k);
        do {
            PolynomialMatrix sub(k, k, vars_);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) sub.at(i, j) = at(row_idx[i], col_idx[j]);
            Polynomial d = sub.determinant(size_limit);
            if (d.is_zero()) continue;
            Polynomial canon = d.sign_normalized();
            if (std::find(seen.begin(), seen.end(), canon) == seen.end()) {
                seen.push_back(canon);
                out.push_back(std::move(canon));
            }
        } while (next_combination(col_idx, cols_));
    } while (next_combination(row_idx, rows_));
    return out;
}

int PolynomialMatrix::symbolic_rank() const {
    std::vector<Polynomial> m = entries_;
    auto e = [&](std::size_t i, std::size_t j) -> Polynomial& { return m[i * cols_ + j]; };
    // Deterministic sample point used only to prefer pivots that are visibly
    // nonzero; any symbolically nonzero entry is a valid pivot.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    auto point = random_rational_point(vars_.size(), rng);
    Polynomial prev = Polynomial::constant(vars_, 1);
    std::size_t r = 0;
    for (std::size_t j = 0; j < cols_ && r < rows_; ++j) {
        std::size_t pivot = rows_;
        for (std::size_t i = r; i < rows_; ++i) {
            if (e(i, j).is_zero()) continue;
            if (e(i, j).evaluate_exact(point) != 0) {
                pivot = i;
                break;
            }
            if (pivot == rows_) pivot = i;
        }
        if (pivot == rows_) continue;
        if (pivot != r)
            for (std::size_t c = 0; c < cols_; ++c) std::swap(e(r, c), e(pivot, c));
        for (std::size_t i = r + 1; i < rows_; ++i) {
            for (std::size_t c = j + 1; c < cols_; ++c) {
                Polynomial num = e(i, c) * e(r, j) - e(i, j) * e(r, c);
                auto q = num.divide_exact(prev);
                if (!q) throw IdeError("internal error: Bareiss division not exact");
                e(i, c) = std::move(*q);
            }
            e(i, j) = Polynomial(vars_);
        }
        prev = e(r, j);
        ++r;
    }
    return static_cast<int>(r);
}

int PolynomialMatrix::rank_at(std::span<const Rational> point) const {
    std::vector<std::vector<Rational>> m(rows_, std::vector<Rational>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m[i][j] = at(i, j).evaluate_exact(point);
    return exact_rank(std::move(m));
}

int PolynomialMatrix::generic_rank(int samples) const {
    int symbolic = symbolic_rank();
    std::mt19937_64 rng(0xc0ffee1234567ull);
    int sampled = 0;
    for (int s = 0; s < samples; ++s) {
        auto point = random_rational_point(vars_.size(), rng);
        sampled = std::max(sampled, rank_at(point));
    }
    if (sampled != symbolic)
        throw IdeError("internal error: symbolic rank " + std::to_string(symbolic) +
                       " disagrees with sampled rank " + std::to_string(sampled));
    return symbolic;
}

PolynomialMatrix jacobian(const std::vector<Polynomial>& fs, const std::vector<std::string>& vars) {
    PolynomialMatrix out(fs.size(), vars.size(), vars);
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = 0; j < vars.size(); ++j)
            out.at(i, j) = fs[i].differentiate(vars[j]);
    return out;
}

}  // namespace ide
