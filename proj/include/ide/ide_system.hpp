#pragma once

#include "ide/polynomial.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace ide {

// Constraint map phi : R^n -> R^k, given componentwise; the constraint set
// is its zero locus.
struct ConstraintSet {
    std::vector<std::string> variables;
    std::vector<Polynomial> generators;

    ConstraintSet() = default;
    ConstraintSet(std::vector<std::string> vars, std::vector<Polynomial> gens);

    std::size_t size() const { return generators.size(); }
    Eigen::VectorXd evaluate(std::span<const double> x) const;
    // Jacobian of the generators, evaluated at x (size() x n).
    Eigen::MatrixXd jacobian_at(std::span<const double> x) const;
    PolynomialMatrix jacobian() const;
};

// Constant linear map on the range space, kept with exact entries so range
// projections stay symbolic.
struct LinearRangeMap {
    std::vector<std::vector<Rational>> matrix;  // q x m

    static LinearRangeMap identity(std::size_t m);
    static LinearRangeMap from_doubles(const std::vector<std::vector<double>>& m);
    // Projection that keeps the given rows, in order.
    static LinearRangeMap selecting_rows(const std::vector<std::size_t>& rows, std::size_t m);

    std::size_t rows() const { return matrix.size(); }
    std::size_t cols() const { return matrix.empty() ? 0 : matrix[0].size(); }
};

struct ModelLineage {
    int level = 0;
    std::string parent_name;
    std::string map_file;
};

// The implicit differential equation a(x) xdot = f(x) in standard form:
// a is an m x n polynomial matrix, f an m-vector of polynomials, both over
// the same n named variables.
struct IdeSystem {
    std::string name;
    std::vector<std::string> variables;
    PolynomialMatrix a;
    std::vector<Polynomial> f;
    std::optional<ModelLineage> lineage;

    int n() const { return static_cast<int>(variables.size()); }
    int m() const { return static_cast<int>(f.size()); }

    Eigen::MatrixXd eval_a(std::span<const double> x) const;
    Eigen::VectorXd eval_f(std::span<const double> x) const;
    // a(x) v - f(x)
    Eigen::VectorXd residual(std::span<const double> x, const Eigen::VectorXd& v) const;

    // [a(x), f(x)] as one m x (n+1) polynomial matrix.
    PolynomialMatrix augmented() const { return a.augmented_with_column(f); }
};

IdeSystem make_system(std::string name, std::vector<std::string> vars, PolynomialMatrix a,
                      std::vector<Polynomial> f);

enum class RestrictionForm { Appended, AppendedWithDerivative };

// Restriction to {phi = 0} after the equivalence theorem for regularly
// defined submanifolds: Appended yields (a (+) 0, f (+) phi);
// AppendedWithDerivative yields (a (+) Dphi (+) 0, f (+) 0 (+) phi).
IdeSystem restrict_by_constraints(const IdeSystem& s, const ConstraintSet& c,
                                  RestrictionForm form);

// Pullback along pi: domain of the result is the map's domain;
// a'(y) = a(pi(y)) Jpi(y), f'(y) = f(pi(y)).
IdeSystem pullback(const IdeSystem& s, const PolynomialMap& pi);

// (g a, g f) for a constant linear g on the range.
IdeSystem project_range(const IdeSystem& s, const LinearRangeMap& g);

// Stacks ranges: (a1 (+) a2, f1 (+) f2) over a common domain.
IdeSystem direct_sum(const IdeSystem& s1, const IdeSystem& s2);

// b(y) ydot = 0 over y = (x, t) with b = [a(x), -f(x)]. The time variable
// gets a fresh name ("t_hom", suffixed on collision).
IdeSystem homogenize(const IdeSystem& s);

// --- model / map / constraint files (JSON) --------------------------------

IdeSystem load_model(const std::string& path);
IdeSystem model_from_json_string(const std::string& text);
std::string model_to_json_string(const IdeSystem& s);
void save_model(const IdeSystem& s, const std::string& path);

PolynomialMap load_map(const std::string& path);
PolynomialMap map_from_json_string(const std::string& text);
std::string map_to_json_string(const PolynomialMap& map);

ConstraintSet load_constraints(const std::string& path);
ConstraintSet constraints_from_json_string(const std::string& text);
std::string constraints_to_json_string(const ConstraintSet& c);

}  // namespace ide
