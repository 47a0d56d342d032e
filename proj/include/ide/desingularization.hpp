#pragma once

#include "ide/solver.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ide {

// User-supplied desingularization map pi : R^p -> R^n with its symbolic
// Jacobian; source_constraints cut the desingularizing manifold out of the
// ambient source chart.
struct DesingMap {
    PolynomialMap map;
    PolynomialMatrix jacobian;  // n x p, entry (i, j) = d map_i / d y_j
    std::optional<ConstraintSet> source_constraints;

    static DesingMap from_map(PolynomialMap map,
                              std::optional<ConstraintSet> source_constraints = std::nullopt);

    std::size_t source_dimension() const { return map.domain_dimension(); }
    std::size_t target_dimension() const { return map.codomain_dimension(); }

    std::vector<double> apply(std::span<const double> y) const { return map.evaluate(y); }
    Eigen::MatrixXd jacobian_at(std::span<const double> y) const;
};

// The pullback (a o pi . Jpi, f o pi) with the source constraints appended,
// tagged with its level in the desingularization sequence.
struct LiftedSystem {
    IdeSystem system;  // over the source variables
    int level = 1;
    IdeSystem parent;
    DesingMap map;
};

LiftedSystem lift_system(const IdeSystem& parent, const DesingMap& m);

// Pushes a lifted trajectory down: x = pi(y), xdot = Jpi(y) ydot, with
// diagnostics recomputed against the parent system.
Trajectory project_solution(const LiftedSystem& l, const Trajectory& traj);

struct Junction {
    Eigen::VectorXd left_state;
    Eigen::VectorXd right_state;
    double gap = 0.0;
    bool continuous = false;
};

struct PiecewiseSolution {
    std::vector<std::pair<int, Trajectory>> pieces;  // (level, trajectory)
    std::vector<Junction> junctions;
};

// Chains trajectory pieces that share endpoint times; states may disagree,
// in which case the junction is flagged discontinuous (never merged
// silently). Overlapping or gapped time intervals are errors.
PiecewiseSolution glue_pieces(std::vector<std::pair<int, Trajectory>> pieces, double glue_tol,
                              double time_tol = 1e-6);

struct ProjectionResidualReport {
    double lifted_residual = 0.0;     // pullback-system residual at (y, ydot)
    double chainrule_residual = 0.0;  // || a(pi(y)) (Jpi(y) ydot) - f(pi(y)) ||
    double identity_gap = 0.0;
    double jacobian_fd_error = 0.0;
    bool pass = false;
};

// The two residual routes are the same polynomial identity; this checks
// them numerically (1e-12, relative to the residual magnitude) and
// cross-checks the symbolic Jacobian against central finite differences
// (1e-6).
ProjectionResidualReport verify_projection_residual(const IdeSystem& parent, const DesingMap& m,
                                                    std::span<const double> y,
                                                    const Eigen::VectorXd& ydot);

// Reinterprets a homogeneous-mode trajectory over (x, t) as a trajectory in
// x parametrized by its own t column (used to glue through impasse points).
Trajectory eliminate_parameter(const Trajectory& homogeneous);

}  // namespace ide
