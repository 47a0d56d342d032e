#pragma once

#include "ide/ide_system.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ide {

// The linear algebraic system a(x) v = f(x) has no solution at this point.
struct NoSolutionAtPoint : IdeError {
    using IdeError::IdeError;
};

// Solution set of the LAS at a point: particular + span(null_basis).
struct AffineDistribution {
    Eigen::VectorXd particular;  // min-norm solution, orthogonal to the kernel
    Eigen::MatrixXd null_basis;  // n x (n - rank), orthonormal columns
    int rank = 0;
    double residual = 0.0;  // || a(x) particular - f(x) ||
};

std::optional<AffineDistribution> try_solve_las(const IdeSystem& s, std::span<const double> x,
                                                double tol = 1e-8);
AffineDistribution solve_las(const IdeSystem& s, std::span<const double> x, double tol = 1e-8);

// A selector picks kernel coefficients c; the chosen field is
// particular + null_basis c. The default (empty function) is min-norm.
using FieldSelector = std::function<Eigen::VectorXd(const AffineDistribution&)>;

Eigen::VectorXd select_vector_field(const AffineDistribution& d);
Eigen::VectorXd select_vector_field(const AffineDistribution& d, const FieldSelector& selector);

enum class IntegrationMode { Direct, Homogeneous };
enum class Termination { Completed, RankEvent, NoSolution, BlowUp };
std::string to_string(Termination t);

struct IntegrationOptions {
    double step = 1e-3;
    double t0 = 0.0;
    double t1 = 1.0;
    std::optional<ConstraintSet> projection_constraints;
    int project_every = 1;
    double rank_tol = 1e-8;   // singular value threshold, relative
    double event_tol = 1e-8;  // time resolution of event bisection
    IntegrationMode mode = IntegrationMode::Direct;
    double las_tol = 1e-8;
    double field_cap = 1e6;        // stage fields above this norm end the segment
    double stage_spread_cap = 0.5; // stage disagreement relative to the first stage
    double blow_up_norm = 1e12;
    double projection_tol = 1e-12;
    int projection_max_iter = 25;
    int orientation = +1;  // flips the initial direction in homogeneous mode
    FieldSelector selector;
};

struct StepDiagnostics {
    double residual = 0.0;
    double constraint_norm = 0.0;
    int rank_a = 0;
    int rank_af = 0;
    bool projection_converged = true;
};

struct TrajectorySegment {
    std::string system_id;
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> derivs;  // selected field (or curve direction)
    std::vector<StepDiagnostics> diagnostics;
    Termination termination = Termination::Completed;

    std::size_t size() const { return times.size(); }
};

struct Trajectory {
    std::vector<std::string> variables;
    std::vector<TrajectorySegment> segments;

    const TrajectorySegment& back() const { return segments.back(); }
};

// Fixed-step classical RK4 on the selected field with optional Gauss-Newton
// projection onto the constraint set after accepted steps. Rank changes and
// field blow-ups end the segment; the boundary time is refined by bisection
// down to event_tol.
Trajectory integrate(const IdeSystem& s, std::span<const double> x0,
                     const IntegrationOptions& opts);

// Arc-length integration of the homogenized system b(y) ydot = 0 over
// y = (x, t), following the unit kernel direction with continuity-based
// orientation. Traverses points where tdot = 0.
Trajectory integrate_homogeneous(const IdeSystem& s, std::span<const double> x0, double t0,
                                 const IntegrationOptions& opts);

struct ProjectionResult {
    std::vector<double> point;
    bool converged = false;
    int iterations = 0;
    double residual = 0.0;
};

// Gauss-Newton projection onto {phi = 0} via min-norm pseudo-inverse steps.
ProjectionResult project_onto_constraints(std::span<const double> x, const ConstraintSet& c,
                                          double tol = 1e-12, int max_iter = 25);

// First index whose rank_a differs from the segment's initial rank; if the
// segment was cut by a rank event without a recorded rank change, the final
// index (the refined event boundary).
std::optional<std::size_t> detect_rank_event(const TrajectorySegment& seg);

// CSV per the documented trajectory format (17 significant digits).
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
std::string trajectory_to_csv(const Trajectory& traj);

}  // namespace ide
