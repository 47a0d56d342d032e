#pragma once

#include "ide/desingularization.hpp"
#include "ide/stratification.hpp"

#include <cstdint>

namespace ide::sphere {

// Raised when a chart computation reaches the sin(theta) = 0 rank
// degeneracy of the angular coordinates.
struct SinThetaZero : IdeError {
    using IdeError::IdeError;
};

// Dimensionless parameters of the rolling symmetric elastic sphere:
// alpha = I3/I1, beta = M r^2 / I1, epsilon the normalized energy.
struct SphereParams {
    Rational alpha = Rational(2);
    Rational beta = Rational(1);
    Rational epsilon = Rational(1);
    double radius = 1.0;  // only used to reconstruct the contact velocity

    static SphereParams make(const Rational& alpha, const Rational& beta,
                             const Rational& epsilon);

    Rational mu() const { return Rational(2) * epsilon / (Rational(1) + beta); }
    Rational lambda() const { return (alpha + beta) / (Rational(1) + beta); }
    double mu_d() const { return to_double(mu()); }
    double lambda_d() const { return to_double(lambda()); }
    double b() const;                       // sqrt(mu)
    double a_of_theta(double theta) const;  // sqrt(mu / (lambda sin^2 + cos^2))
};

// State on (or near) the desingularizing manifold: z the body axis in
// space, u = zdot x z, v0 the component of the angular velocity along z.
struct AmbientState {
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    double v0 = 0.0;

    Eigen::VectorXd as_vector() const;
    static AmbientState from_vector(const Eigen::VectorXd& x);
};

struct ChartPoint {
    double theta = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double w() const { return phi - psi; }
};

const std::vector<std::string>& variables();  // z1 z2 z3 u1 u2 u3 v0

// The 8x7 standard-form system of the reduced equations of motion.
IdeSystem build_full_system(const SphereParams& p);

// The four equations cutting the desingularizing manifold out of R^7:
// u3 - v0 z3, u^2 + lambda v0^2 - mu, z^2 - 1, <z, u>.
ConstraintSet manifold_constraints(const SphereParams& p);

// The 8-equation lifted system on the desingularizing manifold, wrapped
// with the (identity) desingularization map and the manifold constraints.
LiftedSystem build_lifted_system(const SphereParams& p);

// The 11-equation system with the differentiated constraints: built
// programmatically by restricting the dynamic core with derivatives,
// substituting the explicit zdot rows, dropping the resulting zero row and
// rescaling (all constant range operations).
IdeSystem build_extended_lifted_system(const SphereParams& p);

// Built-in restrictions to the two components of the rank-drop locus.
IdeSystem build_branch_z3_system(const SphereParams& p);    // {z3 = 0}
IdeSystem build_branch_axis_system(const SphereParams& p);  // {z1 = z2 = 0}

AmbientState chart_embed(const ChartPoint& c, const SphereParams& p);
// d(chart)/d(theta, phi, psi), analytic.
Eigen::Matrix<double, 7, 3> chart_jacobian(const ChartPoint& c, const SphereParams& p);

// (theta_dot, phi_dot, psi_dot) of the reduced dynamics; requires
// |sin theta| > guard.
Eigen::Vector3d reduced_rhs(const ChartPoint& c, const SphereParams& p, double guard = 1e-8);
// (theta_dot, w_dot) of the planar system in (theta, w = phi - psi).
Eigen::Vector2d planar_rhs(double theta, double w, const SphereParams& p, double guard = 1e-8);
// sin(theta) cos(w), constant along planar flows.
double first_integral(double theta, double w);

enum class SpecialKind { Z3ZeroRolling, SinThetaZeroCircle };

// Closed-form trajectories on the two singular branches, sampled on a
// uniform grid. The initial state must be consistent with the branch.
Trajectory special_solution(SpecialKind kind, const SphereParams& p, const Eigen::VectorXd& init,
                            double t0, double t1, double step);

struct KinematicsReport {
    std::vector<double> times;
    std::vector<Eigen::Vector3d> omega;             // spatial angular velocity
    std::vector<Eigen::Vector3d> contact_velocity;  // omega x r e3
    double max_abs_omega3 = 0.0;
};

KinematicsReport reconstruct_kinematics(const Trajectory& traj, const SphereParams& p);

struct RankSweepReport {
    int n = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    std::vector<int> failures;
    double min_sigma_ratio = 0.0;
    double min_pole_gram = 0.0;  // chart sweep pole check only
    bool pass = false;

    std::string to_json_string() const;
};

// Rank-4 sweep of the constraint tangent matrix over sampled manifold
// points (plus the two poles).
RankSweepReport verify_manifold_rank(const SphereParams& p, int n_samples, std::uint64_t seed,
                                 double tol);
// Rank-3 sweep of the chart Jacobian over interior samples plus the
// independence of the three pole tangent vectors.
RankSweepReport verify_chart_rank(const SphereParams& p, int n_samples, std::uint64_t seed,
                                 double tol);

std::vector<AmbientState> sample_m1b(const SphereParams& p, int n, std::uint64_t seed);

// Chart-space trajectories (the chart involves square roots and trig, so
// these run outside the polynomial solver).
struct ChartTrajectory {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> states;
    Termination termination = Termination::Completed;
};

// RK4 on (theta, phi, psi); ends with a rank event just before
// sin(theta) = 0.
ChartTrajectory integrate_reduced(const ChartPoint& c0, const SphereParams& p, double t0,
                                  double t1, double step, double guard = 1e-8);
// RK4 on (theta, w).
ChartTrajectory integrate_planar(double theta0, double w0, const SphereParams& p, double t0,
                                 double t1, double step, double guard = 1e-8);

}  // namespace ide::sphere
