#include "ide/elastic_sphere.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ide::sphere {

using nlohmann::json;

namespace {

const std::vector<std::string> kVars = {"z1", "z2", "z3", "u1", "u2", "u3", "v0"};

Polynomial V(const std::string& name) { return Polynomial::variable(kVars, name); }
Polynomial C(const Rational& r) { return Polynomial::constant(kVars, r); }

std::span<const double> span_of(const Eigen::VectorXd& x) {
    return {x.data(), static_cast<std::size_t>(x.size())};
}

}  // namespace

const std::vector<std::string>& variables() { return kVars; }

SphereParams SphereParams::make(const Rational& alpha, const Rational& beta,
                                const Rational& epsilon) {
    if (!(alpha > 0 && beta > 0 && epsilon > 0))
        throw IdeError("sphere parameters must be positive");
    SphereParams p;
    p.alpha = alpha;
    p.beta = beta;
    p.epsilon = epsilon;
    return p;
}

double SphereParams::b() const { return std::sqrt(mu_d()); }

double SphereParams::a_of_theta(double theta) const {
    double st = std::sin(theta), ct = std::cos(theta);
    return std::sqrt(mu_d() / (lambda_d() * st * st + ct * ct));
}

Eigen::VectorXd AmbientState::as_vector() const {
    Eigen::VectorXd x(7);
    x << z[0], z[1], z[2], u[0], u[1], u[2], v0;
    return x;
}

AmbientState AmbientState::from_vector(const Eigen::VectorXd& x) {
    if (x.size() != 7) throw IdeError("ambient state must have 7 components");
    AmbientState s;
    s.z = x.head<3>();
    s.u = x.segment<3>(3);
    s.v0 = x[6];
    return s;
}

IdeSystem build_full_system(const SphereParams& p) {
    if (!(p.alpha > 0 && p.beta > 0 && p.epsilon > 0))
        throw IdeError("sphere parameters must be positive");
    const Rational ab = p.alpha + p.beta;   // alpha + beta
    const Rational b1 = Rational(1) + p.beta;  // 1 + beta
    const Rational e2 = Rational(2) * p.epsilon;

    auto z1 = V("z1"), z2 = V("z2"), z3 = V("z3");
    auto u1 = V("u1"), u2 = V("u2"), u3 = V("u3"), v0 = V("v0");
    auto usq = u1 * u1 + u2 * u2 + u3 * u3;

    PolynomialMatrix a(8, 7, kVars);
    a.at(0, 0) = C(1);
    a.at(1, 1) = C(1);
    a.at(2, 2) = C(1);
    a.at(3, 3) = -(C(b1) * z2 * z3);
    a.at(3, 4) = C(b1) * z1 * z3;

    std::vector<Polynomial> f = {
        z2 * u3 - z3 * u2,
        z3 * u1 - z1 * u3,
        z1 * u2 - z2 * u1,
        -(C(ab) * u3 * u3),
        C(b1) * z3 * z3 * usq + C(ab) * u3 * u3 - C(e2) * z3 * z3,
        z1 * z1 + z2 * z2 + z3 * z3 - C(1),
        z1 * u1 + z2 * u2 + z3 * u3,
        C(e2) - C(b1) * usq - C(ab) * v0 * v0,
    };
    return make_system("sphere_full", kVars, std::move(a), std::move(f));
}

ConstraintSet manifold_constraints(const SphereParams& p) {
    auto z1 = V("z1"), z2 = V("z2"), z3 = V("z3");
    auto u1 = V("u1"), u2 = V("u2"), u3 = V("u3"), v0 = V("v0");
    return ConstraintSet(kVars, {
        u3 - v0 * z3,
        u1 * u1 + u2 * u2 + u3 * u3 + C(p.lambda()) * v0 * v0 - C(p.mu()),
        z1 * z1 + z2 * z2 + z3 * z3 - C(1),
        z1 * u1 + z2 * u2 + z3 * u3,
    });
}

namespace {

// The dynamic rows of the lifted system: zdot = z x u plus the row
// z2 u1dot - z1 u2dot = lambda v0 u3 (the z3 != 0 reduction of the torque
// balance on the manifold, where the u3^2 source becomes lambda v0 u3 z3).
IdeSystem lifted_core(const SphereParams& p) {
    auto z1 = V("z1"), z2 = V("z2"), z3 = V("z3");
    auto u1 = V("u1"), u2 = V("u2"), u3 = V("u3"), v0 = V("v0");
    PolynomialMatrix a(4, 7, kVars);
    a.at(0, 0) = C(1);
    a.at(1, 1) = C(1);
    a.at(2, 2) = C(1);
    a.at(3, 3) = z2;
    a.at(3, 4) = -z1;
    std::vector<Polynomial> f = {
        z2 * u3 - z3 * u2,
        z3 * u1 - z1 * u3,
        z1 * u2 - z2 * u1,
        C(p.lambda()) * v0 * u3,
    };
    return make_system("sphere_lift_core", kVars, std::move(a), std::move(f));
}

// Row-reduce away the explicit derivative rows: rows `solved` have a-part
// equal to a coordinate unit vector, so their zdot columns can be
// eliminated from every other row by polynomial row operations (which
// preserve the solution set).
void substitute_explicit_rows(IdeSystem& s, const std::vector<std::size_t>& solved) {
    for (std::size_t r = 0; r < static_cast<std::size_t>(s.m()); ++r) {
        if (std::find(solved.begin(), solved.end(), r) != solved.end()) continue;
        for (std::size_t e : solved) {
            // Row e reads xdot_j = f_e with column j the only a-entry.
            std::size_t col = 0;
            bool found = false;
            for (std::size_t j = 0; j < static_cast<std::size_t>(s.n()); ++j) {
                if (!s.a.at(e, j).is_zero()) {
                    col = j;
                    found = true;
                    break;
                }
            }
            if (!found) continue;
            Polynomial coeff = s.a.at(r, col);
            if (coeff.is_zero()) continue;
            for (std::size_t j = 0; j < static_cast<std::size_t>(s.n()); ++j)
                s.a.at(r, j) -= coeff * s.a.at(e, j);
            s.f[r] -= coeff * s.f[e];
        }
    }
}

}  // namespace

LiftedSystem build_lifted_system(const SphereParams& p) {
    IdeSystem full = build_full_system(p);
    IdeSystem display =
        restrict_by_constraints(lifted_core(p), manifold_constraints(p), RestrictionForm::Appended);
    display.name = "sphere_lifted";
    display.lineage = ModelLineage{1, full.name, ""};

    LiftedSystem out;
    out.system = std::move(display);
    out.level = 1;
    out.parent = std::move(full);
    out.map = DesingMap::from_map(PolynomialMap::identity(kVars), manifold_constraints(p));
    return out;
}

IdeSystem build_extended_lifted_system(const SphereParams& p) {
    IdeSystem sys = restrict_by_constraints(lifted_core(p), manifold_constraints(p),
                                            RestrictionForm::AppendedWithDerivative);
    // Rows: 0-3 core, 4-7 differentiated constraints, 8-11 constraints.
    substitute_explicit_rows(sys, {0, 1, 2});
    // The differentiated sphere equation becomes 0 = 0 after substitution.
    if (!sys.a.at(6, 0).is_zero() || !sys.f[6].is_zero())
        throw IdeError("internal error: redundant row did not vanish");
    for (std::size_t j = 0; j < static_cast<std::size_t>(sys.n()); ++j)
        if (!sys.a.at(6, j).is_zero())
            throw IdeError("internal error: redundant row did not vanish");

    // Reorder to (core, <z,udot>, energy row halved, u3dot row, constraints)
    // and drop the vanished row.
    LinearRangeMap g;
    g.matrix.assign(11, std::vector<Rational>(12, Rational(0)));
    g.matrix[0][0] = 1;
    g.matrix[1][1] = 1;
    g.matrix[2][2] = 1;
    g.matrix[3][3] = 1;
    g.matrix[4][7] = 1;               // <z, udot> = 0
    g.matrix[5][5] = Rational(1, 2);  // u.udot + lambda v0 v0dot = 0
    g.matrix[6][4] = 1;               // u3dot - z3 v0dot = v0 (z1 u2 - z2 u1)
    g.matrix[7][8] = 1;
    g.matrix[8][9] = 1;
    g.matrix[9][10] = 1;
    g.matrix[10][11] = 1;
    IdeSystem out = project_range(sys, g);
    out.name = "sphere_extended";
    out.lineage = ModelLineage{1, "sphere_full", ""};
    return out;
}

IdeSystem build_branch_z3_system(const SphereParams& p) {
    ConstraintSet c(kVars, {V("z3")});
    IdeSystem s = restrict_by_constraints(build_full_system(p), c,
                                          RestrictionForm::AppendedWithDerivative);
    s.name = "sphere_branch_z3";
    return s;
}

IdeSystem build_branch_axis_system(const SphereParams& p) {
    ConstraintSet c(kVars, {V("z1"), V("z2")});
    IdeSystem s = restrict_by_constraints(build_full_system(p), c,
                                          RestrictionForm::AppendedWithDerivative);
    s.name = "sphere_branch_axis";
    return s;
}

AmbientState chart_embed(const ChartPoint& c, const SphereParams& p) {
    const double st = std::sin(c.theta), ct = std::cos(c.theta);
    const double cf = std::cos(c.phi), sf = std::sin(c.phi);
    const double cw = std::cos(c.w()), sw = std::sin(c.w());
    const double a = p.a_of_theta(c.theta);
    const double b = p.b();
    AmbientState s;
    s.z = {st * cf, st * sf, ct};
    s.u = {-a * cw * ct * ct * cf - b * sw * sf, -a * cw * ct * ct * sf + b * sw * cf,
           a * cw * ct * st};
    s.v0 = a * cw * st;
    return s;
}

Eigen::Matrix<double, 7, 3> chart_jacobian(const ChartPoint& c, const SphereParams& p) {
    const double st = std::sin(c.theta), ct = std::cos(c.theta);
    const double cf = std::cos(c.phi), sf = std::sin(c.phi);
    const double cw = std::cos(c.w()), sw = std::sin(c.w());
    const double a = p.a_of_theta(c.theta);
    const double b = p.b();
    const double lam = p.lambda_d();
    const double denom = lam * st * st + ct * ct;
    const double ap = -a * (lam - 1.0) * st * ct / denom;  // da/dtheta

    Eigen::Matrix<double, 7, 3> J;
    J.setZero();
    J(0, 0) = ct * cf;
    J(0, 1) = -st * sf;
    J(1, 0) = ct * sf;
    J(1, 1) = st * cf;
    J(2, 0) = -st;
    J(3, 0) = -ap * cw * ct * ct * cf + 2.0 * a * cw * ct * st * cf;
    J(3, 1) = a * sw * ct * ct * cf + a * cw * ct * ct * sf - b * cw * sf - b * sw * cf;
    J(3, 2) = -a * sw * ct * ct * cf + b * cw * sf;
    J(4, 0) = -ap * cw * ct * ct * sf + 2.0 * a * cw * ct * st * sf;
    J(4, 1) = a * sw * ct * ct * sf - a * cw * ct * ct * cf + b * cw * cf - b * sw * sf;
    J(4, 2) = -a * sw * ct * ct * sf - b * cw * cf;
    J(5, 0) = ap * cw * ct * st + a * cw * (ct * ct - st * st);
    J(5, 1) = -a * sw * ct * st;
    J(5, 2) = a * sw * ct * st;
    J(6, 0) = ap * cw * st + a * cw * ct;
    J(6, 1) = -a * sw * st;
    J(6, 2) = a * sw * st;
    return J;
}

Eigen::Vector3d reduced_rhs(const ChartPoint& c, const SphereParams& p, double guard) {
    const double st = std::sin(c.theta);
    if (std::abs(st) <= guard)
        throw SinThetaZero("reduced dynamics leave the chart at sin(theta) = 0");
    const double cot = std::cos(c.theta) / st;
    const double cw = std::cos(c.w()), sw = std::sin(c.w());
    const double a = p.a_of_theta(c.theta);
    const double b = p.b();
    return {-b * sw, -a * cot * cw, (b - a) * cot * cw};
}

Eigen::Vector2d planar_rhs(double theta, double w, const SphereParams& p, double guard) {
    const double st = std::sin(theta);
    if (std::abs(st) <= guard)
        throw SinThetaZero("planar dynamics leave the chart at sin(theta) = 0");
    const double b = p.b();
    return {-b * std::sin(w), -b * (std::cos(theta) / st) * std::cos(w)};
}

double first_integral(double theta, double w) { return std::sin(theta) * std::cos(w); }

Trajectory special_solution(SpecialKind kind, const SphereParams& p, const Eigen::VectorXd& init,
                            double t0, double t1, double step) {
    if (init.size() != 7) throw IdeError("special_solution: initial state must have 7 entries");
    if (!(step > 0.0) || !(t1 > t0)) throw IdeError("special_solution: bad time grid");
    AmbientState s0 = AmbientState::from_vector(init);
    const double tol = 1e-9;

    Trajectory traj;
    traj.variables = kVars;
    TrajectorySegment seg;
    seg.termination = Termination::Completed;
    IdeSystem full = build_full_system(p);

    auto push = [&](double t, const AmbientState& s, const Eigen::VectorXd& deriv) {
        Eigen::VectorXd x = s.as_vector();
        StepDiagnostics diag;
        diag.residual = full.residual(span_of(x), deriv).norm();
        seg.times.push_back(t);
        seg.states.push_back(std::move(x));
        seg.derivs.push_back(deriv);
        seg.diagnostics.push_back(diag);
    };

    if (kind == SpecialKind::Z3ZeroRolling) {
        double v0sq = to_double(Rational(2) * p.epsilon / (p.alpha + p.beta));
        if (std::abs(s0.z[2]) > tol || s0.u.norm() > tol ||
            std::abs(s0.z.squaredNorm() - 1.0) > tol ||
            std::abs(s0.v0 * s0.v0 - v0sq) > 100 * tol)
            throw IdeError("initial data inconsistent with the fixed-axis rolling branch");
        seg.system_id = "sphere_z3_zero_rolling";
        for (double t = t0; t <= t1 + 0.5 * step; t += step)
            push(t, s0, Eigen::VectorXd::Zero(7));
    } else {
        double musq = p.mu_d();
        if (std::abs(std::abs(s0.z[2]) - 1.0) > tol || std::hypot(s0.z[0], s0.z[1]) > tol ||
            std::abs(s0.v0) > tol || std::abs(s0.u[2]) > tol ||
            std::abs(s0.u.squaredNorm() - musq) > 100 * tol)
            throw IdeError("initial data inconsistent with the vertical circle branch");
        seg.system_id = "sphere_sin_theta_zero_circle";
        const double omega = s0.u.norm();
        Eigen::Vector3d axis = s0.u / omega;
        Eigen::Vector3d e1 = s0.z;
        Eigen::Vector3d e2 = axis.cross(s0.z);
        for (double t = t0; t <= t1 + 0.5 * step; t += step) {
            AmbientState s = s0;
            s.z = std::cos(omega * t) * e1 - std::sin(omega * t) * e2;
            Eigen::VectorXd deriv(7);
            Eigen::Vector3d zdot = -omega * std::sin(omega * t) * e1 -
                                   omega * std::cos(omega * t) * e2;
            deriv << zdot[0], zdot[1], zdot[2], 0, 0, 0, 0;
            push(t, s, deriv);
        }
    }
    traj.segments.push_back(std::move(seg));
    return traj;
}

KinematicsReport reconstruct_kinematics(const Trajectory& traj, const SphereParams& p) {
    KinematicsReport report;
    const Eigen::Vector3d e3(0, 0, 1);
    for (const auto& seg : traj.segments) {
        for (std::size_t i = 0; i < seg.size(); ++i) {
            AmbientState s = AmbientState::from_vector(seg.states[i]);
            Eigen::Vector3d zdot = s.z.cross(s.u);
            Eigen::Vector3d omega = s.v0 * s.z + s.z.cross(zdot);
            report.times.push_back(seg.times[i]);
            report.omega.push_back(omega);
            report.contact_velocity.push_back(omega.cross(p.radius * e3));
            report.max_abs_omega3 = std::max(report.max_abs_omega3, std::abs(omega[2]));
        }
    }
    return report;
}

namespace {

Eigen::Matrix<double, 4, 7> tangent_matrix(const AmbientState& s, double lambda) {
    Eigen::Matrix<double, 4, 7> m;
    m << 0, 0, -s.v0, 0, 0, 1, -s.z[2],
         0, 0, 0, s.u[0], s.u[1], s.u[2], lambda * s.v0,
         s.z[0], s.z[1], s.z[2], 0, 0, 0, 0,
         s.u[0], s.u[1], s.u[2], s.z[0], s.z[1], s.z[2], 0;
    return m;
}

double sigma_ratio(const Eigen::MatrixXd& m, int r) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    if (sigma[0] == 0.0) return 0.0;
    return sigma[r - 1] / sigma[0];
}

}  // namespace

RankSweepReport verify_manifold_rank(const SphereParams& p, int n_samples, std::uint64_t seed,
                                 double tol) {
    if (n_samples < 1) throw IdeError("need at least one sample");
    RankSweepReport report;
    report.n = n_samples;
    report.seed = seed;
    report.tol = tol;
    report.min_sigma_ratio = std::numeric_limits<double>::infinity();
    const double pi = std::acos(-1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> th(1e-3, pi - 1e-3);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);

    auto check = [&](int index, const AmbientState& s) {
        double ratio = sigma_ratio(tangent_matrix(s, p.lambda_d()), 4);
        report.min_sigma_ratio = std::min(report.min_sigma_ratio, ratio);
        if (!(ratio > tol)) report.failures.push_back(index);
    };
    for (int i = 0; i < n_samples; ++i)
        check(i, chart_embed({th(rng), angle(rng), angle(rng)}, p));
    // The two poles, reached through the theta = 0 / theta = pi states.
    check(n_samples, chart_embed({0.0, 0.0, angle(rng)}, p));
    check(n_samples + 1, chart_embed({pi, 0.0, angle(rng)}, p));
    report.pass = report.failures.empty();
    return report;
}

RankSweepReport verify_chart_rank(const SphereParams& p, int n_samples, std::uint64_t seed,
                                 double tol) {
    if (n_samples < 1) throw IdeError("need at least one sample");
    RankSweepReport report;
    report.n = n_samples;
    report.seed = seed;
    report.tol = tol;
    report.min_sigma_ratio = std::numeric_limits<double>::infinity();
    report.min_pole_gram = std::numeric_limits<double>::infinity();
    const double pi = std::acos(-1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> th(0.0, pi);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);

    for (int i = 0; i < n_samples; ++i) {
        double theta = th(rng);
        while (std::sin(theta) <= 0.05) theta = th(rng);
        ChartPoint c{theta, angle(rng), angle(rng)};
        double ratio = sigma_ratio(chart_jacobian(c, p), 3);
        report.min_sigma_ratio = std::min(report.min_sigma_ratio, ratio);
        if (!(ratio > tol)) report.failures.push_back(i);
    }

    // Pole tangent vectors: two transversal theta-curves (phi = 0, pi/2)
    // plus the psi direction.
    const double b = p.b();
    auto pole_gram = [&](double theta_pole, double psi) {
        double sign = theta_pole == 0.0 ? 1.0 : -1.0;
        Eigen::Matrix<double, 7, 3> T;
        T.setZero();
        T(0, 0) = sign;
        T(5, 0) = b * std::cos(psi);
        T(6, 0) = sign * b * std::cos(psi);
        T(1, 1) = sign;
        T(5, 1) = b * std::sin(psi);
        T(6, 1) = sign * b * std::sin(psi);
        T(3, 2) = b * std::sin(psi);
        T(4, 2) = -b * std::cos(psi);
        return (T.transpose() * T).determinant();
    };
    for (int k = 0; k < 8; ++k) {
        double psi = angle(rng);
        for (double pole : {0.0, pi}) {
            double det = pole_gram(pole, psi);
            report.min_pole_gram = std::min(report.min_pole_gram, det);
            if (!(det > 1e-8)) report.failures.push_back(-1 - k);
        }
    }
    report.pass = report.failures.empty();
    return report;
}

std::string RankSweepReport::to_json_string() const {
    json j;
    j["n"] = n;
    j["seed"] = seed;
    j["tol"] = tol;
    j["failures"] = failures;
    j["min_sigma_ratio"] = min_sigma_ratio;
    if (std::isfinite(min_pole_gram)) j["min_pole_gram"] = min_pole_gram;
    j["pass"] = pass;
    return j.dump(2);
}

std::vector<AmbientState> sample_m1b(const SphereParams& p, int n, std::uint64_t seed) {
    if (n < 1) throw IdeError("need at least one sample");
    const double pi = std::acos(-1.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> th(0.0, pi);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
    std::vector<AmbientState> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(chart_embed({th(rng), angle(rng), angle(rng)}, p));
    return out;
}

namespace {

// Shared RK4 with a sign guard on sin(theta): steps that cross or enter the
// guard band are refined by bisection, then the trajectory ends with a rank
// event just before the coordinate singularity.
ChartTrajectory integrate_chart(Eigen::VectorXd x0, double t0, double t1, double step,
                                const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& rhs,
                                double guard) {
    if (!(step > 0.0)) throw IdeError("chart integration: step must be positive");
    ChartTrajectory out;
    double t = t0;
    Eigen::VectorXd x = std::move(x0);
    out.times.push_back(t);
    out.states.push_back(x);

    const double span = std::abs(t1 - t0);
    const double sgn = t1 >= t0 ? 1.0 : -1.0;
    const double event_tol = 1e-10;
    double sign0 = std::sin(x[0]) >= 0.0 ? 1.0 : -1.0;

    auto try_step = [&](const Eigen::VectorXd& from, double h, Eigen::VectorXd& to) -> bool {
        auto guarded = [&](const Eigen::VectorXd& state) -> std::optional<Eigen::VectorXd> {
            if (std::abs(std::sin(state[0])) <= guard) return std::nullopt;
            return rhs(state);
        };
        auto k1 = guarded(from);
        if (!k1) return false;
        auto k2 = guarded(from + 0.5 * h * *k1);
        if (!k2) return false;
        auto k3 = guarded(from + 0.5 * h * *k2);
        if (!k3) return false;
        auto k4 = guarded(from + h * *k3);
        if (!k4) return false;
        to = from + (h / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
        double s_new = std::sin(to[0]);
        if (std::abs(s_new) <= guard) return false;
        if ((s_new >= 0.0 ? 1.0 : -1.0) != sign0) return false;  // crossed the pole
        return true;
    };

    long max_rounds = static_cast<long>(span / step) + 20000;
    long rounds = 0;
    while (std::abs(t - t1) > 1e-13 * std::max(1.0, span)) {
        if (++rounds > max_rounds) throw IdeError("chart integration: step budget exhausted");
        double h = std::min(step, std::abs(t1 - t));
        Eigen::VectorXd next;
        if (try_step(x, sgn * h, next)) {
            x = next;
            t += sgn * h;
            out.times.push_back(t);
            out.states.push_back(x);
            continue;
        }
        double lo = 0.0, hi = h;
        Eigen::VectorXd good;
        while (hi - lo > event_tol) {
            double mid = 0.5 * (lo + hi);
            Eigen::VectorXd trial;
            if (try_step(x, sgn * mid, trial)) {
                lo = mid;
                good = trial;
            } else {
                hi = mid;
            }
        }
        if (lo > 2 * event_tol) {
            x = good;
            t += sgn * lo;
            out.times.push_back(t);
            out.states.push_back(x);
            continue;
        }
        out.termination = Termination::RankEvent;
        break;
    }
    return out;
}

}  // namespace

ChartTrajectory integrate_reduced(const ChartPoint& c0, const SphereParams& p, double t0,
                                  double t1, double step, double guard) {
    Eigen::VectorXd x0(3);
    x0 << c0.theta, c0.phi, c0.psi;
    return integrate_chart(
        x0, t0, t1, step,
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return reduced_rhs({x[0], x[1], x[2]}, p, guard);
        },
        guard);
}

ChartTrajectory integrate_planar(double theta0, double w0, const SphereParams& p, double t0,
                                 double t1, double step, double guard) {
    Eigen::VectorXd x0(2);
    x0 << theta0, w0;
    return integrate_chart(
        x0, t0, t1, step,
        [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            return planar_rhs(x[0], x[1], p, guard);
        },
        guard);
}

}  // namespace ide::sphere
