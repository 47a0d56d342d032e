#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ide/elastic_sphere.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace ide;
using namespace ide::sphere;

namespace {

const double PI = std::acos(-1.0);

SphereParams default_params() { return SphereParams::make(Rational(2), Rational(1), Rational(1)); }

Polynomial P(const std::string& text) { return parse_polynomial(text, variables()); }

std::span<const double> span_of(const Eigen::VectorXd& x) {
    return {x.data(), static_cast<std::size_t>(x.size())};
}

double constraint_violation(const AmbientState& s, const SphereParams& p) {
    auto c = manifold_constraints(p);
    return c.evaluate(span_of(s.as_vector())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("parameters") {
    auto p = default_params();
    CHECK(p.mu() == Rational(1));
    CHECK(p.lambda() == Rational(3, 2));
    CHECK(p.b() == doctest::Approx(1.0));
    CHECK(p.a_of_theta(PI / 2) == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK_THROWS_AS(SphereParams::make(Rational(-1), Rational(1), Rational(1)), IdeError);
}

TEST_CASE("full system matches the displayed matrices") {
    auto p = default_params();
    auto s = build_full_system(p);
    CHECK(s.n() == 7);
    CHECK(s.m() == 8);
    // Fourth row of a at beta = 1.
    CHECK(s.a.at(3, 3) == P("-2*z2*z3"));
    CHECK(s.a.at(3, 4) == P("2*z1*z3"));
    for (int j : {0, 1, 2, 5, 6}) CHECK(s.a.at(3, j).is_zero());
    CHECK(s.a.generic_rank() == 4);

    // Fifth component of f vanishes at the pole with horizontal unit u:
    // (1 + beta) - 2 epsilon = 0.
    std::vector<double> pole = {0, 0, 1, 1, 0, 0, 0};
    CHECK(s.eval_f(pole)[4] == doctest::Approx(0.0));

    CHECK_THROWS_AS(build_full_system(SphereParams{Rational(0), Rational(1), Rational(1)}),
                    IdeError);
}

TEST_CASE("lifted system rows and ranks") {
    auto p = default_params();
    auto lifted = build_lifted_system(p);
    const auto& s = lifted.system;
    CHECK(s.m() == 8);
    CHECK(s.n() == 7);
    // Row four reads z2 u1dot - z1 u2dot = lambda v0 u3.
    CHECK(s.a.at(3, 3) == P("z2"));
    CHECK(s.a.at(3, 4) == P("-z1"));
    CHECK(s.f[3] == P("3/2*v0*u3"));
    // Constraint rows.
    CHECK(s.f[4] == P("u3 - v0*z3"));
    CHECK(s.f[5] == P("u1^2+u2^2+u3^2 + 3/2*v0^2 - 1"));
    CHECK(s.f[6] == P("z1^2+z2^2+z3^2-1"));
    CHECK(s.f[7] == P("z1*u1+z2*u2+z3*u3"));

    // On the manifold the constraint rows vanish: rank a = rank [a, f] = 4.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> th(0.2, PI - 0.2), an(0.0, 2 * PI);
    for (int i = 0; i < 25; ++i) {
        auto st = chart_embed({th(rng), an(rng), an(rng)}, p);
        auto label = classify_point(s, span_of(st.as_vector()), 1e-8, 4);
        CHECK(label.rank_a == 4);
        CHECK(label.rank_af == 4);
        CHECK(label.stratum == Stratum::M2);
    }
}

TEST_CASE("extended lifted system reproduces the differentiated rows") {
    auto p = default_params();
    auto s = build_extended_lifted_system(p);
    CHECK(s.m() == 11);
    CHECK(s.n() == 7);
    // Row u3dot - z3 v0dot = v0 z1 u2 - v0 z2 u1.
    CHECK(s.a.at(6, 5) == P("1"));
    CHECK(s.a.at(6, 6) == P("-z3"));
    for (int j : {0, 1, 2, 3, 4}) CHECK(s.a.at(6, j).is_zero());
    CHECK(s.f[6] == P("v0*z1*u2 - v0*z2*u1"));
    // Row <z, udot> = 0.
    CHECK(s.a.at(4, 3) == P("z1"));
    CHECK(s.a.at(4, 4) == P("z2"));
    CHECK(s.a.at(4, 5) == P("z3"));
    CHECK(s.f[4].is_zero());
    // Row u . udot + lambda v0 v0dot = 0.
    CHECK(s.a.at(5, 3) == P("u1"));
    CHECK(s.a.at(5, 6) == P("3/2*v0"));
    CHECK(s.f[5].is_zero());
    // The tangency rows pin the derivative: full column rank off the poles.
    CHECK(s.a.generic_rank() == 7);
}

TEST_CASE("chart embedding") {
    auto p = default_params();
    SUBCASE("equator point") {
        auto s = chart_embed({PI / 2, 0.0, 0.0}, p);
        CHECK(s.z[0] == doctest::Approx(1.0));
        CHECK(s.z[1] == doctest::Approx(0.0));
        CHECK(std::abs(s.z[2]) < 1e-15);
        CHECK(s.u.norm() < 1e-12);
        CHECK(s.v0 == doctest::Approx(std::sqrt(2.0 / 3.0)));
        // Energy: (1+beta) u^2 + (alpha+beta) v0^2 = 2 epsilon.
        CHECK(2.0 * s.u.squaredNorm() + 3.0 * s.v0 * s.v0 == doctest::Approx(2.0));
    }
    SUBCASE("pole point is independent of phi") {
        double psi = 1.234;
        auto s1 = chart_embed({0.0, 0.3, psi}, p);
        auto s2 = chart_embed({0.0, 2.9, psi}, p);
        CHECK((s1.as_vector() - s2.as_vector()).norm() < 1e-15);
        CHECK(s1.z[2] == doctest::Approx(1.0));
        CHECK(s1.u[0] == doctest::Approx(-p.b() * std::cos(psi)));
        CHECK(s1.u[1] == doctest::Approx(-p.b() * std::sin(psi)));
        CHECK(s1.u[2] == doctest::Approx(0.0));
        CHECK(s1.v0 == doctest::Approx(0.0));
    }
    SUBCASE("constraint residuals vanish at random chart points") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> th(0.0, PI), an(0.0, 2 * PI);
        for (int i = 0; i < 1000; ++i) {
            AmbientState s = chart_embed({th(rng), an(rng), an(rng)}, p);
            CHECK(constraint_violation(s, p) < 1e-12);
        }
    }
}

TEST_CASE("chart jacobian matches finite differences") {
    auto p = default_params();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0.1, PI - 0.1), an(0.0, 2 * PI);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        auto J = chart_jacobian(c, p);
        for (int j = 0; j < 3; ++j) {
            ChartPoint cp = c, cm = c;
            double* coords_p[3] = {&cp.theta, &cp.phi, &cp.psi};
            double* coords_m[3] = {&cm.theta, &cm.phi, &cm.psi};
            *coords_p[j] += h;
            *coords_m[j] -= h;
            Eigen::VectorXd fd =
                (chart_embed(cp, p).as_vector() - chart_embed(cm, p).as_vector()) / (2 * h);
            CHECK((J.col(j) - fd).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
}

TEST_CASE("reduced dynamics") {
    auto p = default_params();
    SUBCASE("equilibrium at the equator") {
        auto v = reduced_rhs({PI / 2, 0.0, 0.0}, p);
        CHECK(v.norm() < 1e-15);
    }
    SUBCASE("pure falling motion") {
        auto v = reduced_rhs({PI / 2, PI / 2, 0.0}, p);
        CHECK(v[0] == doctest::Approx(-p.b()));
        CHECK(std::abs(v[1]) < 1e-15);
        CHECK(std::abs(v[2]) < 1e-15);
    }
    SUBCASE("guard") {
        CHECK_THROWS_AS(reduced_rhs({0.0, 0.0, 0.0}, p), SinThetaZero);
    }
    SUBCASE("pushforward satisfies the lifted system") {
        auto lifted = build_lifted_system(p);
        auto extended = build_extended_lifted_system(p);
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> th(0.15, PI - 0.15), an(0.0, 2 * PI);
        const double h = 1e-6;
        for (int i = 0; i < 100; ++i) {
            ChartPoint c{th(rng), an(rng), an(rng)};
            auto rhs = reduced_rhs(c, p);
            // Finite-difference chart Jacobian as the independent oracle.
            Eigen::MatrixXd Jfd(7, 3);
            for (int j = 0; j < 3; ++j) {
                ChartPoint cp = c, cm = c;
                double* pp[3] = {&cp.theta, &cp.phi, &cp.psi};
                double* pm[3] = {&cm.theta, &cm.phi, &cm.psi};
                *pp[j] += h;
                *pm[j] -= h;
                Jfd.col(j) =
                    (chart_embed(cp, p).as_vector() - chart_embed(cm, p).as_vector()) / (2 * h);
            }
            Eigen::VectorXd ydot = Jfd * rhs;
            Eigen::VectorXd y = chart_embed(c, p).as_vector();
            CHECK(lifted.system.residual(span_of(y), ydot).norm() < 1e-8);
            CHECK(extended.residual(span_of(y), ydot).norm() < 1e-8);
            // The analytic Jacobian gives the same field to high accuracy.
            Eigen::VectorXd ydot_exact = chart_jacobian(c, p) * rhs;
            CHECK(extended.residual(span_of(y), ydot_exact).norm() < 1e-10);
        }
    }
}

TEST_CASE("selected field of the extended system matches the chart pushforward") {
    auto p = default_params();
    auto extended = build_extended_lifted_system(p);
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> th(0.2, PI - 0.2), an(0.0, 2 * PI);
    for (int i = 0; i < 30; ++i) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        Eigen::VectorXd y = chart_embed(c, p).as_vector();
        auto d = solve_las(extended, span_of(y));
        CHECK(d.null_basis.cols() == 0);  // tangency rows pin the field
        Eigen::VectorXd expected = chart_jacobian(c, p) * reduced_rhs(c, p);
        CHECK((select_vector_field(d) - expected).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("planar dynamics and first integral") {
    auto p = default_params();
    CHECK(planar_rhs(PI / 2, 0.0, p).norm() < 1e-15);
    auto v = planar_rhs(PI / 2, PI / 2, p);
    CHECK(v[0] == doctest::Approx(-p.b()));
    CHECK(std::abs(v[1]) < 1e-15);

    CHECK(first_integral(PI / 2, PI / 2) == doctest::Approx(0.0));
    CHECK(first_integral(PI / 2, 0.0) == doctest::Approx(1.0));

    // w_dot equals phi_dot - psi_dot from the reduced dynamics.
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> th(0.1, PI - 0.1), an(0.0, 2 * PI);
    for (int i = 0; i < 100; ++i) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        auto r3 = reduced_rhs(c, p);
        auto r2 = planar_rhs(c.theta, c.w(), p);
        CHECK(std::abs(r2[0] - r3[0]) < 1e-12);
        CHECK(std::abs(r2[1] - (r3[1] - r3[2])) < 1e-12);
    }
}

TEST_CASE("first integral is conserved along planar flows") {
    auto p = default_params();
    auto traj = integrate_planar(1.0, 0.5, p, 0.0, 5.0, 1e-4);
    REQUIRE(traj.termination == Termination::Completed);
    double c0 = first_integral(1.0, 0.5);
    double drift = 0.0;
    for (const auto& x : traj.states)
        drift = std::max(drift, std::abs(first_integral(x[0], x[1]) - c0));
    CHECK(drift < 1e-9);
}

TEST_CASE("planar integration ends just before the coordinate singularity") {
    auto p = default_params();  // b = 1
    // theta(t) = pi/2 - t, w = pi/2 is an exact solution heading into
    // sin(theta) = 0 at t = pi/2.
    auto traj = integrate_planar(PI / 2, PI / 2, p, 0.0, 5.0, 1e-3);
    CHECK(traj.termination == Termination::RankEvent);
    double t_end = traj.times.back();
    CHECK(t_end < PI / 2);
    CHECK(PI / 2 - t_end < 1e-6);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        CHECK(std::abs(traj.states[i][0] - (PI / 2 - traj.times[i])) < 1e-8);
        CHECK(std::abs(traj.states[i][1] - PI / 2) < 1e-8);
        CHECK(std::sin(traj.states[i][0]) > 0.0);
    }
}

TEST_CASE("special solutions satisfy the full system") {
    auto p = default_params();
    IdeSystem full = build_full_system(p);

    SUBCASE("fixed axis rolling") {
        Eigen::VectorXd init(7);
        double v0 = std::sqrt(2.0 / 3.0);
        init << 0.6, 0.8, 0.0, 0.0, 0.0, 0.0, v0;
        auto traj = special_solution(SpecialKind::Z3ZeroRolling, p, init, 0.0, 2.0, 0.01);
        for (const auto& seg : traj.segments)
            for (std::size_t i = 0; i < seg.size(); ++i) {
                CHECK(seg.diagnostics[i].residual < 1e-10);
                CHECK((seg.states[i] - init).norm() == 0.0);
            }
        Eigen::VectorXd bad = init;
        bad[6] = 1.0;
        CHECK_THROWS_AS(special_solution(SpecialKind::Z3ZeroRolling, p, bad, 0.0, 1.0, 0.01),
                        IdeError);
    }

    SUBCASE("vertical great circle") {
        Eigen::VectorXd init(7);
        init << 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0;  // |u| = sqrt(mu) = 1
        auto traj = special_solution(SpecialKind::SinThetaZeroCircle, p, init, 0.0, 3.0, 0.01);
        const auto& seg = traj.segments[0];
        for (std::size_t i = 0; i < seg.size(); ++i) {
            CHECK(seg.diagnostics[i].residual < 1e-10);
            auto s = AmbientState::from_vector(seg.states[i]);
            CHECK(std::abs(s.z.norm() - 1.0) < 1e-12);
            // zdot = z x u has speed |u| = sqrt(mu).
            CHECK(std::abs(s.z.cross(s.u).norm() - p.b()) < 1e-12);
            // Great circle through the pole, perpendicular to u.
            CHECK(std::abs(s.z.dot(s.u)) < 1e-12);
        }
    }
}

TEST_CASE("kinematic reconstruction has vanishing vertical angular velocity") {
    auto p = default_params();
    SUBCASE("closed forms") {
        Eigen::VectorXd init(7);
        init << 0.6, 0.8, 0.0, 0.0, 0.0, 0.0, std::sqrt(2.0 / 3.0);
        auto rolling = special_solution(SpecialKind::Z3ZeroRolling, p, init, 0.0, 1.0, 0.01);
        auto report = reconstruct_kinematics(rolling, p);
        CHECK(report.max_abs_omega3 < 1e-12);
        // omega = v0 z is horizontal and constant; the contact velocity is
        // a constant horizontal vector: straight-line rolling.
        for (std::size_t i = 0; i + 1 < report.contact_velocity.size(); ++i)
            CHECK((report.contact_velocity[i + 1] - report.contact_velocity[i]).norm() < 1e-14);
    }
    SUBCASE("generic integrated trajectory") {
        auto extended = build_extended_lifted_system(p);
        IntegrationOptions opts;
        opts.step = 1e-3;
        opts.t1 = 1.0;
        opts.projection_constraints = manifold_constraints(p);
        Eigen::VectorXd y0 = chart_embed({1.0, 0.5, 0.0}, p).as_vector();
        auto traj = integrate(extended, span_of(y0), opts);
        REQUIRE(traj.back().termination == Termination::Completed);
        auto report = reconstruct_kinematics(traj, p);
        CHECK(report.max_abs_omega3 < 1e-8);
    }
}

TEST_CASE("randomized rank sweeps") {
    auto p = default_params();
    auto a = verify_manifold_rank(p, 1000, 7, 1e-8);
    CHECK(a.pass);
    CHECK(a.failures.empty());
    CHECK(a.min_sigma_ratio > 1e-8);
    auto json_text = a.to_json_string();
    CHECK(json_text.find("\"pass\": true") != std::string::npos);

    auto b = verify_chart_rank(p, 1000, 7, 1e-8);
    CHECK(b.pass);
    CHECK(b.failures.empty());
    CHECK(b.min_sigma_ratio > 1e-8);
    CHECK(b.min_pole_gram > 1e-8);
}

TEST_CASE("pole tangent vectors match finite differences of the chart") {
    auto p = default_params();
    const double b = p.b();
    const double h = 1e-6;
    for (double psi : {0.3, 2.0, 4.4}) {
        // A and B: theta-direction curves at phi = 0 and phi = pi/2.
        Eigen::VectorXd A_fd =
            (chart_embed({h, 0.0, psi}, p).as_vector() -
             chart_embed({-h, 0.0, psi}, p).as_vector()) /
            (2 * h);
        Eigen::VectorXd A(7);
        A << 1, 0, 0, 0, 0, b * std::cos(psi), b * std::cos(psi);
        CHECK((A_fd - A).cwiseAbs().maxCoeff() < 1e-6);

        Eigen::VectorXd B_fd =
            (chart_embed({h, PI / 2, psi}, p).as_vector() -
             chart_embed({-h, PI / 2, psi}, p).as_vector()) /
            (2 * h);
        Eigen::VectorXd B(7);
        B << 0, 1, 0, 0, 0, b * std::sin(psi), b * std::sin(psi);
        CHECK((B_fd - B).cwiseAbs().maxCoeff() < 1e-6);

        // C: psi-direction at the pole.
        Eigen::VectorXd C_fd =
            (chart_embed({0.0, 0.0, psi + h}, p).as_vector() -
             chart_embed({0.0, 0.0, psi - h}, p).as_vector()) /
            (2 * h);
        Eigen::VectorXd C(7);
        C << 0, 0, 0, b * std::sin(psi), -b * std::cos(psi), 0, 0;
        CHECK((C_fd - C).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("manifold samples") {
    auto p = default_params();
    auto samples = sample_m1b(p, 200, 99);
    auto again = sample_m1b(p, 200, 99);
    REQUIRE(samples.size() == 200);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        CHECK((samples[i].as_vector() - again[i].as_vector()).norm() == 0.0);
        CHECK(std::abs(samples[i].z.squaredNorm() - 1.0) < 1e-12);
        double energy = 2.0 * samples[i].u.squaredNorm() + 3.0 * samples[i].v0 * samples[i].v0;
        CHECK(std::abs(energy - 2.0) < 1e-10);
        CHECK(constraint_violation(samples[i], p) < 1e-12);
    }
}

TEST_CASE("chart is injective away from the poles") {
    auto p = default_params();
    std::set<std::array<long long, 7>> seen;
    const int N = 20;
    for (int i = 1; i <= N; ++i) {
        for (int j = 0; j < N; ++j) {
            for (int k = 0; k < N; ++k) {
                ChartPoint c{PI * i / (N + 1), 2 * PI * j / N, 2 * PI * k / N};
                auto x = chart_embed(c, p).as_vector();
                std::array<long long, 7> key;
                for (int q = 0; q < 7; ++q) key[q] = std::llround(x[q] * 1e9);
                CHECK(seen.insert(key).second);
            }
        }
    }
}

TEST_CASE("singular branch systems") {
    auto p = default_params();
    std::vector<double> pole = {0, 0, 1, 1, 0, 0, 0};

    SUBCASE("the axis branch admits no motion") {
        auto axis = build_branch_axis_system(p);
        CHECK_THROWS_AS(solve_las(axis, pole), NoSolutionAtPoint);
        auto label = classify_point(axis, pole, 1e-8);
        CHECK(label.stratum == Stratum::M0);
        CHECK(label.rank_a == 3);
        CHECK(label.rank_af == 4);
    }

    SUBCASE("the z3 branch carries the fixed-axis rolling solutions") {
        auto z3branch = build_branch_z3_system(p);
        std::vector<double> rolling = {0.6, 0.8, 0.0, 0.0, 0.0, 0.0, std::sqrt(2.0 / 3.0)};
        auto d = solve_las(z3branch, rolling);
        // The motion is stationary in (z, u, v0).
        CHECK(select_vector_field(d).norm() < 1e-12);
    }
}

TEST_CASE("energy and constraints are conserved along the lifted flow") {
    auto p = default_params();
    auto extended = build_extended_lifted_system(p);
    IntegrationOptions opts;
    opts.step = 1e-3;
    opts.t1 = 2.0;
    opts.projection_constraints = manifold_constraints(p);
    Eigen::VectorXd y0 = chart_embed({1.0, 0.5, 0.0}, p).as_vector();
    auto traj = integrate(extended, span_of(y0), opts);
    const auto& seg = traj.back();
    REQUIRE(seg.termination == Termination::Completed);
    for (std::size_t i = 0; i < seg.size(); ++i) {
        auto s = AmbientState::from_vector(seg.states[i]);
        double energy = 2.0 * s.u.squaredNorm() + 3.0 * s.v0 * s.v0;
        CHECK(std::abs(energy - 2.0) < 1e-8);
        CHECK(seg.diagnostics[i].constraint_norm < 1e-9);
    }
}

TEST_CASE("chart flow and ambient flow agree") {
    auto p = default_params();
    auto lifted = build_lifted_system(p);
    auto extended = build_extended_lifted_system(p);

    ChartPoint c0{1.0, 0.5, 0.0};
    const double t1 = 0.5, h = 1e-3;

    IntegrationOptions opts;
    opts.step = h;
    opts.t1 = t1;
    opts.projection_constraints = manifold_constraints(p);
    Eigen::VectorXd y0 = chart_embed(c0, p).as_vector();
    auto ambient = integrate(extended, span_of(y0), opts);
    auto chart = integrate_reduced(c0, p, 0.0, t1, h);
    REQUIRE(ambient.back().size() == chart.times.size());

    double sup = 0.0;
    for (std::size_t i = 0; i < chart.times.size(); ++i) {
        ChartPoint c{chart.states[i][0], chart.states[i][1], chart.states[i][2]};
        Eigen::VectorXd mapped = chart_embed(c, p).as_vector();
        sup = std::max(sup, (ambient.back().states[i] - mapped).cwiseAbs().maxCoeff());
    }
    CHECK(sup < 1e-6);

    // The ambient trajectory also satisfies the 8-equation lifted system.
    for (std::size_t i = 0; i < ambient.back().size(); ++i) {
        CHECK(lifted.system
                  .residual(span_of(ambient.back().states[i]), ambient.back().derivs[i])
                  .norm() < 1e-8);
    }
}

TEST_CASE("projected lifted trajectory satisfies the full system") {
    auto p = default_params();
    auto lifted = build_lifted_system(p);
    auto extended = build_extended_lifted_system(p);
    IntegrationOptions opts;
    opts.step = 1e-3;
    opts.t1 = 1.0;
    opts.projection_constraints = manifold_constraints(p);
    Eigen::VectorXd y0 = chart_embed({1.1, 0.4, 0.2}, p).as_vector();
    auto traj = integrate(extended, span_of(y0), opts);
    auto projected = project_solution(lifted, traj);
    for (std::size_t i = 0; i < projected.back().size(); ++i)
        CHECK(projected.back().diagnostics[i].residual < 1e-8);
}

TEST_CASE("pullback of the full system onto the manifold matches the lifted display") {
    // Lifting the full system through the identity map with the manifold
    // constraints appended gives a 12-row system with the same solutions as
    // the 8-row display: the true tangent field satisfies both.
    auto p = default_params();
    auto full = build_full_system(p);
    auto lifted12 = lift_system(full, DesingMap::from_map(PolynomialMap::identity(variables()),
                                                          manifold_constraints(p)));
    CHECK(lifted12.system.m() == 12);
    auto display = build_lifted_system(p);
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> th(0.15, PI - 0.15), an(0.0, 2 * PI);
    for (int i = 0; i < 50; ++i) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        Eigen::VectorXd y = chart_embed(c, p).as_vector();
        Eigen::VectorXd ydot = chart_jacobian(c, p) * reduced_rhs(c, p);
        CHECK(lifted12.system.residual(span_of(y), ydot).norm() < 1e-10);
        CHECK(display.system.residual(span_of(y), ydot).norm() < 1e-10);
    }
}

TEST_CASE("perturbed chart points project back onto the manifold quickly") {
    auto p = default_params();
    auto constraints = manifold_constraints(p);
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> th(0.1, PI - 0.1), an(0.0, 2 * PI);
    std::uniform_real_distribution<double> noise(-1e-4, 1e-4);
    for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd y = chart_embed({th(rng), an(rng), an(rng)}, p).as_vector();
        for (int j = 0; j < 7; ++j) y[j] += noise(rng);
        auto result = project_onto_constraints(span_of(y), constraints, 1e-10, 5);
        CHECK(result.converged);
        CHECK(result.iterations <= 5);
        CHECK(result.residual < 1e-10);
    }
}

TEST_CASE("symbolic lift verification at chart points") {
    auto p = default_params();
    auto full = build_full_system(p);
    auto lifted = build_lifted_system(p);
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> th(0.1, PI - 0.1), an(0.0, 2 * PI);
    for (int i = 0; i < 100; ++i) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        Eigen::VectorXd y = chart_embed(c, p).as_vector();
        Eigen::VectorXd ydot = Eigen::VectorXd::Random(7);
        auto report = verify_projection_residual(full, lifted.map, span_of(y), ydot);
        CHECK(report.identity_gap < 1e-12);
        CHECK(report.jacobian_fd_error < 1e-6);
        CHECK(report.pass);
    }
}
