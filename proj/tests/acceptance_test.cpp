// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ide/desingularization.hpp"
#include "ide/elastic_sphere.hpp"
#include "ide/solver.hpp"
#include "ide/stratification.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

using namespace ide;
using namespace ide::sphere;

namespace {

const double PI = std::acos(-1.0);

SphereParams default_params() { return SphereParams::make(Rational(2), Rational(1), Rational(1)); }

std::span<const double> span_of(const Eigen::VectorXd& x) {
    return {x.data(), static_cast<std::size_t>(x.size())};
}

void report(int criterion, bool ok, const std::string& what) {
    std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

Polynomial P(const std::string& text, const std::vector<std::string>& vars) {
    return parse_polynomial(text, vars);
}

}  // namespace

TEST_CASE("criterion 1: sphere stratification") {
    Timer timer;
    auto p = default_params();
    auto full = build_full_system(p);
    SamplingOptions opts;  // seed 2024, budget 10^4
    auto rep = decompose_domain(full, opts);

    bool ranks_ok = rep.profile.distinct_ranks == std::vector<int>{3, 4} &&
                    rep.profile.generic_rank_af == 5 && rep.top_case == TopCase::B;

    // Sampled-locus equivalence of the computed M0 generators against the
    // two singular families on 10^4 seed-fixed points.
    auto m0 = rep.m0_generators();
    const auto& vars = full.variables;
    auto phi1 = P("-2*z2*z3", vars);
    auto phi2 = P("2*z1*z3", vars);
    std::vector<Polynomial> nus = {full.f[4], full.f[5], full.f[6], full.f[7]};

    const double tol = 1e-9;
    auto on_m0_computed = [&](std::span<const double> x) {
        for (const auto& g : m0)
            if (std::abs(g.evaluate(x)) > tol) return false;
        return true;
    };
    auto on_m0_families = [&](std::span<const double> x) {
        bool on_a = std::abs(phi1.evaluate(x)) <= tol && std::abs(phi2.evaluate(x)) <= tol;
        bool on_b = true;
        for (const auto& nu : nus)
            if (std::abs(nu.evaluate(x)) > tol) on_b = false;
        return on_a || on_b;
    };

    std::mt19937_64 rng(20240);
    std::uniform_real_distribution<double> box(-2.0, 2.0);
    std::uniform_real_distribution<double> th(0.0, PI), an(0.0, 2 * PI);
    int mismatches = 0;
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> x(7);
        switch (i % 4) {
            case 0:  // generic box point (off both families)
                for (auto& c : x) c = box(rng);
                break;
            case 1:  // on {z3 = 0}
                for (auto& c : x) c = box(rng);
                x[2] = 0.0;
                break;
            case 2: {  // on the energy manifold (the nu family)
                auto s = chart_embed({th(rng), an(rng), an(rng)}, p);
                Eigen::VectorXd v = s.as_vector();
                x.assign(v.data(), v.data() + 7);
                break;
            }
            case 3:  // on {z1 = z2 = 0}
                for (auto& c : x) c = box(rng);
                x[0] = 0.0;
                x[1] = 0.0;
                break;
        }
        if (on_m0_computed(x) != on_m0_families(x)) ++mismatches;
    }
    double elapsed = timer.seconds();
    bool ok = ranks_ok && mismatches == 0 && elapsed < 5.0;
    report(1, ok,
           "sphere stratification: ranks {3,4}, rank [a,f] = 5, case b, singular locus matches "
           "both families on 10^4 points (" + num(mismatches) + " mismatches, " +
           num(elapsed) + " s)");
    CHECK(ranks_ok);
    CHECK(mismatches == 0);
    CHECK(elapsed < 5.0);
}

TEST_CASE("criterion 2: constraint tangent matrix has rank 4") {
    Timer timer;
    auto rep = verify_manifold_rank(default_params(), 1000, 7, 1e-8);
    double elapsed = timer.seconds();
    bool ok = rep.pass && rep.failures.empty() && elapsed < 1.0;
    report(2, ok,
           "rank-4 sweep over 1000 manifold samples, min sigma4/sigma1 = " +
           num(rep.min_sigma_ratio) + " (" + num(elapsed) + " s)");
    CHECK(rep.pass);
    CHECK(elapsed < 1.0);
}

TEST_CASE("criterion 3: chart Jacobian has rank 3") {
    Timer timer;
    auto rep = verify_chart_rank(default_params(), 1000, 7, 1e-8);
    double elapsed = timer.seconds();
    bool ok = rep.pass && rep.failures.empty() && rep.min_pole_gram > 1e-8 && elapsed < 1.0;
    report(3, ok,
           "rank-3 sweep over 1000 interior samples plus pole tangents, min Gram determinant = " +
           num(rep.min_pole_gram) + " (" + num(elapsed) + " s)");
    CHECK(rep.pass);
    CHECK(rep.min_pole_gram > 1e-8);
    CHECK(elapsed < 1.0);
}

TEST_CASE("criterion 4: conservation along the lifted flow") {
    auto p = default_params();
    auto extended = build_extended_lifted_system(p);
    IntegrationOptions opts;
    opts.step = 1e-4;
    opts.t0 = 0.0;
    opts.t1 = 5.0;
    opts.projection_constraints = manifold_constraints(p);
    Eigen::VectorXd y0 = chart_embed({1.0, 0.5, 0.0}, p).as_vector();
    auto traj = integrate(extended, span_of(y0), opts);
    const auto& seg = traj.back();

    double energy_drift = 0.0, constraint_residual = 0.0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        auto s = AmbientState::from_vector(seg.states[i]);
        energy_drift = std::max(
            energy_drift, std::abs(2.0 * s.u.squaredNorm() + 3.0 * s.v0 * s.v0 - 2.0));
        constraint_residual = std::max(constraint_residual, seg.diagnostics[i].constraint_norm);
    }
    auto kin = reconstruct_kinematics(traj, p);
    bool ok = seg.termination == Termination::Completed && energy_drift < 1e-8 &&
              constraint_residual < 1e-9 && kin.max_abs_omega3 < 1e-8;
    report(4, ok,
           "t in [0,5], h = 1e-4: energy drift " + num(energy_drift) +
           ", constraint residual " + num(constraint_residual) +
           ", max |omega_3| " + num(kin.max_abs_omega3));
    CHECK(seg.termination == Termination::Completed);
    CHECK(energy_drift < 1e-8);
    CHECK(constraint_residual < 1e-9);
    CHECK(kin.max_abs_omega3 < 1e-8);
}

TEST_CASE("criterion 5: reduced and lifted flows agree") {
    auto p = default_params();
    auto extended = build_extended_lifted_system(p);
    ChartPoint c0{1.0, 0.5, 0.0};
    const double h = 1e-4, t1 = 2.0;

    IntegrationOptions opts;
    opts.step = h;
    opts.t1 = t1;
    opts.projection_constraints = manifold_constraints(p);
    Eigen::VectorXd y0 = chart_embed(c0, p).as_vector();
    auto ambient = integrate(extended, span_of(y0), opts);
    auto chart = integrate_reduced(c0, p, 0.0, t1, h);

    bool sizes_ok = ambient.back().size() == chart.times.size();
    double sup = 0.0;
    if (sizes_ok) {
        for (std::size_t i = 0; i < chart.times.size(); ++i) {
            ChartPoint c{chart.states[i][0], chart.states[i][1], chart.states[i][2]};
            Eigen::VectorXd mapped = chart_embed(c, p).as_vector();
            sup = std::max(sup, (ambient.back().states[i] - mapped).cwiseAbs().maxCoeff());
        }
    }
    bool ok = sizes_ok && sup < 1e-6;
    report(5, ok, "sup-norm gap between the two routes over t in [0,2]: " + num(sup));
    CHECK(sizes_ok);
    CHECK(sup < 1e-6);
}

TEST_CASE("criterion 6: quadrature of the planar system") {
    auto p = default_params();  // b = 1
    auto flow = integrate_planar(1.0, 0.5, p, 0.0, 5.0, 1e-4);
    double c0 = first_integral(1.0, 0.5);
    double drift = 0.0;
    for (const auto& x : flow.states)
        drift = std::max(drift, std::abs(first_integral(x[0], x[1]) - c0));

    // Closed form theta(t) = pi/2 - t, w = pi/2 before the pole.
    auto fall = integrate_planar(PI / 2, PI / 2, p, 0.0, 1.5, 1e-4);
    double closed_form_err = 0.0;
    for (std::size_t i = 0; i < fall.states.size(); ++i) {
        closed_form_err = std::max(closed_form_err,
                                   std::abs(fall.states[i][0] - (PI / 2 - fall.times[i])));
        closed_form_err = std::max(closed_form_err, std::abs(fall.states[i][1] - PI / 2));
    }
    bool ok = flow.termination == Termination::Completed && drift < 1e-9 &&
              fall.termination == Termination::Completed && closed_form_err < 1e-8;
    report(6, ok,
           "first integral drift " + num(drift) + " over t in [0,5]; closed-form error " +
           num(closed_form_err));
    CHECK(flow.termination == Termination::Completed);
    CHECK(drift < 1e-9);
    CHECK(closed_form_err < 1e-8);
}

TEST_CASE("criterion 7: impasse traversal in homogeneous mode") {
    auto s = make_system(
        "impasse", {"x"},
        [] {
            PolynomialMatrix m(1, 1, {"x"});
            m.at(0, 0) = P("x", {"x"});
            return m;
        }(),
        {P("1", {"x"})});
    IntegrationOptions opts;
    opts.step = 1e-3;
    opts.t1 = 2.2;
    opts.orientation = -1;
    auto traj = integrate_homogeneous(s, std::vector<double>{1.0}, 0.0, opts);
    const auto& seg = traj.back();
    double parabola_err = 0.0, min_abs_x = 1.0;
    bool crossed = false;
    for (const auto& y : seg.states) {
        parabola_err = std::max(parabola_err, std::abs(y[0] * y[0] - (2.0 * y[1] + 1.0)));
        min_abs_x = std::min(min_abs_x, std::abs(y[0]));
        if (y[0] < -0.1) crossed = true;
    }
    bool ok = seg.termination == Termination::Completed && parabola_err < 1e-8 && crossed &&
              min_abs_x < 2e-3;
    report(7, ok,
           "x^2 = 2t + 1 holds to " + num(parabola_err) +
           " through the impasse point (closest |x| = " + num(min_abs_x) + ")");
    CHECK(seg.termination == Termination::Completed);
    CHECK(parabola_err < 1e-8);
    CHECK(crossed);
}

TEST_CASE("criterion 8: iterated reduction of the linear DAE") {
    std::vector<std::string> xy = {"x1", "x2"};
    PolynomialMatrix a(2, 2, xy);
    a.at(0, 0) = P("1", xy);
    auto dae = make_system("dae", xy, std::move(a), {P("x2", xy), P("x1", xy)});
    SamplingOptions opts;
    opts.budget = 2000;
    auto trace = iterate_reduction(dae, opts);

    bool steps_ok = trace.reached_fixed_point && trace.fixed_point_step == 2;
    bool locus_ok = !trace.steps.back().report.m0_witnesses.empty();
    for (const auto& w : trace.steps.back().report.m0_witnesses)
        locus_ok = locus_ok && std::abs(w[0]) < 1e-6 && std::abs(w[1]) < 1e-6;

    // The only trajectory on the fixed locus is the constant origin.
    IntegrationOptions iopts;
    iopts.step = 1e-2;
    iopts.t1 = 1.0;
    auto traj = integrate(trace.steps.back().system, std::vector<double>{0.0, 0.0}, iopts);
    double max_norm = 0.0;
    for (const auto& x : traj.back().states) max_norm = std::max(max_norm, x.norm());
    bool traj_ok = traj.back().termination == Termination::Completed && max_norm < 1e-12;

    bool ok = steps_ok && locus_ok && traj_ok;
    report(8, ok,
           "fixed locus {(0,0)} reached in " + std::to_string(trace.fixed_point_step) +
           " reduction steps; constant trajectory stays at the origin");
    CHECK(steps_ok);
    CHECK(locus_ok);
    CHECK(traj_ok);
}

TEST_CASE("criterion 9: symbolic lift correctness") {
    auto p = default_params();
    auto full = build_full_system(p);
    auto lifted = build_lifted_system(p);
    std::mt19937_64 rng(909);
    std::uniform_real_distribution<double> th(0.1, PI - 0.1), an(0.0, 2 * PI);

    double max_rel_gap = 0.0, max_fd = 0.0;
    bool all_pass = true;
    auto record = [&](const ProjectionResidualReport& rep) {
        double scale = 1.0 + std::max(rep.lifted_residual, rep.chainrule_residual);
        max_rel_gap = std::max(max_rel_gap, rep.identity_gap / scale);
        max_fd = std::max(max_fd, rep.jacobian_fd_error);
        all_pass = all_pass && rep.pass;
    };
    for (int i = 0; i < 100; ++i) {
        ChartPoint c{th(rng), an(rng), an(rng)};
        Eigen::VectorXd y = chart_embed(c, p).as_vector();
        Eigen::VectorXd ydot = Eigen::VectorXd::Random(7);
        record(verify_projection_residual(full, lifted.map, span_of(y), ydot));
    }

    std::uniform_int_distribution<int> coeff(-3, 3);
    std::uniform_int_distribution<int> deg(0, 2);
    std::vector<std::string> xs = {"x1", "x2", "x3"}, ys = {"y1", "y2", "y3"};
    auto rnd = [&](const std::vector<std::string>& vars) {
        Polynomial poly(vars);
        for (int t = 0; t < 4; ++t) {
            // Random monomial of total degree at most 2.
            Exponents e(vars.size(), 0);
            int d = deg(rng);
            for (int k = 0; k < d; ++k)
                e[static_cast<std::size_t>(std::abs(coeff(rng))) % vars.size()] += 1;
            poly += Polynomial::monomial(vars, e, Rational(coeff(rng)));
        }
        return poly;
    };
    std::uniform_real_distribution<double> coord(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        PolynomialMatrix a(3, 3, xs);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) a.at(i, j) = rnd(xs);
        auto sys = make_system("rnd", xs, std::move(a), {rnd(xs), rnd(xs), rnd(xs)});
        auto dmap = DesingMap::from_map(PolynomialMap(ys, {rnd(ys), rnd(ys), rnd(ys)}));
        std::vector<double> y = {coord(rng), coord(rng), coord(rng)};
        Eigen::VectorXd ydot = Eigen::VectorXd::Random(3);
        record(verify_projection_residual(sys, dmap, y, ydot));
    }
    bool ok = all_pass && max_rel_gap < 1e-12 && max_fd < 1e-6;
    report(9, ok,
           "pullback residual identity gap " + num(max_rel_gap) +
           " (relative), Jacobian finite-difference error " + num(max_fd));
    CHECK(all_pass);
    CHECK(max_rel_gap < 1e-12);
    CHECK(max_fd < 1e-6);
}

TEST_CASE("criterion 10: restriction equivalence on the circle") {
    std::vector<std::string> xy = {"x1", "x2"};
    PolynomialMatrix a(2, 2, xy);
    a.at(0, 0) = P("1", xy);
    a.at(1, 1) = P("1", xy);
    auto field = make_system("circle", xy, std::move(a), {P("-x2", xy), P("x1", xy)});
    ConstraintSet c(xy, {P("x1^2+x2^2-1", xy)});
    auto restricted = restrict_by_constraints(field, c, RestrictionForm::Appended);

    IntegrationOptions opts;
    opts.step = 1e-3;
    opts.t1 = 2 * PI;
    opts.projection_constraints = c;
    auto traj = integrate(restricted, std::vector<double>{1.0, 0.0}, opts);
    const auto& seg = traj.back();
    double flow_err = 0.0, circle_err = 0.0;
    for (std::size_t i = 0; i < seg.size(); ++i) {
        double t = seg.times[i];
        flow_err = std::max(flow_err, std::abs(seg.states[i][0] - std::cos(t)));
        flow_err = std::max(flow_err, std::abs(seg.states[i][1] - std::sin(t)));
        circle_err = std::max(circle_err, std::abs(seg.states[i].squaredNorm() - 1.0));
    }
    bool ok = seg.termination == Termination::Completed && flow_err < 1e-6 && circle_err < 1e-10;
    report(10, ok,
           "restricted circle flow matches (cos t, sin t) to " + num(flow_err) +
           " and stays on the circle to " + num(circle_err));
    CHECK(seg.termination == Termination::Completed);
    CHECK(flow_err < 1e-6);
    CHECK(circle_err < 1e-10);
}
