#include "ide/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace ide {

namespace {

struct Svd {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd;
    explicit Svd(const Eigen::MatrixXd& m)
        : svd(m, Eigen::ComputeThinU | Eigen::ComputeFullV) {}

    double sigma_max() const {
        return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    }
    int rank_above(double threshold) const {
        const auto& sigma = svd.singularValues();
        int r = 0;
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma[i] > threshold) ++r;
        return r;
    }
};

int svd_rank_relative(const Eigen::MatrixXd& m, double tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sigma = svd.singularValues();
    if (sigma.size() == 0 || sigma[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > tol * sigma[0]) ++r;
    return r;
}

}  // namespace

std::string to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "completed";
        case Termination::RankEvent: return "rank_event";
        case Termination::NoSolution: return "no_solution";
        case Termination::BlowUp: return "blow_up";
    }
    return "?";
}

namespace {

// Min-norm least-squares solution of the LAS, with no consistency verdict.
AffineDistribution least_squares_distribution(const IdeSystem& s, std::span<const double> x,
                                              double tol) {
    if (static_cast<int>(x.size()) != s.n()) throw IdeError("solve_las: point dimension mismatch");
    Eigen::MatrixXd A = s.eval_a(x);
    Eigen::VectorXd F = s.eval_f(x);
    Svd dec(A);
    const auto& sigma = dec.svd.singularValues();
    double smax = dec.sigma_max();
    int rank = smax > 0.0 ? dec.rank_above(tol * smax) : 0;

    Eigen::VectorXd particular = Eigen::VectorXd::Zero(s.n());
    for (int i = 0; i < rank; ++i)
        particular += (dec.svd.matrixU().col(i).dot(F) / sigma[i]) * dec.svd.matrixV().col(i);

    AffineDistribution d;
    d.rank = rank;
    d.particular = particular;
    d.null_basis = dec.svd.matrixV().rightCols(s.n() - rank);
    d.residual = (A * particular - F).norm();
    return d;
}

// Consistency scale: relative to the data, with an absolute ||a|| floor so
// that static solutions at rounded points are not rejected over noise.
double consistency_scale(const IdeSystem& s, std::span<const double> x,
                         const AffineDistribution& d) {
    double a_norm = s.eval_a(x).norm();
    return a_norm * d.particular.norm() + s.eval_f(x).norm() + a_norm;
}

}  // namespace

std::optional<AffineDistribution> try_solve_las(const IdeSystem& s, std::span<const double> x,
                                                double tol) {
    AffineDistribution d = least_squares_distribution(s, x, tol);
    if (d.residual > tol * consistency_scale(s, x, d)) return std::nullopt;
    return d;
}

AffineDistribution solve_las(const IdeSystem& s, std::span<const double> x, double tol) {
    auto d = try_solve_las(s, x, tol);
    if (!d)
        throw NoSolutionAtPoint("the LAS of '" + s.name + "' has no solution at the given point");
    return *d;
}

Eigen::VectorXd select_vector_field(const AffineDistribution& d) { return d.particular; }

Eigen::VectorXd select_vector_field(const AffineDistribution& d, const FieldSelector& selector) {
    if (!selector) return d.particular;
    Eigen::VectorXd c = selector(d);
    if (c.size() != d.null_basis.cols())
        throw IdeError("selector returned " + std::to_string(c.size()) +
                       " kernel coefficients, expected " + std::to_string(d.null_basis.cols()));
    if (!c.allFinite()) throw IdeError("selector returned non-finite kernel coefficients");
    return d.particular + d.null_basis * c;
}

ProjectionResult project_onto_constraints(std::span<const double> x, const ConstraintSet& c,
                                          double tol, int max_iter) {
    ProjectionResult result;
    result.point.assign(x.begin(), x.end());
    for (int iter = 0; iter <= max_iter; ++iter) {
        Eigen::VectorXd phi = c.evaluate(result.point);
        result.residual = phi.size() ? phi.cwiseAbs().maxCoeff() : 0.0;
        result.iterations = iter;
        if (result.residual < tol) {
            result.converged = true;
            return result;
        }
        if (iter == max_iter) break;
        Eigen::MatrixXd J = c.jacobian_at(result.point);
        Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(phi);
        if (!step.allFinite()) break;
        for (std::size_t j = 0; j < result.point.size(); ++j)
            result.point[j] -= step[static_cast<Eigen::Index>(j)];
    }
    return result;
}

namespace {

enum class StepFault { None, LasFailure, FieldCap, StageSpread, NonFinite, RankChange, BlowUp };

struct Stepper {
    const IdeSystem& s;
    const IntegrationOptions& opts;
    double sigma_ref = 1.0;  // sigma_1 of a at the segment start
    int rank0 = 0;

    int anchored_rank(const Eigen::MatrixXd& A) const {
        Svd dec(A);
        return dec.rank_above(opts.rank_tol * sigma_ref);
    }

    // Stage fields use the least-squares solution without a consistency
    // verdict: RK4 stages sit O(h^2) off the constraint manifold, where the
    // algebraic rows of a stabilized system cannot be satisfied exactly.
    // Solvability is enforced at the accepted (projected) step endpoints.
    std::optional<Eigen::VectorXd> field(const Eigen::VectorXd& x, StepFault& fault) const {
        if (!x.allFinite()) {
            fault = StepFault::NonFinite;
            return std::nullopt;
        }
        AffineDistribution d =
            least_squares_distribution(s, std::span<const double>(x.data(), x.size()),
                                       opts.las_tol);
        Eigen::VectorXd v = select_vector_field(d, opts.selector);
        if (!v.allFinite()) {
            fault = StepFault::NonFinite;
            return std::nullopt;
        }
        if (v.norm() > opts.field_cap) {
            fault = StepFault::FieldCap;
            return std::nullopt;
        }
        return v;
    }

    struct Attempt {
        bool ok = false;
        StepFault fault = StepFault::None;
        Eigen::VectorXd x_new;
        bool projection_converged = true;
    };

    Attempt try_step(const Eigen::VectorXd& x, double h_signed, bool apply_projection) const {
        Attempt out;
        StepFault fault = StepFault::None;
        auto k1 = field(x, fault);
        if (!k1) {
            out.fault = fault;
            return out;
        }
        auto k2 = field(x + 0.5 * h_signed * *k1, fault);
        if (!k2) {
            out.fault = fault;
            return out;
        }
        auto k3 = field(x + 0.5 * h_signed * *k2, fault);
        if (!k3) {
            out.fault = fault;
            return out;
        }
        auto k4 = field(x + h_signed * *k3, fault);
        if (!k4) {
            out.fault = fault;
            return out;
        }
        double spread = std::max({(*k2 - *k1).norm(), (*k3 - *k1).norm(), (*k4 - *k1).norm()});
        if (spread > opts.stage_spread_cap * std::max(1.0, k1->norm())) {
            out.fault = StepFault::StageSpread;
            return out;
        }
        Eigen::VectorXd x_new = x + (h_signed / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
        if (!x_new.allFinite()) {
            out.fault = StepFault::NonFinite;
            return out;
        }
        if (x_new.norm() > opts.blow_up_norm) {
            out.fault = StepFault::BlowUp;
            out.x_new = std::move(x_new);
            return out;
        }
        if (apply_projection && opts.projection_constraints &&
            !opts.projection_constraints->generators.empty()) {
            auto proj = project_onto_constraints(
                std::span<const double>(x_new.data(), x_new.size()), *opts.projection_constraints,
                opts.projection_tol, opts.projection_max_iter);
            for (std::size_t j = 0; j < proj.point.size(); ++j)
                x_new[static_cast<Eigen::Index>(j)] = proj.point[j];
            out.projection_converged = proj.converged;
        }
        std::span<const double> xs(x_new.data(), static_cast<std::size_t>(x_new.size()));
        if (!try_solve_las(s, xs, opts.las_tol)) {
            out.fault = StepFault::LasFailure;
            out.x_new = std::move(x_new);
            return out;
        }
        if (anchored_rank(s.eval_a(xs)) != rank0) {
            out.fault = StepFault::RankChange;
            out.x_new = std::move(x_new);
            return out;
        }
        out.ok = true;
        out.x_new = std::move(x_new);
        return out;
    }
};

StepDiagnostics make_diagnostics(const IdeSystem& s, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& v, const IntegrationOptions& opts,
                                 bool projection_converged) {
    StepDiagnostics diag;
    std::span<const double> xs(x.data(), static_cast<std::size_t>(x.size()));
    diag.residual = s.residual(xs, v).norm();
    if (opts.projection_constraints && !opts.projection_constraints->generators.empty()) {
        Eigen::VectorXd phi = opts.projection_constraints->evaluate(xs);
        diag.constraint_norm = phi.cwiseAbs().maxCoeff();
    }
    Eigen::MatrixXd A = s.eval_a(xs);
    Eigen::MatrixXd AF(A.rows(), A.cols() + 1);
    AF << A, s.eval_f(xs);
    diag.rank_a = svd_rank_relative(A, opts.rank_tol);
    diag.rank_af = svd_rank_relative(AF, opts.rank_tol);
    diag.projection_converged = projection_converged;
    return diag;
}

}  // namespace

Trajectory integrate(const IdeSystem& s, std::span<const double> x0,
                     const IntegrationOptions& opts) {
    if (static_cast<int>(x0.size()) != s.n())
        throw IdeError("integrate: initial state dimension mismatch");
    if (!(opts.step > 0.0)) throw IdeError("integrate: step must be positive");
    if (opts.mode == IntegrationMode::Homogeneous)
        return integrate_homogeneous(s, x0, opts.t0, opts);

    Trajectory traj;
    traj.variables = s.variables;
    TrajectorySegment seg;
    seg.system_id = s.name;

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(x0.data(), x0.size());
    const double dir = opts.t1 >= opts.t0 ? 1.0 : -1.0;
    double t = opts.t0;

    Stepper stepper{s, opts};
    {
        Svd dec(s.eval_a(x0));
        stepper.sigma_ref = dec.sigma_max() > 0.0 ? dec.sigma_max() : 1.0;
        stepper.rank0 = dec.rank_above(opts.rank_tol * stepper.sigma_ref);
    }

    // The segment cannot start where the LAS fails.
    Eigen::VectorXd v0 = select_vector_field(solve_las(s, x0, opts.las_tol), opts.selector);
    seg.times.push_back(t);
    seg.states.push_back(x);
    seg.derivs.push_back(v0);
    seg.diagnostics.push_back(make_diagnostics(s, x, v0, opts, true));

    const double span = std::abs(opts.t1 - opts.t0);
    const long max_rounds = static_cast<long>(span / opts.step) + 20000;
    long rounds = 0;
    long accepted = 0;
    seg.termination = Termination::Completed;

    auto record = [&](const Eigen::VectorXd& state, double time, bool proj_ok) {
        StepFault f = StepFault::None;
        auto v = stepper.field(state, f);
        Eigen::VectorXd deriv = v ? *v : Eigen::VectorXd::Zero(s.n());
        seg.times.push_back(time);
        seg.states.push_back(state);
        seg.derivs.push_back(deriv);
        seg.diagnostics.push_back(make_diagnostics(s, state, deriv, opts, proj_ok));
    };

    while (std::abs(t - opts.t1) > 1e-13 * std::max(1.0, span)) {
        if (++rounds > max_rounds)
            throw IdeError("integrate: step budget exhausted (pathological system?)");
        double h = std::min(opts.step, std::abs(opts.t1 - t));
        bool project_now = opts.project_every > 0 && (accepted + 1) % opts.project_every == 0;
        auto attempt = stepper.try_step(x, dir * h, project_now);
        if (attempt.fault == StepFault::BlowUp) {
            seg.termination = Termination::BlowUp;
            break;
        }
        if (!attempt.ok) {
            // Shrink the step by bisection to localize the boundary.
            double lo = 0.0, hi = h;
            StepFault boundary_fault = attempt.fault;
            Stepper::Attempt last_good;
            while (hi - lo > opts.event_tol) {
                double mid = 0.5 * (lo + hi);
                auto trial = stepper.try_step(x, dir * mid, project_now);
                if (trial.ok) {
                    lo = mid;
                    last_good = std::move(trial);
                } else {
                    hi = mid;
                    boundary_fault = trial.fault;
                }
            }
            if (lo > 2 * opts.event_tol) {
                // Advance to the boundary and keep going; repeated shrinking
                // walks the state into the singular set.
                x = last_good.x_new;
                t += dir * lo;
                ++accepted;
                record(x, t, last_good.projection_converged);
                continue;
            }
            seg.termination = boundary_fault == StepFault::LasFailure ? Termination::NoSolution
                                                                      : Termination::RankEvent;
            break;
        }
        x = attempt.x_new;
        t += dir * h;
        ++accepted;
        record(x, t, attempt.projection_converged);
    }

    traj.segments.push_back(std::move(seg));
    return traj;
}

namespace {

// Oriented unit kernel vector of b(y); requires a one-dimensional kernel.
std::optional<Eigen::VectorXd> kernel_direction(const IdeSystem& hom, const Eigen::VectorXd& y,
                                                const Eigen::VectorXd* prev, double rank_tol) {
    Eigen::MatrixXd B =
        hom.eval_a(std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
    Svd dec(B);
    double smax = dec.sigma_max();
    int rank = smax > 0.0 ? dec.rank_above(rank_tol * smax) : 0;
    if (rank != hom.n() - 1) return std::nullopt;
    Eigen::VectorXd k = dec.svd.matrixV().col(hom.n() - 1);
    if (prev) {
        double align = k.dot(*prev);
        if (align == 0.0) return std::nullopt;  // orientation reversal failure
        if (align < 0.0) k = -k;
    }
    return k;
}

}  // namespace

Trajectory integrate_homogeneous(const IdeSystem& s, std::span<const double> x0, double t0,
                                 const IntegrationOptions& opts) {
    IdeSystem hom = homogenize(s);
    if (static_cast<int>(x0.size()) != s.n())
        throw IdeError("integrate_homogeneous: initial state dimension mismatch");
    if (!(opts.step > 0.0)) throw IdeError("integrate_homogeneous: step must be positive");

    Eigen::VectorXd y(hom.n());
    for (int i = 0; i < s.n(); ++i) y[i] = x0[static_cast<std::size_t>(i)];
    y[s.n()] = t0;

    auto first = kernel_direction(hom, y, nullptr, opts.rank_tol);
    if (!first)
        throw IdeError("integrate_homogeneous: kernel dimension != 1 at the starting point");
    // Initial orientation: positive tdot, else positive first nonzero entry.
    Eigen::VectorXd d0 = *first;
    double tdot = d0[s.n()];
    if (std::abs(tdot) > 1e-12) {
        if (tdot < 0.0) d0 = -d0;
    } else {
        for (Eigen::Index i = 0; i < d0.size(); ++i) {
            if (std::abs(d0[i]) > 1e-12) {
                if (d0[i] < 0.0) d0 = -d0;
                break;
            }
        }
    }
    if (opts.orientation < 0) d0 = -d0;

    Trajectory traj;
    traj.variables = hom.variables;
    TrajectorySegment seg;
    seg.system_id = hom.name;
    seg.termination = Termination::Completed;

    auto diag_at = [&](const Eigen::VectorXd& yy, const Eigen::VectorXd& dd) {
        StepDiagnostics diag;
        std::span<const double> ys(yy.data(), static_cast<std::size_t>(yy.size()));
        diag.residual = hom.residual(ys, dd).norm();
        Eigen::MatrixXd B = hom.eval_a(ys);
        diag.rank_a = svd_rank_relative(B, opts.rank_tol);
        diag.rank_af = diag.rank_a;  // homogeneous right side is zero
        return diag;
    };

    double sarc = opts.t0;
    seg.times.push_back(sarc);
    seg.states.push_back(y);
    seg.derivs.push_back(d0);
    seg.diagnostics.push_back(diag_at(y, d0));

    Eigen::VectorXd dir = d0;
    const double span = std::abs(opts.t1 - opts.t0);
    const double sgn = opts.t1 >= opts.t0 ? 1.0 : -1.0;
    const long max_rounds = static_cast<long>(span / opts.step) + 20000;
    long rounds = 0;

    auto try_arc_step = [&](const Eigen::VectorXd& yy, double h, Eigen::VectorXd& out,
                            Eigen::VectorXd& dir_out) -> bool {
        auto k1 = kernel_direction(hom, yy, &dir, opts.rank_tol);
        if (!k1) return false;
        auto k2 = kernel_direction(hom, yy + 0.5 * h * *k1, &*k1, opts.rank_tol);
        if (!k2) return false;
        auto k3 = kernel_direction(hom, yy + 0.5 * h * *k2, &*k2, opts.rank_tol);
        if (!k3) return false;
        auto k4 = kernel_direction(hom, yy + h * *k3, &*k3, opts.rank_tol);
        if (!k4) return false;
        out = yy + (h / 6.0) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
        if (!out.allFinite() || out.norm() > opts.blow_up_norm) return false;
        auto kend = kernel_direction(hom, out, &*k4, opts.rank_tol);
        if (!kend) return false;
        dir_out = *kend;
        return true;
    };

    while (std::abs(sarc - opts.t1) > 1e-13 * std::max(1.0, span)) {
        if (++rounds > max_rounds)
            throw IdeError("integrate_homogeneous: step budget exhausted");
        double h = std::min(opts.step, std::abs(opts.t1 - sarc));
        Eigen::VectorXd y_new, dir_new;
        if (try_arc_step(y, sgn * h, y_new, dir_new)) {
            y = y_new;
            dir = dir_new;
            sarc += sgn * h;
            seg.times.push_back(sarc);
            seg.states.push_back(y);
            seg.derivs.push_back(dir);
            seg.diagnostics.push_back(diag_at(y, dir));
            continue;
        }
        double lo = 0.0, hi = h;
        Eigen::VectorXd y_good = y, dir_good = dir;
        while (hi - lo > opts.event_tol) {
            double mid = 0.5 * (lo + hi);
            Eigen::VectorXd y_try, dir_try;
            if (try_arc_step(y, sgn * mid, y_try, dir_try)) {
                lo = mid;
                y_good = y_try;
                dir_good = dir_try;
            } else {
                hi = mid;
            }
        }
        if (lo > 2 * opts.event_tol) {
            y = y_good;
            dir = dir_good;
            sarc += sgn * lo;
            seg.times.push_back(sarc);
            seg.states.push_back(y);
            seg.derivs.push_back(dir);
            seg.diagnostics.push_back(diag_at(y, dir));
            continue;
        }
        seg.termination = Termination::RankEvent;
        break;
    }

    traj.segments.push_back(std::move(seg));
    return traj;
}

std::optional<std::size_t> detect_rank_event(const TrajectorySegment& seg) {
    if (seg.diagnostics.empty()) return std::nullopt;
    int rank0 = seg.diagnostics.front().rank_a;
    for (std::size_t i = 1; i < seg.diagnostics.size(); ++i)
        if (seg.diagnostics[i].rank_a != rank0) return i;
    if (seg.termination == Termination::RankEvent) return seg.size() - 1;
    return std::nullopt;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
    os << "t";
    for (const auto& v : traj.variables) os << ", " << v;
    os << ", residual, constraint_norm, rank_a, rank_af\n";
    char buf[64];
    auto num = [&](double value) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return std::string(buf);
    };
    for (std::size_t k = 0; k < traj.segments.size(); ++k) {
        const auto& seg = traj.segments[k];
        os << "# segment " << k << " " << to_string(seg.termination) << "\n";
        for (std::size_t i = 0; i < seg.size(); ++i) {
            os << num(seg.times[i]);
            for (Eigen::Index j = 0; j < seg.states[i].size(); ++j)
                os << ", " << num(seg.states[i][j]);
            const auto& d = seg.diagnostics[i];
            os << ", " << num(d.residual) << ", " << num(d.constraint_norm) << ", " << d.rank_a
               << ", " << d.rank_af << "\n";
        }
    }
}

std::string trajectory_to_csv(const Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(traj, os);
    return os.str();
}

}  // namespace ide
